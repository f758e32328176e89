#pragma once

#include <cstdint>
#include <vector>

#include "crowdkg/beta_core.hpp"
#include "crowdkg/binary_mdp.hpp"
#include "crowdkg/policies.hpp"

namespace crowdkg {

// Dirichlet pseudo-counts over C classes for one instance.
struct DirichletState {
  std::vector<double> alpha;

  bool valid() const;
  std::size_t num_classes() const { return alpha.size(); }
};

// probs[c] = Pr(class c has the largest soft-label share | state).
struct ClassPosterior {
  std::vector<double> probs;
};

// Modal-class probabilities. Writing theta ~ Dir(alpha) through independent
// X_c ~ Gamma(alpha_c, 1) reduces each coordinate to the one-dimensional
// integral of the Gamma density against the product of the other Gamma CDFs,
// evaluated adaptively to an absolute accuracy well under 1e-6.
ClassPosterior top_class_probs(const DirichletState& s);

// One-step reward of labeling this instance, collapsed per `mode` over the
// C possible outcomes. Outcome c has probability alpha_c / sum(alpha) and
// reward max_c' I_c'(alpha + delta_c) - max_c' I_c'(alpha).
double multiclass_reward(const DirichletState& s, const RiskMode& mode);

// Assign each instance to its most probable class, ties toward the smaller
// class index; the result is a partition of {0..K-1} into C sets.
std::vector<std::vector<std::size_t>> multiclass_aggregate(
    const std::vector<DirichletState>& states);

// Labels are drawn from hidden per-instance categorical distributions.
struct SyntheticMulticlassEnv {
  std::vector<std::vector<double>> theta;  // K rows, each C non-negative, sums to 1
};

using MulticlassEnvironment = std::variant<SyntheticMulticlassEnv, ReplayEnv>;

struct MulticlassTrace {
  std::vector<LabelOutcome> outcomes;  // label holds the class in 0..C-1
  std::vector<DirichletState> final_states;
  std::vector<std::size_t> assignment;  // class per instance
  double accuracy = 0.0;
  std::vector<std::uint64_t> label_counts;
  bool exhausted = false;
};

MulticlassTrace run_multiclass_episode(MulticlassEnvironment env, const PolicySpec& policy,
                                       std::uint64_t budget,
                                       std::vector<DirichletState> states,
                                       std::uint64_t seed);

}  // namespace crowdkg
