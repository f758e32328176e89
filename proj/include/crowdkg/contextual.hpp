#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "crowdkg/binary_mdp.hpp"
#include "crowdkg/linalg.hpp"
#include "crowdkg/policies.hpp"

namespace crowdkg {

// Gaussian belief over the weights of a logistic soft-label model
// theta_i = sigmoid(<w, x_i>).
struct GaussianBelief {
  Vec mean;
  Mat cov;

  static GaussianBelief standard(std::size_t dim);  // N(0, I)
  bool valid() const;
  std::size_t dim() const { return mean.size(); }
};

struct FeatureSet {
  std::vector<Vec> vectors;

  std::size_t size() const { return vectors.size(); }
  std::size_t dim() const { return vectors.empty() ? 0 : vectors.front().size(); }
};

// One Bayesian logistic-regression step: the new mean is the MAP weight
// vector (Newton with step halving, gradient norm <= 1e-8), and the
// covariance is the rank-one Sherman-Morrison downdate of the prior
// covariance with weight sigma(m'x)(1 - sigma(m'x)) at the new mean.
GaussianBelief laplace_update(const GaussianBelief& belief, const Vec& x, int y);

// Pr(next label = +1): sigmoid(mu_x * kappa(s2)) with kappa(s2) =
// 1/sqrt(1 + pi s2 / 8), mu_x = <mean, x>, s2 = x' cov x.
double predict_label_prob(const GaussianBelief& belief, const Vec& x);

// Pr(theta_i >= 1/2) = Pr(<w, x> >= 0) = 1 - Phi(-mu_x / s). A degenerate
// s = 0 collapses to the indicator of mu_x >= 0.
double positive_prob(const GaussianBelief& belief, const Vec& x);

// One-step change in the confidence sum over *all* instances when labeling
// `candidate`: the shared weight vector moves every instance's positive
// probability, so the full sum has to be recomputed for both label
// outcomes. Returns (expected, optimistic).
std::pair<double, double> contextual_reward(const GaussianBelief& belief,
                                            std::size_t candidate,
                                            const FeatureSet& features);

struct SyntheticContextualEnv {
  std::vector<double> theta;  // sigmoid(<w*, x_i>) for the hidden w*
};

using ContextualEnvironment = std::variant<SyntheticContextualEnv, ReplayEnv>;

struct ContextualTrace {
  std::vector<LabelOutcome> outcomes;
  GaussianBelief final_belief;
  std::vector<std::size_t> positive_set;  // {i : positive_prob >= 1/2}
  double accuracy = 0.0;
  std::vector<std::uint64_t> label_counts;
  bool exhausted = false;
};

ContextualTrace run_contextual_episode(ContextualEnvironment env, const PolicySpec& policy,
                                       std::uint64_t budget, GaussianBelief prior,
                                       const FeatureSet& features, std::uint64_t seed);

}  // namespace crowdkg
