#pragma once

#include <cstdint>
#include <vector>

#include "crowdkg/beta_core.hpp"
#include "crowdkg/binary_mdp.hpp"
#include "crowdkg/policies.hpp"
#include "crowdkg/rng.hpp"

namespace crowdkg {

// Pseudo-count pair (c, d) for one worker's reliability posterior
// Beta(c, d): the probability the worker reports what a fully reliable
// one would.
struct WorkerState {
  double c = 4.0;
  double d = 1.0;

  bool valid() const { return c > 0.0 && d > 0.0 && std::isfinite(c) && std::isfinite(d); }
};

struct PairAction {
  std::size_t instance = 0;
  std::size_t worker = 0;
};

// Beta approximations of the coupled instance/worker posterior after one
// label, chosen to match the exact marginal first and second moments.
struct MatchedUpdate {
  BetaState instance_post;
  WorkerState worker_post;
  bool variance_clamped = false;  // a matched variance hit the 1e-12 floor
};

// Pr(z = +1) under the one-coin likelihood with both parameters integrated
// out: (a c + b d) / ((a + b)(c + d)).
double label_prob_pos(const BetaState& inst, const WorkerState& worker);

// Moment-matched posterior for observing label z from this pair.
MatchedUpdate moment_match_update(const BetaState& inst, const WorkerState& worker, int z);

// Confidence change of the *instance* for each label outcome, after the
// moment-matched update.
RewardPair hetero_reward_pair(const BetaState& inst, const WorkerState& worker);

// Collapse a pair's two-point reward distribution per `mode`, weighting by
// the marginal label probabilities.
double scored_pair_reward(const BetaState& inst, const WorkerState& worker,
                          const RiskMode& mode);

// Argmax of max(r_pos, r_neg) over allowed pairs, ties broken toward the
// lexicographically smallest (instance, worker). `allowed` is a row-major
// K x M mask; null means every pair.
PairAction select_pair_optkg(const std::vector<BetaState>& instances,
                             const std::vector<WorkerState>& workers,
                             const std::vector<char>* allowed = nullptr);

// Labels come from hidden soft-labels theta and worker reliabilities rho.
struct SyntheticHeteroEnv {
  std::vector<double> theta;
  std::vector<double> rho;
};

using HeteroEnvironment = std::variant<SyntheticHeteroEnv, ReplayEnv>;

struct HeteroTrace {
  std::vector<LabelOutcome> outcomes;
  std::vector<BetaState> final_instances;
  std::vector<WorkerState> final_workers;
  std::vector<std::size_t> positive_set;
  double accuracy = 0.0;
  std::vector<std::uint64_t> instance_counts;
  std::vector<std::uint64_t> worker_counts;
  bool exhausted = false;
};

// Worker-aware episode: select a pair, draw its label, moment-match both
// posteriors. Policies are the index rules and uniform; exact DP is not
// defined for the pair process.
HeteroTrace run_hetero_episode(HeteroEnvironment env, const PolicySpec& policy,
                               std::uint64_t budget, std::vector<BetaState> instances,
                               std::vector<WorkerState> workers, std::uint64_t seed);

}  // namespace crowdkg
