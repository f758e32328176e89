#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "crowdkg/beta_core.hpp"
#include "crowdkg/rng.hpp"

namespace crowdkg {

struct PolicySpec;  // policies.hpp

// Per-instance Beta states plus bookkeeping: the decision-process state
// after `spent` labels.
struct StateMatrix {
  std::vector<BetaState> instances;
  std::vector<BetaState> priors;
  std::uint64_t spent = 0;

  static StateMatrix from_prior(std::size_t k, BetaState prior = {1.0, 1.0});
  static StateMatrix from_states(std::vector<BetaState> states);

  std::size_t size() const { return instances.size(); }
};

struct LabelOutcome {
  std::size_t instance = 0;
  std::int64_t worker = -1;  // -1 when the worker identity is not modeled
  int label = 0;             // +1 / -1 (0..C-1 in multi-class runs)
  std::uint64_t stage = 0;
};

// Labels are generated by hidden per-instance positive rates.
struct SyntheticEnv {
  std::vector<double> theta;
};

// Labels are drawn without replacement from recorded pools. Granularity
// decides whether draws address an instance or an (instance, worker) pair.
struct ReplayEnv {
  enum class Granularity { PerInstance, PerPair };

  Granularity granularity = Granularity::PerInstance;
  std::size_t num_instances = 0;
  std::size_t num_workers = 0;
  std::vector<std::vector<int>> instance_pools;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<int>> pair_pools;
  std::vector<std::optional<int>> true_labels;  // per instance, missing = nullopt
};

using Environment = std::variant<SyntheticEnv, ReplayEnv>;

struct RunTrace {
  std::vector<LabelOutcome> outcomes;
  StateMatrix final_state;
  std::vector<std::size_t> positive_set;
  double accuracy = 0.0;  // NaN when no ground truth is available
  std::vector<std::uint64_t> label_counts;
  bool exhausted = false;  // replay pools ran dry before the budget did
};

// One unit-count posterior update: a_i += 1 on label +1, b_i += 1 on -1.
void apply_label(StateMatrix& s, std::size_t i, int label);
StateMatrix update_state(StateMatrix s, std::size_t i, int label);

// The positive set {i : a_i >= b_i}; ties count as positive.
std::vector<std::size_t> aggregate(const StateMatrix& s);

// (|predicted ∩ truth| + |predicted^c ∩ truth^c|) / k.
double accuracy(const std::vector<std::size_t>& predicted,
                const std::vector<std::size_t>& truth, std::size_t k);

// Sum over instances of h(Pr(theta_i >= 1/2)) -- the conditional expected
// number of correct calls under the current state (not normalized).
double expected_accuracy(const StateMatrix& s);

// One label for instance i. Synthetic: Bernoulli(theta_i). Replay: remove a
// uniformly chosen entry from i's pool; throws exhausted_error when empty.
int draw_label(Environment& env, std::size_t i, Rng& rng);

// Worker-directed draw, for per-pair replay and worker-aware synthetic runs.
int draw_pair_label(Environment& env, std::size_t i, std::size_t j, Rng& rng);
int draw_pair_label(ReplayEnv& env, std::size_t i, std::size_t j, Rng& rng);

// Runs `budget` select/draw/update cycles of `policy` against `env`, then
// aggregates. Stops early (flagging the trace) if replay pools run dry.
// Same inputs and seed give a bit-identical trace.
RunTrace run_episode(Environment env, const PolicySpec& policy, std::uint64_t budget,
                     StateMatrix initial, std::uint64_t seed);

}  // namespace crowdkg
