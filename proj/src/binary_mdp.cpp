#include "crowdkg/binary_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "crowdkg/errors.hpp"
#include "crowdkg/policies.hpp"

namespace crowdkg {

StateMatrix StateMatrix::from_prior(std::size_t k, BetaState prior) {
  if (k == 0) throw validation_error("state matrix needs at least one instance");
  if (!prior.valid()) throw validation_error("invalid prior pseudo-counts");
  StateMatrix s;
  s.instances.assign(k, prior);
  s.priors = s.instances;
  return s;
}

StateMatrix StateMatrix::from_states(std::vector<BetaState> states) {
  if (states.empty()) throw validation_error("state matrix needs at least one instance");
  for (const auto& st : states) {
    if (!st.valid()) throw validation_error("invalid state pseudo-counts");
  }
  StateMatrix s;
  s.instances = std::move(states);
  s.priors = s.instances;
  return s;
}

void apply_label(StateMatrix& s, std::size_t i, int label) {
  if (i >= s.instances.size()) throw validation_error("instance index out of range");
  if (label == 1) {
    s.instances[i].a += 1.0;
  } else if (label == -1) {
    s.instances[i].b += 1.0;
  } else {
    throw validation_error("binary label must be +1 or -1");
  }
  s.spent += 1;
}

StateMatrix update_state(StateMatrix s, std::size_t i, int label) {
  apply_label(s, i, label);
  return s;
}

std::vector<std::size_t> aggregate(const StateMatrix& s) {
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < s.instances.size(); ++i) {
    if (s.instances[i].a >= s.instances[i].b) positive.push_back(i);
  }
  return positive;
}

double accuracy(const std::vector<std::size_t>& predicted,
                const std::vector<std::size_t>& truth, std::size_t k) {
  if (k == 0) throw validation_error("accuracy over zero instances");
  std::vector<char> in_pred(k, 0);
  std::vector<char> in_truth(k, 0);
  for (const std::size_t i : predicted) {
    if (i >= k) throw validation_error("predicted index out of range");
    in_pred[i] = 1;
  }
  for (const std::size_t i : truth) {
    if (i >= k) throw validation_error("truth index out of range");
    in_truth[i] = 1;
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (in_pred[i] == in_truth[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

double expected_accuracy(const StateMatrix& s) {
  double sum = 0.0;
  for (const auto& st : s.instances) sum += confidence(positive_tail(st));
  return sum;
}

namespace {

int take_from_pool(std::vector<int>& pool, Rng& rng) {
  const std::size_t pick = rng.next_index(pool.size());
  const int label = pool[pick];
  pool[pick] = pool.back();
  pool.pop_back();
  return label;
}

}  // namespace

int draw_label(Environment& env, std::size_t i, Rng& rng) {
  if (auto* syn = std::get_if<SyntheticEnv>(&env)) {
    if (i >= syn->theta.size()) throw validation_error("instance index out of range");
    return rng.bernoulli(syn->theta[i]) ? 1 : -1;
  }
  auto& rep = std::get<ReplayEnv>(env);
  if (rep.granularity != ReplayEnv::Granularity::PerInstance) {
    throw validation_error("per-pair replay pools require worker-directed draws");
  }
  if (i >= rep.instance_pools.size()) throw validation_error("instance index out of range");
  auto& pool = rep.instance_pools[i];
  if (pool.empty()) {
    throw exhausted_error("replay pool for instance " + std::to_string(i) + " is empty");
  }
  return take_from_pool(pool, rng);
}

int draw_pair_label(Environment& env, std::size_t i, std::size_t j, Rng& rng) {
  if (auto* syn = std::get_if<SyntheticEnv>(&env)) {
    (void)j;  // homogeneous synthetic labels ignore the worker
    if (i >= syn->theta.size()) throw validation_error("instance index out of range");
    return rng.bernoulli(syn->theta[i]) ? 1 : -1;
  }
  return draw_pair_label(std::get<ReplayEnv>(env), i, j, rng);
}

int draw_pair_label(ReplayEnv& rep, std::size_t i, std::size_t j, Rng& rng) {
  if (rep.granularity != ReplayEnv::Granularity::PerPair) {
    throw validation_error("per-instance replay pools have no worker identity");
  }
  const auto it = rep.pair_pools.find({i, j});
  if (it == rep.pair_pools.end() || it->second.empty()) {
    throw exhausted_error("replay pool for pair (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") is empty");
  }
  return take_from_pool(it->second, rng);
}

namespace {

std::vector<std::size_t> synthetic_truth(const SyntheticEnv& env) {
  std::vector<std::size_t> truth;
  for (std::size_t i = 0; i < env.theta.size(); ++i) {
    if (env.theta[i] >= 0.5) truth.push_back(i);
  }
  return truth;
}

// Score cache for index policies: only the instance that just received a
// label needs rescoring, which keeps an episode at O(K) per stage.
struct IndexScore {
  RiskMode mode;
  std::vector<double> scores;

  IndexScore(const StateMatrix& s, RiskMode m) : mode(m) {
    scores.reserve(s.size());
    for (const auto& st : s.instances) scores.push_back(scored_reward(st, mode));
  }

  void refresh(const StateMatrix& s, std::size_t i) {
    scores[i] = scored_reward(s.instances[i], mode);
  }
};

}  // namespace

RunTrace run_episode(Environment env, const PolicySpec& policy, std::uint64_t budget,
                     StateMatrix initial, std::uint64_t seed) {
  if (!policy.valid()) throw validation_error("invalid policy spec");
  const std::size_t k = initial.size();
  if (auto* syn = std::get_if<SyntheticEnv>(&env)) {
    if (syn->theta.size() != k) {
      throw validation_error("environment and state matrix disagree on instance count");
    }
    for (const double t : syn->theta) {
      if (!(t >= 0.0) || !(t <= 1.0)) throw validation_error("theta outside [0,1]");
    }
  } else {
    const auto& rep = std::get<ReplayEnv>(env);
    if (rep.num_instances != k) {
      throw validation_error("environment and state matrix disagree on instance count");
    }
  }

  Rng label_rng(seed);
  Rng policy_rng(Rng::mix(seed));

  RunTrace trace;
  trace.label_counts.assign(k, 0);

  const bool replay = std::holds_alternative<ReplayEnv>(env);
  std::vector<char> allowed(k, 1);
  std::size_t allowed_count = k;
  if (replay) {
    const auto& rep = std::get<ReplayEnv>(env);
    for (std::size_t i = 0; i < k; ++i) {
      if (rep.instance_pools[i].empty()) {
        allowed[i] = 0;
        --allowed_count;
      }
    }
  }

  std::optional<IndexScore> cache;
  if (policy.is_index_policy()) cache.emplace(initial, policy.risk_mode());

  StateMatrix state = std::move(initial);
  for (std::uint64_t t = 0; t < budget; ++t) {
    if (allowed_count == 0) {
      trace.exhausted = true;
      break;
    }
    std::size_t pick;
    if (cache) {
      pick = argmax_with_ties(cache->scores, &allowed, policy.tie, &policy_rng);
    } else if (policy.rule == PolicySpec::Rule::Uniform) {
      std::size_t n = policy_rng.next_index(allowed_count);
      pick = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (allowed[i] && n-- == 0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = select_action(policy, state, budget - t, policy_rng, &allowed);
    }

    const int label = draw_label(env, pick, label_rng);
    apply_label(state, pick, label);
    trace.outcomes.push_back({pick, -1, label, t});
    trace.label_counts[pick] += 1;
    if (cache) cache->refresh(state, pick);
    if (replay && std::get<ReplayEnv>(env).instance_pools[pick].empty()) {
      allowed[pick] = 0;
      --allowed_count;
    }
  }

  trace.positive_set = aggregate(state);
  if (const auto* syn = std::get_if<SyntheticEnv>(&env)) {
    trace.accuracy = accuracy(trace.positive_set, synthetic_truth(*syn), k);
  } else {
    const auto& rep = std::get<ReplayEnv>(env);
    std::vector<char> positive(k, 0);
    for (const std::size_t i : trace.positive_set) positive[i] = 1;
    std::size_t covered = 0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (!rep.true_labels[i].has_value()) continue;
      ++covered;
      const bool truly_positive = *rep.true_labels[i] == 1;
      if (truly_positive == static_cast<bool>(positive[i])) ++hits;
    }
    trace.accuracy = covered == 0 ? std::numeric_limits<double>::quiet_NaN()
                                  : static_cast<double>(hits) / static_cast<double>(covered);
  }
  trace.final_state = std::move(state);
  return trace;
}

}  // namespace crowdkg
