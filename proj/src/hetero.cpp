#include "crowdkg/hetero.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "crowdkg/errors.hpp"

namespace crowdkg {

namespace {

void require_valid(const BetaState& inst, const WorkerState& worker) {
  if (!inst.valid()) throw validation_error("invalid instance pseudo-counts");
  if (!worker.valid()) throw validation_error("invalid worker pseudo-counts");
}

constexpr double kVarianceFloor = 1e-12;

// First and second marginal posterior moments of one coordinate given the
// observed label; the other coordinate has been integrated out.
struct Moments {
  double m1 = 0.0;
  double m2 = 0.0;
};

Moments instance_moments(const BetaState& s, const WorkerState& w, int z) {
  const double a = s.a, b = s.b, c = w.c, d = w.d;
  if (z == 1) {
    const double norm = a * c + b * d;
    return {a * ((a + 1.0) * c + b * d) / ((a + b + 1.0) * norm),
            a * (a + 1.0) * ((a + 2.0) * c + b * d) /
                ((a + b + 1.0) * (a + b + 2.0) * norm)};
  }
  const double norm = b * c + a * d;
  return {a * (b * c + (a + 1.0) * d) / ((a + b + 1.0) * norm),
          a * (a + 1.0) * (b * c + (a + 2.0) * d) /
              ((a + b + 1.0) * (a + b + 2.0) * norm)};
}

Moments worker_moments(const BetaState& s, const WorkerState& w, int z) {
  const double a = s.a, b = s.b, c = w.c, d = w.d;
  if (z == 1) {
    const double norm = a * c + b * d;
    return {c * (a * (c + 1.0) + b * d) / ((c + d + 1.0) * norm),
            c * (c + 1.0) * (a * (c + 2.0) + b * d) /
                ((c + d + 1.0) * (c + d + 2.0) * norm)};
  }
  const double norm = b * c + a * d;
  return {c * (b * (c + 1.0) + a * d) / ((c + d + 1.0) * norm),
          c * (c + 1.0) * (b * (c + 2.0) + a * d) /
              ((c + d + 1.0) * (c + d + 2.0) * norm)};
}

// Beta(a~, b~) sharing the given first two moments.
std::pair<double, double> match_beta(const Moments& m, bool* clamped) {
  double var = m.m2 - m.m1 * m.m1;
  if (var <= kVarianceFloor) {
    var = kVarianceFloor;
    *clamped = true;
  }
  const double scale = (m.m1 - m.m2) / var;
  return {m.m1 * scale, (1.0 - m.m1) * scale};
}

}  // namespace

double label_prob_pos(const BetaState& inst, const WorkerState& worker) {
  require_valid(inst, worker);
  return (inst.a * worker.c + inst.b * worker.d) /
         ((inst.a + inst.b) * (worker.c + worker.d));
}

MatchedUpdate moment_match_update(const BetaState& inst, const WorkerState& worker, int z) {
  require_valid(inst, worker);
  if (z != 1 && z != -1) throw validation_error("label must be +1 or -1");

  MatchedUpdate out;
  const auto [ta, tb] = match_beta(instance_moments(inst, worker, z), &out.variance_clamped);
  const auto [tc, td] = match_beta(worker_moments(inst, worker, z), &out.variance_clamped);
  out.instance_post = {ta, tb};
  out.worker_post = {tc, td};
  if (!out.instance_post.valid() || !out.worker_post.valid()) {
    throw numeric_error("moment matching produced a degenerate posterior");
  }
  return out;
}

RewardPair hetero_reward_pair(const BetaState& inst, const WorkerState& worker) {
  const double h_now = confidence(positive_tail(inst));
  const auto pos = moment_match_update(inst, worker, 1);
  const auto neg = moment_match_update(inst, worker, -1);
  return {confidence(positive_tail(pos.instance_post)) - h_now,
          confidence(positive_tail(neg.instance_post)) - h_now};
}

double scored_pair_reward(const BetaState& inst, const WorkerState& worker,
                          const RiskMode& mode) {
  if (!mode.valid()) throw validation_error("CVaR alpha must lie in (0,1]");
  const RewardPair r = hetero_reward_pair(inst, worker);
  const double p_pos = label_prob_pos(inst, worker);
  const double p_neg = 1.0 - p_pos;
  switch (mode.kind) {
    case RiskMode::Kind::Expected:
      return p_pos * r.r_pos + p_neg * r.r_neg;
    case RiskMode::Kind::Optimistic:
      return std::max(r.r_pos, r.r_neg);
    case RiskMode::Kind::Pessimistic:
      return std::min(r.r_pos, r.r_neg);
    case RiskMode::Kind::CVaR: {
      const double values[] = {r.r_pos, r.r_neg};
      const double probs[] = {p_pos, p_neg};
      return cvar_discrete(values, probs, mode.alpha);
    }
  }
  throw validation_error("unknown risk mode");
}

namespace {

PairAction argmax_pairs(const std::vector<double>& scores, std::size_t m,
                        const std::vector<char>* allowed, TieBreak tie, Rng* rng) {
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t p = 0; p < scores.size(); ++p) {
    if (allowed && !(*allowed)[p]) continue;
    any = true;
    if (scores[p] > best) best = scores[p];
  }
  if (!any) throw exhausted_error("no labelable (instance, worker) pair remains");
  const double cut = best - kScoreTieTolerance;
  if (tie == TieBreak::Deterministic) {
    for (std::size_t p = 0; p < scores.size(); ++p) {
      if ((!allowed || (*allowed)[p]) && scores[p] >= cut) return {p / m, p % m};
    }
  }
  std::size_t tied = 0;
  for (std::size_t p = 0; p < scores.size(); ++p) {
    if ((!allowed || (*allowed)[p]) && scores[p] >= cut) ++tied;
  }
  std::size_t n = rng->next_index(tied);
  for (std::size_t p = 0; p < scores.size(); ++p) {
    if ((!allowed || (*allowed)[p]) && scores[p] >= cut && n-- == 0) return {p / m, p % m};
  }
  throw numeric_error("pair argmax internal inconsistency");
}

}  // namespace

PairAction select_pair_optkg(const std::vector<BetaState>& instances,
                             const std::vector<WorkerState>& workers,
                             const std::vector<char>* allowed) {
  const std::size_t k = instances.size();
  const std::size_t m = workers.size();
  if (k == 0 || m == 0) throw validation_error("need at least one instance and one worker");
  std::vector<double> scores(k * m, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t p = i * m + j;
      if (allowed && !(*allowed)[p]) continue;
      scores[p] = scored_pair_reward(instances[i], workers[j], RiskMode::optimistic());
    }
  }
  return argmax_pairs(scores, m, allowed, TieBreak::Deterministic, nullptr);
}

HeteroTrace run_hetero_episode(HeteroEnvironment env, const PolicySpec& policy,
                               std::uint64_t budget, std::vector<BetaState> instances,
                               std::vector<WorkerState> workers, std::uint64_t seed) {
  if (!policy.valid()) throw validation_error("invalid policy spec");
  if (policy.rule == PolicySpec::Rule::DPExact) {
    throw validation_error("exact DP is not defined for the pair process");
  }
  const std::size_t k = instances.size();
  const std::size_t m = workers.size();
  if (k == 0 || m == 0) throw validation_error("need at least one instance and one worker");

  if (const auto* syn = std::get_if<SyntheticHeteroEnv>(&env)) {
    if (syn->theta.size() != k || syn->rho.size() != m) {
      throw validation_error("environment size mismatch");
    }
  } else {
    const auto& rep = std::get<ReplayEnv>(env);
    if (rep.num_instances != k || rep.num_workers != m) {
      throw validation_error("environment size mismatch");
    }
    if (rep.granularity != ReplayEnv::Granularity::PerPair) {
      throw validation_error("heterogeneous replay requires per-pair pools");
    }
  }

  Rng label_rng(seed);
  Rng policy_rng(Rng::mix(seed));

  const bool replay = std::holds_alternative<ReplayEnv>(env);
  std::vector<char> allowed(k * m, 1);
  std::size_t allowed_count = k * m;
  if (replay) {
    const auto& rep = std::get<ReplayEnv>(env);
    std::fill(allowed.begin(), allowed.end(), 0);
    allowed_count = 0;
    for (const auto& [pair, pool] : rep.pair_pools) {
      if (!pool.empty()) {
        allowed[pair.first * m + pair.second] = 1;
        ++allowed_count;
      }
    }
  }

  const bool indexed = policy.is_index_policy();
  const RiskMode mode = indexed ? policy.risk_mode() : RiskMode::expected();
  std::vector<double> scores;
  if (indexed) {
    scores.assign(k * m, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (allowed[i * m + j]) {
          scores[i * m + j] = scored_pair_reward(instances[i], workers[j], mode);
        }
      }
    }
  }

  HeteroTrace trace;
  trace.instance_counts.assign(k, 0);
  trace.worker_counts.assign(m, 0);

  for (std::uint64_t t = 0; t < budget; ++t) {
    if (allowed_count == 0) {
      trace.exhausted = true;
      break;
    }
    PairAction act;
    if (indexed) {
      act = argmax_pairs(scores, m, &allowed, policy.tie, &policy_rng);
    } else {
      std::size_t n = policy_rng.next_index(allowed_count);
      std::size_t flat = 0;
      for (std::size_t p = 0; p < k * m; ++p) {
        if (allowed[p] && n-- == 0) {
          flat = p;
          break;
        }
      }
      act = {flat / m, flat % m};
    }

    int label;
    if (auto* syn = std::get_if<SyntheticHeteroEnv>(&env)) {
      const int reliable = label_rng.bernoulli(syn->theta[act.instance]) ? 1 : -1;
      label = label_rng.bernoulli(syn->rho[act.worker]) ? reliable : -reliable;
    } else {
      auto& rep = std::get<ReplayEnv>(env);
      label = draw_pair_label(rep, act.instance, act.worker, label_rng);
      const auto it = rep.pair_pools.find({act.instance, act.worker});
      if (it == rep.pair_pools.end() || it->second.empty()) {
        allowed[act.instance * m + act.worker] = 0;
        --allowed_count;
      }
    }

    const auto update = moment_match_update(instances[act.instance], workers[act.worker], label);
    instances[act.instance] = update.instance_post;
    workers[act.worker] = update.worker_post;

    trace.outcomes.push_back(
        {act.instance, static_cast<std::int64_t>(act.worker), label, t});
    trace.instance_counts[act.instance] += 1;
    trace.worker_counts[act.worker] += 1;

    if (indexed) {
      for (std::size_t j = 0; j < m; ++j) {
        if (allowed[act.instance * m + j]) {
          scores[act.instance * m + j] =
              scored_pair_reward(instances[act.instance], workers[j], mode);
        }
      }
      for (std::size_t i = 0; i < k; ++i) {
        if (allowed[i * m + act.worker]) {
          scores[i * m + act.worker] =
              scored_pair_reward(instances[i], workers[act.worker], mode);
        }
      }
    }
  }

  for (std::size_t i = 0; i < k; ++i) {
    if (instances[i].a >= instances[i].b) trace.positive_set.push_back(i);
  }

  if (const auto* syn = std::get_if<SyntheticHeteroEnv>(&env)) {
    std::vector<std::size_t> truth;
    for (std::size_t i = 0; i < k; ++i) {
      if (syn->theta[i] >= 0.5) truth.push_back(i);
    }
    trace.accuracy = accuracy(trace.positive_set, truth, k);
  } else {
    const auto& rep = std::get<ReplayEnv>(env);
    std::vector<char> positive(k, 0);
    for (const std::size_t i : trace.positive_set) positive[i] = 1;
    std::size_t covered = 0, hits = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (!rep.true_labels[i].has_value()) continue;
      ++covered;
      if ((*rep.true_labels[i] == 1) == static_cast<bool>(positive[i])) ++hits;
    }
    trace.accuracy = covered == 0 ? std::numeric_limits<double>::quiet_NaN()
                                  : static_cast<double>(hits) / static_cast<double>(covered);
  }
  trace.final_instances = std::move(instances);
  trace.final_workers = std::move(workers);
  return trace;
}

}  // namespace crowdkg
