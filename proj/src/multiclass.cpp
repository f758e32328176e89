#include "crowdkg/multiclass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "crowdkg/errors.hpp"
#include "crowdkg/special.hpp"

namespace crowdkg {

bool DirichletState::valid() const {
  if (alpha.size() < 2) return false;
  for (const double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) return false;
  }
  return true;
}

namespace {

void require_valid(const DirichletState& s) {
  if (!s.valid()) {
    throw validation_error("Dirichlet state needs >= 2 positive finite pseudo-counts");
  }
}

double modal_integral(const std::vector<double>& alpha, std::size_t c) {
  const double ac = alpha[c];
  const double lg = std::lgamma(ac);
  const double hi = special::gamma_quantile(ac, 1.0 - 1e-10);
  const auto integrand = [&](double x) {
    if (!(x > 0.0)) return 0.0;
    double v = std::exp((ac - 1.0) * std::log(x) - x - lg);
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      if (k == c) continue;
      v *= special::reg_lower_gamma(alpha[k], x);
      if (v == 0.0) break;
    }
    return v;
  };
  // Near zero the integrand behaves like x^(S-1) with S the total pseudo-count
  // mass, which for S < 2 is a cusp the quadrature cannot resolve at the
  // endpoint. Substituting x = u^m with m >= 2/S lifts the transformed
  // exponent to at least 1.
  double total = 0.0;
  for (const double a : alpha) total += a;
  const int m = total >= 2.0 ? 1 : static_cast<int>(std::ceil(2.0 / total));
  double raw;
  if (m == 1) {
    raw = special::integrate(integrand, 0.0, hi, 1e-10);
  } else {
    const auto substituted = [&](double u) {
      return integrand(std::pow(u, m)) * m * std::pow(u, m - 1);
    };
    raw = special::integrate(substituted, 0.0, std::pow(hi, 1.0 / m), 1e-10);
  }
  return std::clamp(raw, 0.0, 1.0);
}

}  // namespace

ClassPosterior top_class_probs(const DirichletState& s) {
  require_valid(s);
  ClassPosterior post;
  post.probs.reserve(s.alpha.size());
  for (std::size_t c = 0; c < s.alpha.size(); ++c) {
    post.probs.push_back(modal_integral(s.alpha, c));
  }
  return post;
}

double multiclass_reward(const DirichletState& s, const RiskMode& mode) {
  require_valid(s);
  if (!mode.valid()) throw validation_error("CVaR alpha must lie in (0,1]");
  const std::size_t c_count = s.alpha.size();

  const ClassPosterior now = top_class_probs(s);
  const double h_now = *std::max_element(now.probs.begin(), now.probs.end());

  double total = 0.0;
  for (const double a : s.alpha) total += a;

  std::vector<double> rewards(c_count);
  std::vector<double> probs(c_count);
  DirichletState child = s;
  for (std::size_t c = 0; c < c_count; ++c) {
    child.alpha[c] += 1.0;
    const ClassPosterior next = top_class_probs(child);
    child.alpha[c] -= 1.0;
    rewards[c] = *std::max_element(next.probs.begin(), next.probs.end()) - h_now;
    probs[c] = s.alpha[c] / total;
  }

  switch (mode.kind) {
    case RiskMode::Kind::Expected: {
      double v = 0.0;
      for (std::size_t c = 0; c < c_count; ++c) v += probs[c] * rewards[c];
      return v;
    }
    case RiskMode::Kind::Optimistic:
      return *std::max_element(rewards.begin(), rewards.end());
    case RiskMode::Kind::Pessimistic:
      return *std::min_element(rewards.begin(), rewards.end());
    case RiskMode::Kind::CVaR:
      return cvar_discrete(rewards, probs, mode.alpha);
  }
  throw validation_error("unknown risk mode");
}

namespace {

std::size_t argmax_class(const std::vector<double>& probs) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < probs.size(); ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return best;
}

}  // namespace

std::vector<std::vector<std::size_t>> multiclass_aggregate(
    const std::vector<DirichletState>& states) {
  if (states.empty()) throw validation_error("no instances to aggregate");
  const std::size_t c_count = states.front().num_classes();
  std::vector<std::vector<std::size_t>> partition(c_count);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].num_classes() != c_count) {
      throw validation_error("instances disagree on the class count");
    }
    partition[argmax_class(top_class_probs(states[i]).probs)].push_back(i);
  }
  return partition;
}

namespace {

// Per-episode memo: states only ever gain counts, but each state is scored
// once as itself and up to C times as some parent's child.
struct EpisodeCache {
  RiskMode mode;
  std::map<std::vector<double>, double> h_top;  // max_c I_c(alpha)
  std::map<std::vector<double>, double> score;

  double top(const DirichletState& s) {
    if (const auto it = h_top.find(s.alpha); it != h_top.end()) return it->second;
    const ClassPosterior p = top_class_probs(s);
    const double h = *std::max_element(p.probs.begin(), p.probs.end());
    h_top.emplace(s.alpha, h);
    return h;
  }

  double score_of(const DirichletState& s) {
    if (const auto it = score.find(s.alpha); it != score.end()) return it->second;
    double total = 0.0;
    for (const double a : s.alpha) total += a;
    const double h_now = top(s);
    const std::size_t c_count = s.alpha.size();
    std::vector<double> rewards(c_count), probs(c_count);
    DirichletState child = s;
    for (std::size_t c = 0; c < c_count; ++c) {
      child.alpha[c] += 1.0;
      rewards[c] = top(child) - h_now;
      child.alpha[c] -= 1.0;
      probs[c] = s.alpha[c] / total;
    }
    double v;
    switch (mode.kind) {
      case RiskMode::Kind::Expected: {
        v = 0.0;
        for (std::size_t c = 0; c < c_count; ++c) v += probs[c] * rewards[c];
        break;
      }
      case RiskMode::Kind::Optimistic:
        v = *std::max_element(rewards.begin(), rewards.end());
        break;
      case RiskMode::Kind::Pessimistic:
        v = *std::min_element(rewards.begin(), rewards.end());
        break;
      case RiskMode::Kind::CVaR:
        v = cvar_discrete(rewards, probs, mode.alpha);
        break;
      default:
        throw validation_error("unknown risk mode");
    }
    score.emplace(s.alpha, v);
    return v;
  }
};

std::size_t truth_class(const std::vector<double>& theta) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < theta.size(); ++c) {
    if (theta[c] > theta[best]) best = c;
  }
  return best;
}

}  // namespace

MulticlassTrace run_multiclass_episode(MulticlassEnvironment env, const PolicySpec& policy,
                                       std::uint64_t budget,
                                       std::vector<DirichletState> states,
                                       std::uint64_t seed) {
  if (!policy.valid()) throw validation_error("invalid policy spec");
  if (policy.rule == PolicySpec::Rule::DPExact) {
    throw validation_error("exact DP is not wired up for the multi-class process");
  }
  const std::size_t k = states.size();
  if (k == 0) throw validation_error("need at least one instance");
  const std::size_t c_count = states.front().num_classes();
  for (const auto& s : states) {
    if (!s.valid() || s.num_classes() != c_count) {
      throw validation_error("invalid or inconsistent Dirichlet states");
    }
  }

  if (const auto* syn = std::get_if<SyntheticMulticlassEnv>(&env)) {
    if (syn->theta.size() != k) throw validation_error("environment size mismatch");
    for (const auto& row : syn->theta) {
      if (row.size() != c_count) throw validation_error("theta row has wrong class count");
      double sum = 0.0;
      for (const double p : row) {
        if (!(p >= 0.0)) throw validation_error("negative class probability");
        sum += p;
      }
      if (std::fabs(sum - 1.0) > 1e-9) {
        throw validation_error("class probabilities must sum to 1");
      }
    }
  } else {
    const auto& rep = std::get<ReplayEnv>(env);
    if (rep.num_instances != k) throw validation_error("environment size mismatch");
  }

  Rng label_rng(seed);
  Rng policy_rng(Rng::mix(seed));

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

  const bool indexed = policy.is_index_policy();
  EpisodeCache cache{indexed ? policy.risk_mode() : RiskMode::expected(), {}, {}};
  std::vector<double> scores;
  if (indexed) {
    scores.resize(k);
    for (std::size_t i = 0; i < k; ++i) scores[i] = cache.score_of(states[i]);
  }

  MulticlassTrace trace;
  trace.label_counts.assign(k, 0);

  for (std::uint64_t t = 0; t < budget; ++t) {
    if (allowed_count == 0) {
      trace.exhausted = true;
      break;
    }
    std::size_t pick = 0;
    if (indexed) {
      pick = argmax_with_ties(scores, &allowed, policy.tie, &policy_rng);
    } else {
      std::size_t n = policy_rng.next_index(allowed_count);
      for (std::size_t i = 0; i < k; ++i) {
        if (allowed[i] && n-- == 0) {
          pick = i;
          break;
        }
      }
    }

    int label;
    if (auto* syn = std::get_if<SyntheticMulticlassEnv>(&env)) {
      const double u = label_rng.next_double();
      double acc = 0.0;
      std::size_t chosen = c_count - 1;
      for (std::size_t c = 0; c < c_count; ++c) {
        acc += syn->theta[pick][c];
        if (u < acc) {
          chosen = c;
          break;
        }
      }
      label = static_cast<int>(chosen);
    } else {
      auto& rep = std::get<ReplayEnv>(env);
      auto& pool = rep.instance_pools[pick];
      const std::size_t at = label_rng.next_index(pool.size());
      label = pool[at];
      pool[at] = pool.back();
      pool.pop_back();
      if (pool.empty()) {
        allowed[pick] = 0;
        --allowed_count;
      }
    }
    if (label < 0 || static_cast<std::size_t>(label) >= c_count) {
      throw validation_error("class label outside 0..C-1");
    }

    states[pick].alpha[static_cast<std::size_t>(label)] += 1.0;
    trace.outcomes.push_back({pick, -1, label, t});
    trace.label_counts[pick] += 1;
    if (indexed) scores[pick] = cache.score_of(states[pick]);
  }

  trace.assignment.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    trace.assignment[i] = argmax_class(top_class_probs(states[i]).probs);
  }

  if (const auto* syn = std::get_if<SyntheticMulticlassEnv>(&env)) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (trace.assignment[i] == truth_class(syn->theta[i])) ++hits;
    }
    trace.accuracy = static_cast<double>(hits) / static_cast<double>(k);
  } else {
    const auto& rep = std::get<ReplayEnv>(env);
    std::size_t covered = 0, hits = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (!rep.true_labels[i].has_value()) continue;
      ++covered;
      if (trace.assignment[i] == static_cast<std::size_t>(*rep.true_labels[i])) ++hits;
    }
    trace.accuracy = covered == 0 ? std::numeric_limits<double>::quiet_NaN()
                                  : static_cast<double>(hits) / static_cast<double>(covered);
  }
  trace.final_states = std::move(states);
  return trace;
}

}  // namespace crowdkg
