#include "crowdkg/policies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "crowdkg/errors.hpp"

namespace crowdkg {

PolicySpec PolicySpec::uniform() { return {Rule::Uniform}; }
PolicySpec PolicySpec::kg(TieBreak tie) { return {Rule::KG, tie}; }
PolicySpec PolicySpec::opt_kg(TieBreak tie) { return {Rule::OptKG, tie}; }
PolicySpec PolicySpec::pess_kg() { return {Rule::PessKG}; }

PolicySpec PolicySpec::cvar_kg(double alpha) {
  PolicySpec p{Rule::CVaRKG};
  p.alpha = alpha;
  return p;
}

PolicySpec PolicySpec::dp_exact(std::uint64_t state_cap) {
  PolicySpec p{Rule::DPExact};
  p.state_cap = state_cap;
  return p;
}

bool PolicySpec::is_index_policy() const {
  return rule == Rule::KG || rule == Rule::OptKG || rule == Rule::PessKG ||
         rule == Rule::CVaRKG;
}

RiskMode PolicySpec::risk_mode() const {
  switch (rule) {
    case Rule::KG:
      return RiskMode::expected();
    case Rule::OptKG:
      return RiskMode::optimistic();
    case Rule::PessKG:
      return RiskMode::pessimistic();
    case Rule::CVaRKG:
      return RiskMode::cvar(alpha);
    default:
      throw validation_error("policy has no scoring rule");
  }
}

bool PolicySpec::valid() const {
  if (rule == Rule::CVaRKG && !(alpha > 0.0 && alpha <= 1.0)) return false;
  if (rule == Rule::DPExact && state_cap < 1) return false;
  return true;
}

std::string PolicySpec::label() const {
  switch (rule) {
    case Rule::Uniform:
      return "uniform";
    case Rule::KG:
      return tie == TieBreak::Randomized ? "kg-random" : "kg";
    case Rule::OptKG:
      return tie == TieBreak::Randomized ? "optkg-random" : "optkg";
    case Rule::PessKG:
      return "pesskg";
    case Rule::CVaRKG: {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "cvarkg:%g", alpha);
      return buf;
    }
    case Rule::DPExact:
      return "dp";
  }
  return "?";
}

PolicySpec PolicySpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  const auto need_number = [&](const char* what) {
    try {
      std::size_t used = 0;
      const double v = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
      return v;
    } catch (const std::exception&) {
      throw validation_error(std::string("policy '") + text + "': bad " + what);
    }
  };
  if (head == "uniform") return uniform();
  if (head == "kg") return kg();
  if (head == "kg-random") return kg(TieBreak::Randomized);
  if (head == "optkg") return opt_kg();
  if (head == "optkg-random") return opt_kg(TieBreak::Randomized);
  if (head == "pesskg") return pess_kg();
  if (head == "cvarkg") return cvar_kg(need_number("alpha"));
  if (head == "dp") {
    PolicySpec p = dp_exact(20'000'000);
    if (!arg.empty()) p.state_cap = static_cast<std::uint64_t>(need_number("state cap"));
    return p;
  }
  throw validation_error("unknown policy '" + text + "'");
}

std::size_t argmax_with_ties(std::span<const double> scores,
                             const std::vector<char>* allowed, TieBreak tie, Rng* rng) {
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (allowed && !(*allowed)[i]) continue;
    any = true;
    if (scores[i] > best) best = scores[i];
  }
  if (!any) throw exhausted_error("action set is empty");

  const double cut = best - kScoreTieTolerance;
  if (tie == TieBreak::Deterministic) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if ((!allowed || (*allowed)[i]) && scores[i] >= cut) return i;
    }
  }
  std::size_t tied = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if ((!allowed || (*allowed)[i]) && scores[i] >= cut) ++tied;
  }
  std::size_t n = rng->next_index(tied);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if ((!allowed || (*allowed)[i]) && scores[i] >= cut && n-- == 0) return i;
  }
  throw numeric_error("argmax internal inconsistency");
}

std::size_t select_action(const PolicySpec& policy, const StateMatrix& s,
                          std::uint64_t remaining, Rng& rng,
                          const std::vector<char>* allowed) {
  if (!policy.valid()) throw validation_error("invalid policy spec");
  if (remaining < 1) throw validation_error("no budget remaining");
  const std::size_t k = s.size();

  if (policy.rule == PolicySpec::Rule::Uniform) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < k; ++i) {
      if (!allowed || (*allowed)[i]) pool.push_back(i);
    }
    if (pool.empty()) throw exhausted_error("action set is empty");
    return pool[rng.next_index(pool.size())];
  }

  if (policy.rule == PolicySpec::Rule::DPExact) {
    if (allowed &&
        std::any_of(allowed->begin(), allowed->end(), [](char c) { return !c; })) {
      throw validation_error("exact DP assumes the full action set stays available");
    }
    return dp_solve(s, remaining, policy.state_cap).first_action;
  }

  const RiskMode mode = policy.risk_mode();
  std::vector<double> scores(k, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < k; ++i) {
    if (!allowed || (*allowed)[i]) scores[i] = scored_reward(s.instances[i], mode);
  }
  return argmax_with_ties(scores, allowed, policy.tie, &rng);
}

bool DPKeyLess::operator()(const DPKey& x, const DPKey& y) const {
  if (x.remaining != y.remaining) return x.remaining < y.remaining;
  return std::lexicographical_compare(x.state.begin(), x.state.end(), y.state.begin(),
                                      y.state.end());
}

double dp_state_estimate(std::size_t k, std::uint64_t budget) {
  // States reachable after t labels are the weak compositions of t into 2k
  // cells: C(t + 2k - 1, 2k - 1). Summed over t = 0..budget.
  double total = 0.0;
  for (std::uint64_t t = 0; t <= budget; ++t) {
    double c = 1.0;
    for (std::uint64_t j = 1; j < 2 * k; ++j) {
      c *= static_cast<double>(t + j) / static_cast<double>(j);
      if (c > 1e18) return std::numeric_limits<double>::infinity();
    }
    total += c;
    if (total > 1e18) return std::numeric_limits<double>::infinity();
  }
  return total;
}

namespace {

struct DPContext {
  std::size_t k;
  std::map<DPKey, DPEntry, DPKeyLess> table;
};

DPKey make_key(const StateMatrix& s, std::uint64_t remaining) {
  DPKey key;
  key.remaining = remaining;
  key.state.reserve(2 * s.size());
  for (const auto& st : s.instances) {
    key.state.push_back(st.a);
    key.state.push_back(st.b);
  }
  return key;
}

double dp_value(DPContext& ctx, StateMatrix& s, std::uint64_t remaining) {
  DPKey key = make_key(s, remaining);
  if (const auto it = ctx.table.find(key); it != ctx.table.end()) return it->second.value;
  if (remaining == 0) {
    ctx.table.emplace(std::move(key), DPEntry{-1, 0.0});
    return 0.0;
  }
  double best = -std::numeric_limits<double>::infinity();
  int best_action = 0;
  for (std::size_t i = 0; i < ctx.k; ++i) {
    const double reward = scored_reward(s.instances[i], RiskMode::expected());
    const auto [p_pos, p_neg] = transition_probs(s.instances[i]);

    s.instances[i].a += 1.0;
    const double v_pos = dp_value(ctx, s, remaining - 1);
    s.instances[i].a -= 1.0;

    s.instances[i].b += 1.0;
    const double v_neg = dp_value(ctx, s, remaining - 1);
    s.instances[i].b -= 1.0;

    const double v = reward + p_pos * v_pos + p_neg * v_neg;
    if (v > best) {
      best = v;
      best_action = static_cast<int>(i);
    }
  }
  ctx.table.emplace(std::move(key), DPEntry{best_action, best});
  return best;
}

}  // namespace

DPSolution dp_solve(const StateMatrix& initial, std::uint64_t budget,
                    std::uint64_t state_cap) {
  const double estimate = dp_state_estimate(initial.size(), budget);
  if (!(estimate <= static_cast<double>(state_cap))) {
    throw validation_error("exact DP refused: about " + std::to_string(estimate) +
                           " reachable states exceed the cap of " +
                           std::to_string(state_cap));
  }
  DPContext ctx{initial.size(), {}};
  StateMatrix scratch = initial;
  const double future = dp_value(ctx, scratch, budget);

  DPSolution sol;
  sol.value = expected_accuracy(initial) + future;
  const auto root = ctx.table.find(make_key(initial, budget));
  sol.first_action = root->second.action < 0 ? 0 : static_cast<std::size_t>(root->second.action);
  sol.table = std::move(ctx.table);
  return sol;
}

}  // namespace crowdkg
