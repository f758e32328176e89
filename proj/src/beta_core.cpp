#include "crowdkg/beta_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "crowdkg/errors.hpp"
#include "crowdkg/special.hpp"

namespace crowdkg {

bool BetaState::valid() const {
  return a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b);
}

bool RiskMode::valid() const {
  if (kind == Kind::CVaR) return alpha > 0.0 && alpha <= 1.0;
  return true;
}

namespace {

void require_valid(const BetaState& s) {
  if (!s.valid()) {
    throw validation_error("beta state (" + std::to_string(s.a) + ", " + std::to_string(s.b) +
                           ") must have positive finite pseudo-counts");
  }
}

}  // namespace

double positive_tail(const BetaState& s) {
  require_valid(s);
  if (s.a == s.b) return 0.5;
  // Upper tail of Beta(a,b) at 1/2 == lower tail of Beta(b,a) at 1/2.
  // Evaluating the lower tail of the mirrored state keeps small results
  // accurate instead of forming 1 - (something near 1).
  return special::reg_inc_beta(s.b, s.a, 0.5);
}

double confidence(double x) {
  if (!(x >= 0.0) || !(x <= 1.0)) {
    throw validation_error("confidence argument must lie in [0,1]");
  }
  return std::max(x, 1.0 - x);
}

std::pair<double, double> transition_probs(const BetaState& s) {
  require_valid(s);
  const double total = s.a + s.b;
  return {s.a / total, s.b / total};
}

RewardPair reward_pair(const BetaState& s) {
  require_valid(s);
  const double h_now = confidence(positive_tail(s));
  const double h_pos = confidence(positive_tail({s.a + 1.0, s.b}));
  const double h_neg = confidence(positive_tail({s.a, s.b + 1.0}));
  return {h_pos - h_now, h_neg - h_now};
}

double scored_reward(const BetaState& s, const RiskMode& mode) {
  if (!mode.valid()) throw validation_error("CVaR alpha must lie in (0,1]");
  const RewardPair r = reward_pair(s);
  const auto [p_pos, p_neg] = transition_probs(s);
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

double cvar_discrete(std::span<const double> values, std::span<const double> probs,
                     double alpha) {
  if (values.size() != probs.size() || values.empty()) {
    throw validation_error("cvar: values and probabilities must be non-empty and same size");
  }
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw validation_error("cvar: alpha must lie in (0,1]");
  }
  if (alpha == 1.0) {
    double mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) mean += probs[i] * values[i];
    return mean;
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });
  double remaining = 1.0;
  double acc = 0.0;
  for (const std::size_t i : order) {
    if (remaining <= 0.0) break;
    const double q = std::min(probs[i] / alpha, remaining);
    acc += q * values[i];
    remaining -= q;
  }
  return acc;
}

}  // namespace crowdkg
