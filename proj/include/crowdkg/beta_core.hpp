#pragma once

#include <span>
#include <utility>

namespace crowdkg {

// Pseudo-count pair (a, b) for one instance's soft-label posterior
// Beta(a, b). a counts +1 labels, b counts -1 labels; both include the
// prior mass, so they are positive reals rather than integers.
struct BetaState {
  double a = 1.0;
  double b = 1.0;

  bool valid() const;
};

// The two possible one-step changes in confidence: r_pos if the next label
// is +1, r_neg if it is -1.
struct RewardPair {
  double r_pos = 0.0;
  double r_neg = 0.0;
};

// How a two-point reward distribution is collapsed into a single score.
struct RiskMode {
  enum class Kind { Expected, Optimistic, Pessimistic, CVaR };

  Kind kind = Kind::Expected;
  double alpha = 1.0;  // only meaningful for CVaR, in (0, 1]

  static RiskMode expected() { return {Kind::Expected, 1.0}; }
  static RiskMode optimistic() { return {Kind::Optimistic, 1.0}; }
  static RiskMode pessimistic() { return {Kind::Pessimistic, 1.0}; }
  static RiskMode cvar(double alpha) { return {Kind::CVaR, alpha}; }

  bool valid() const;
};

// Pr(theta >= 1/2) under Beta(a, b) -- the posterior probability that the
// instance is truly positive. Equals 0.5 exactly when a == b.
double positive_tail(const BetaState& s);

// max(x, 1-x): the expected accuracy of classifying by thresholding x at 1/2.
double confidence(double x);

// Predictive probabilities of the next label being (+1, -1): (a, b)/(a+b).
std::pair<double, double> transition_probs(const BetaState& s);

// Confidence change for each label outcome:
//   r_pos = h(I(a+1, b)) - h(I(a, b)),  r_neg = h(I(a, b+1)) - h(I(a, b)).
RewardPair reward_pair(const BetaState& s);

// Collapse the two-point reward distribution per `mode`:
//   Expected     p_pos*r_pos + p_neg*r_neg
//   Optimistic   max(r_pos, r_neg)
//   Pessimistic  min(r_pos, r_neg)
//   CVaR(alpha)  mean of the upper alpha-tail of the distribution
double scored_reward(const BetaState& s, const RiskMode& mode);

// CVaR_alpha of a finite discrete distribution, by the closed-form greedy
// fill: visit outcomes from the largest value down, giving each a weight of
// min(p_i/alpha, remaining mass). alpha == 1 reduces to the plain mean and
// is computed as such, so the reduction is exact.
double cvar_discrete(std::span<const double> values, std::span<const double> probs,
                     double alpha);

}  // namespace crowdkg
