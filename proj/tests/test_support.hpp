#pragma once

// Independent oracles used across the test suite. Everything here computes
// its answer by a different route than the library (direct quadrature,
// exhaustive enumeration, Monte Carlo, textbook closed forms), so agreement
// is evidence rather than tautology.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "crowdkg/binary_mdp.hpp"
#include "crowdkg/policies.hpp"

namespace oracle {

// Gauss-Legendre nodes/weights on [-1, 1], by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> nodes(n), weights(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return {nodes, weights};
}

// integral of f over [lo, hi] with a fixed 96-point rule.
template <typename F>
double gl_integrate(F&& f, double lo, double hi) {
  static const auto rule = gauss_legendre(96);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.first.size(); ++i) {
    sum += rule.second[i] * f(mid + half * rule.first[i]);
  }
  return half * sum;
}

// Pr(theta >= 1/2 | Beta(a,b)) by direct quadrature. The substitution
// t = 1 - v^2 removes the t = 1 endpoint singularity for b < 1, so the
// integrand is smooth for any a, b >= 0.5.
inline double positive_tail(double a, double b) {
  const double log_b = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const auto f = [&](double v) {
    const double t = 1.0 - v * v;
    return 2.0 * std::exp((a - 1.0) * std::log(t) + (2.0 * b - 1.0) * std::log(v) - log_b);
  };
  return gl_integrate(f, 0.0, std::sqrt(0.5));
}

// Textbook closed forms for integer states.
inline double optimistic_closed(std::int64_t a, std::int64_t b) {
  const double log_b = std::lgamma(double(a)) + std::lgamma(double(b)) -
                       std::lgamma(double(a + b));
  const double denom = a >= b ? double(a) : double(b);
  return std::exp(double(a + b) * std::log(0.5) - std::log(denom) - log_b);
}

inline double expected_closed(std::int64_t a, std::int64_t b) {
  if (a != b) return 0.0;
  return optimistic_closed(a, a);
}

// Expected terminal confidence sum of a policy, by exhausting every action
// and label sequence with its transition weight. Deterministic policies
// contribute a single action per node; uniform averages over all of them.
inline double policy_value_by_enumeration(const crowdkg::StateMatrix& s,
                                          const crowdkg::PolicySpec& policy,
                                          std::uint64_t remaining) {
  using namespace crowdkg;
  if (remaining == 0) return expected_accuracy(s);

  std::vector<std::pair<std::size_t, double>> actions;
  if (policy.rule == PolicySpec::Rule::Uniform) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      actions.emplace_back(i, 1.0 / double(s.size()));
    }
  } else if (policy.is_index_policy() && policy.tie == TieBreak::Deterministic) {
    Rng unused(0);
    actions.emplace_back(select_action(policy, s, remaining, unused), 1.0);
  } else {
    throw std::logic_error("enumeration oracle handles uniform and deterministic policies");
  }

  double value = 0.0;
  for (const auto& [i, w] : actions) {
    const auto [p_pos, p_neg] = transition_probs(s.instances[i]);
    value += w * (p_pos * policy_value_by_enumeration(update_state(s, i, +1), policy,
                                                      remaining - 1) +
                  p_neg * policy_value_by_enumeration(update_state(s, i, -1), policy,
                                                      remaining - 1));
  }
  return value;
}

// Exact marginal posterior moments of the one-coin pair model, by dense 2-D
// quadrature of the joint. theta = sin^2(u), rho = sin^2(v) keeps the
// integrand smooth down to half-integer pseudo-counts.
struct PairMoments {
  double theta1, theta2, rho1, rho2;
};

inline PairMoments pair_moments_by_quadrature(double a, double b, double c, double d,
                                              int z) {
  static const auto rule = gauss_legendre(96);
  const double log_bi = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double log_bw = std::lgamma(c) + std::lgamma(d) - std::lgamma(c + d);

  const int n = static_cast<int>(rule.first.size());
  std::vector<double> tu(n), wu(n), tv(n), wv(n);
  for (int i = 0; i < n; ++i) {
    const double u = 0.25 * M_PI * (rule.first[i] + 1.0);
    const double su = std::sin(u), cu = std::cos(u);
    tu[i] = su * su;
    wu[i] = 0.25 * M_PI * rule.second[i] * 2.0 *
            std::exp((2.0 * a - 1.0) * std::log(su) + (2.0 * b - 1.0) * std::log(cu) - log_bi);
    const double v = 0.25 * M_PI * (rule.first[i] + 1.0);
    const double sv = std::sin(v), cv = std::cos(v);
    tv[i] = sv * sv;
    wv[i] = 0.25 * M_PI * rule.second[i] * 2.0 *
            std::exp((2.0 * c - 1.0) * std::log(sv) + (2.0 * d - 1.0) * std::log(cv) - log_bw);
  }

  double z0 = 0.0, t1 = 0.0, t2 = 0.0, r1 = 0.0, r2 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double theta = tu[i], rho = tv[j];
      const double lik = z == 1 ? theta * rho + (1.0 - theta) * (1.0 - rho)
                                : (1.0 - theta) * rho + theta * (1.0 - rho);
      const double w = wu[i] * wv[j] * lik;
      z0 += w;
      t1 += w * theta;
      t2 += w * theta * theta;
      r1 += w * rho;
      r2 += w * rho * rho;
    }
  }
  return {t1 / z0, t2 / z0, r1 / z0, r2 / z0};
}

// Modal-class probabilities by Monte Carlo over independent Gamma draws.
inline std::vector<double> modal_probs_by_monte_carlo(const std::vector<double>& alpha,
                                                      std::size_t samples,
                                                      std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::vector<std::gamma_distribution<double>> dists;
  dists.reserve(alpha.size());
  for (const double a : alpha) dists.emplace_back(a, 1.0);
  std::vector<std::size_t> wins(alpha.size(), 0);
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t best = 0;
    double best_v = -1.0;
    for (std::size_t c = 0; c < alpha.size(); ++c) {
      const double v = dists[c](engine);
      if (v > best_v) {
        best_v = v;
        best = c;
      }
    }
    ++wins[best];
  }
  std::vector<double> freq(alpha.size());
  for (std::size_t c = 0; c < alpha.size(); ++c) {
    freq[c] = double(wins[c]) / double(samples);
  }
  return freq;
}

// Plain Gauss-Jordan inverse, independent of the library's Cholesky path.
inline std::vector<std::vector<double>> dense_inverse(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
    }
    std::swap(m[col], m[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double diag = m[col][col];
    if (diag == 0.0) throw std::runtime_error("singular matrix in oracle inverse");
    for (std::size_t j = 0; j < n; ++j) {
      m[col][j] /= diag;
      inv[col][j] /= diag;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

}  // namespace oracle
