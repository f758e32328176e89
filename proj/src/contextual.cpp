#include "crowdkg/contextual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "crowdkg/beta_core.hpp"
#include "crowdkg/errors.hpp"
#include "crowdkg/special.hpp"

namespace crowdkg {

GaussianBelief GaussianBelief::standard(std::size_t dim) {
  if (dim == 0) throw validation_error("belief dimension must be positive");
  return {Vec(dim, 0.0), Mat::identity(dim)};
}

bool GaussianBelief::valid() const {
  const std::size_t p = mean.size();
  if (p == 0 || cov.size() != p) return false;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (std::fabs(cov(i, j) - cov(j, i)) > 1e-12) return false;
    }
  }
  try {
    (void)cholesky(cov);
  } catch (const numeric_error&) {
    return false;
  }
  return true;
}

namespace {

void require_compatible(const GaussianBelief& belief, const Vec& x) {
  if (belief.mean.size() != x.size() || belief.cov.size() != x.size()) {
    throw validation_error("feature dimension does not match the belief");
  }
}

double log_sigmoid(double z) {
  // ln sigma(z) = -ln(1 + e^{-z}), kept stable on both tails.
  if (z > 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

}  // namespace

GaussianBelief laplace_update(const GaussianBelief& belief, const Vec& x, int y) {
  require_compatible(belief, x);
  if (y != 1 && y != -1) throw validation_error("label must be +1 or -1");
  const std::size_t p = x.size();
  const double sy = static_cast<double>(y);

  const Mat chol = cholesky(belief.cov);
  const auto log_post = [&](const Vec& w) {
    Vec diff(p);
    for (std::size_t i = 0; i < p; ++i) diff[i] = w[i] - belief.mean[i];
    const Vec omega_diff = chol_solve(chol, diff);
    return log_sigmoid(sy * dot(w, x)) - 0.5 * dot(diff, omega_diff);
  };

  Vec w = belief.mean;
  double obj = log_post(w);
  bool converged = false;
  double grad_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  for (; iterations < 100; ++iterations) {
    const double s = dot(w, x);
    Vec diff(p);
    for (std::size_t i = 0; i < p; ++i) diff[i] = w[i] - belief.mean[i];
    const Vec omega_diff = chol_solve(chol, diff);
    const double resid = sy * (1.0 - special::sigmoid(sy * s));
    Vec grad(p);
    for (std::size_t i = 0; i < p; ++i) grad[i] = resid * x[i] - omega_diff[i];
    grad_norm = norm2(grad);
    if (grad_norm <= 1e-8) {
      converged = true;
      break;
    }

    // Newton direction d = (Omega + g x x')^{-1} grad, expressed through the
    // covariance with the Sherman-Morrison identity so no inverse is formed.
    const double sig = special::sigmoid(s);
    const double g = sig * (1.0 - sig);
    const Vec cov_grad = matvec(belief.cov, grad);
    const Vec cov_x = matvec(belief.cov, x);
    const double shrink = g * dot(x, cov_grad) / (1.0 + g * dot(x, cov_x));
    Vec dir(p);
    for (std::size_t i = 0; i < p; ++i) dir[i] = cov_grad[i] - shrink * cov_x[i];

    double step = 1.0;
    Vec trial(p);
    bool improved = false;
    while (step > 1e-14) {
      for (std::size_t i = 0; i < p; ++i) trial[i] = w[i] + step * dir[i];
      const double trial_obj = log_post(trial);
      if (trial_obj >= obj) {
        w = trial;
        obj = trial_obj;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;  // objective is flat to rounding; re-check the gradient
  }
  if (!converged) {
    const double s = dot(w, x);
    Vec diff(p);
    for (std::size_t i = 0; i < p; ++i) diff[i] = w[i] - belief.mean[i];
    const Vec omega_diff = chol_solve(chol, diff);
    const double resid = sy * (1.0 - special::sigmoid(sy * s));
    Vec grad(p);
    for (std::size_t i = 0; i < p; ++i) grad[i] = resid * x[i] - omega_diff[i];
    grad_norm = norm2(grad);
    if (grad_norm > 1e-8) {
      throw numeric_error("MAP Newton iteration stalled after " +
                          std::to_string(iterations) + " steps, gradient norm " +
                          std::to_string(grad_norm));
    }
  }

  const double sig = special::sigmoid(dot(w, x));
  const double g = sig * (1.0 - sig);
  const Vec cov_x = matvec(belief.cov, x);
  const double denom = 1.0 + g * dot(x, cov_x);
  GaussianBelief next;
  next.mean = std::move(w);
  next.cov = belief.cov;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      next.cov(i, j) -= g / denom * cov_x[i] * cov_x[j];
    }
  }
  // Symmetrize away accumulated rounding before the definiteness check.
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double v = 0.5 * (next.cov(i, j) + next.cov(j, i));
      next.cov(i, j) = v;
      next.cov(j, i) = v;
    }
  }
  try {
    (void)cholesky(next.cov);
  } catch (const numeric_error&) {
    throw numeric_error("posterior covariance lost positive-definiteness");
  }
  return next;
}

double predict_label_prob(const GaussianBelief& belief, const Vec& x) {
  require_compatible(belief, x);
  const double mu = dot(belief.mean, x);
  const double s2 = quad_form(belief.cov, x);
  const double kappa = 1.0 / std::sqrt(1.0 + M_PI * s2 / 8.0);
  return special::sigmoid(mu * kappa);
}

double positive_prob(const GaussianBelief& belief, const Vec& x) {
  require_compatible(belief, x);
  const double mu = dot(belief.mean, x);
  const double s2 = quad_form(belief.cov, x);
  if (s2 <= 0.0) return mu >= 0.0 ? 1.0 : 0.0;
  return 1.0 - special::std_normal_cdf(-mu / std::sqrt(s2));
}

namespace {

double confidence_sum(const GaussianBelief& belief, const FeatureSet& features) {
  double sum = 0.0;
  for (const Vec& x : features.vectors) {
    sum += confidence(positive_prob(belief, x));
  }
  return sum;
}

}  // namespace

std::pair<double, double> contextual_reward(const GaussianBelief& belief,
                                            std::size_t candidate,
                                            const FeatureSet& features) {
  if (candidate >= features.size()) throw validation_error("candidate index out of range");
  const Vec& x = features.vectors[candidate];
  const double base = confidence_sum(belief, features);
  const double val_pos = confidence_sum(laplace_update(belief, x, 1), features) - base;
  const double val_neg = confidence_sum(laplace_update(belief, x, -1), features) - base;
  const double p_pos = predict_label_prob(belief, x);
  return {p_pos * val_pos + (1.0 - p_pos) * val_neg, std::max(val_pos, val_neg)};
}

ContextualTrace run_contextual_episode(ContextualEnvironment env, const PolicySpec& policy,
                                       std::uint64_t budget, GaussianBelief prior,
                                       const FeatureSet& features, std::uint64_t seed) {
  if (!policy.valid()) throw validation_error("invalid policy spec");
  if (policy.rule == PolicySpec::Rule::DPExact) {
    throw validation_error("exact DP is not wired up for the contextual process");
  }
  const std::size_t k = features.size();
  if (k == 0) throw validation_error("need at least one instance");
  for (const Vec& x : features.vectors) {
    if (x.size() != prior.dim()) throw validation_error("feature dimension mismatch");
  }
  if (const auto* syn = std::get_if<SyntheticContextualEnv>(&env)) {
    if (syn->theta.size() != k) throw validation_error("environment size mismatch");
  } else {
    if (std::get<ReplayEnv>(env).num_instances != k) {
      throw validation_error("environment size mismatch");
    }
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

  ContextualTrace trace;
  trace.label_counts.assign(k, 0);
  GaussianBelief belief = std::move(prior);

  for (std::uint64_t t = 0; t < budget; ++t) {
    if (allowed_count == 0) {
      trace.exhausted = true;
      break;
    }
    std::size_t pick = 0;
    if (policy.is_index_policy()) {
      const RiskMode mode = policy.risk_mode();
      std::vector<double> scores(k, -std::numeric_limits<double>::infinity());
      for (std::size_t i = 0; i < k; ++i) {
        if (!allowed[i]) continue;
        const auto [expected, optimistic] = contextual_reward(belief, i, features);
        switch (mode.kind) {
          case RiskMode::Kind::Expected:
            scores[i] = expected;
            break;
          case RiskMode::Kind::Optimistic:
            scores[i] = optimistic;
            break;
          default:
            throw validation_error(
                "contextual scoring supports expected and optimistic modes");
        }
      }
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
    if (auto* syn = std::get_if<SyntheticContextualEnv>(&env)) {
      label = label_rng.bernoulli(syn->theta[pick]) ? 1 : -1;
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

    belief = laplace_update(belief, features.vectors[pick], label);
    trace.outcomes.push_back({pick, -1, label, t});
    trace.label_counts[pick] += 1;
  }

  for (std::size_t i = 0; i < k; ++i) {
    if (positive_prob(belief, features.vectors[i]) >= 0.5) {
      trace.positive_set.push_back(i);
    }
  }

  if (const auto* syn = std::get_if<SyntheticContextualEnv>(&env)) {
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
  trace.final_belief = std::move(belief);
  return trace;
}

}  // namespace crowdkg
