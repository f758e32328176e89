#include "crowdkg/special.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "crowdkg/errors.hpp"

namespace crowdkg::special {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 20000;

// Continued fraction for the incomplete beta (Lentz's algorithm). Valid and
// fast for x < (a+1)/(a+b+2).
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw numeric_error("incomplete beta continued fraction failed to converge (a=" +
                      std::to_string(a) + ", b=" + std::to_string(b) + ")");
}

struct SimpsonState {
  const std::function<double(double)>* f;
  int max_depth;
};

double simpson_rec(const SimpsonState& s, double lo, double hi, double flo, double fmid,
                   double fhi, double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lmid = 0.5 * (lo + mid);
  const double rmid = 0.5 * (mid + hi);
  const double flm = (*s.f)(lmid);
  const double frm = (*s.f)(rmid);
  const double h = hi - lo;
  const double left = (h / 12.0) * (flo + 4.0 * flm + fmid);
  const double right = (h / 12.0) * (fmid + 4.0 * frm + fhi);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol || h < kTiny) {
    return left + right + delta / 15.0;
  }
  if (depth >= s.max_depth) {
    throw numeric_error("adaptive quadrature failed to converge on [" + std::to_string(lo) +
                        ", " + std::to_string(hi) + "], residual " + std::to_string(delta));
  }
  return simpson_rec(s, lo, mid, flo, flm, fmid, left, 0.5 * tol, depth + 1) +
         simpson_rec(s, mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth + 1);
}

}  // namespace

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw validation_error("beta parameters must be positive and finite");
  }
  if (!(x >= 0.0) || !(x <= 1.0)) {
    throw validation_error("incomplete beta argument outside [0,1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double reg_lower_gamma(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw validation_error("gamma shape must be positive and finite");
  }
  if (!(x >= 0.0)) throw validation_error("gamma argument must be non-negative");
  if (x == 0.0) return 0.0;
  const double ln_front = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // Series: P(a,x) = front * sum_n x^n / (a (a+1) ... (a+n)).
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kMaxIter; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * kEps) {
        return sum * std::exp(ln_front);
      }
    }
    throw numeric_error("incomplete gamma series failed to converge");
  }
  // Continued fraction for Q(a,x), then P = 1 - Q.
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      return 1.0 - std::exp(ln_front) * h;
    }
  }
  throw numeric_error("incomplete gamma continued fraction failed to converge");
}

double gamma_quantile(double a, double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw validation_error("gamma quantile level must lie in (0,1)");
  }
  double lo = 0.0;
  double hi = a + 10.0 * std::sqrt(a) + 10.0;
  while (reg_lower_gamma(a, hi) < p) {
    hi *= 2.0;
    if (hi > 1e12) throw numeric_error("gamma quantile bracket overflow");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (reg_lower_gamma(a, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-13 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(hi > lo)) return 0.0;
  const SimpsonState s{&f, 48};
  const double mid = 0.5 * (lo + hi);
  const double flo = f(lo);
  const double fmid = f(mid);
  const double fhi = f(hi);
  const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  return simpson_rec(s, lo, hi, flo, fmid, fhi, whole, tol, 0);
}

}  // namespace crowdkg::special
