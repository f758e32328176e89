#pragma once

#include <functional>

namespace crowdkg::special {

// ln B(a,b), computed through lgamma so large pseudo-counts never overflow.
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a,b) = Pr(X <= x), X ~ Beta(a,b).
// Continued-fraction (modified Lentz) evaluation with the symmetry flip
// I_x(a,b) = 1 - I_{1-x}(b,a) applied when the fraction would converge
// slowly. Relative accuracy is close to machine precision.
double reg_inc_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a,x) = Pr(X <= x), X ~ Gamma(a,1).
// Series expansion for x < a+1, continued fraction otherwise.
double reg_lower_gamma(double a, double x);

// Smallest q with P(a,q) >= p, by bisection on the CDF.
double gamma_quantile(double a, double p);

// Standard normal CDF via the complementary error function.
double std_normal_cdf(double z);

// Logistic sigmoid 1/(1+e^{ -x }), saturation-safe on both sides.
double sigmoid(double x);

// Adaptive Simpson quadrature of f on [lo, hi] to absolute tolerance tol.
// Throws numeric_error when the recursion bottoms out before the local
// error estimates do.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double tol);

}  // namespace crowdkg::special
