#pragma once

namespace optsub {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double beta_i(double a, double b, double x);

double normal_cdf(double x);
double normal_quantile(double p);

/// Chi-square density with d degrees of freedom. The pole at (d=1, w=0)
/// is clamped to a large finite value.
double chi2_density(double w, int d);
double chi2_cdf(double w, int d);
double chi2_quantile(double p, int d);

double f_density(double x, double d1, double d2);
double f_cdf(double x, double d1, double d2);
double f_quantile(double p, double d1, double d2);

}  // namespace optsub
