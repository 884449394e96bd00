#pragma once

namespace ctl {

// Regularized lower/upper incomplete gamma P(a,z), Q(a,z).
double gamma_p(double a, double z);
double gamma_q(double a, double z);

// Unregularized upper incomplete gamma Γ(a,z) and the overflow-safe e^z Γ(a,z).
double upper_gamma(double a, double z);
double upper_gamma_scaled(double a, double z);

// Generalized Laguerre polynomial L_n^{(alpha)}(x) via the three-term recurrence.
double laguerre(int n, double alpha, double x);

// Quantile of the chi-square distribution with df degrees of freedom.
double chi_square_quantile(double p, double df);

// Standard normal quantile.
double normal_quantile(double p);

}  // namespace ctl
