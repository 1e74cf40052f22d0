#pragma once

#include <cstdint>
#include <span>

namespace pstrust {

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
// a > 0, x >= 0. Series expansion for x < a + 1, Lentz continued fraction
// for the upper tail otherwise. Absolute error well below 1e-10 over the
// ranges the tests use.
double regularized_gamma_p(double a, double x);

// Upper tail Q(a, x) = 1 - P(a, x), computed directly on its own branch so
// small tails keep relative precision.
double regularized_gamma_q(double a, double x);

// Pearson statistic for observed counts against a uniform expectation.
// At least two bins and a non-zero total are required.
double chi_square_uniform(std::span<const std::uint64_t> counts);

// P[Chi2(dof) >= statistic] = Q(dof/2, statistic/2).
double chi_square_pvalue(double statistic, int dof);

// Convenience: p-value of observed counts against the uniform distribution,
// dof = bins - 1.
double uniform_fit_pvalue(std::span<const std::uint64_t> counts);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;  // 1 when the residuals vanish
};

// Ordinary least squares y = slope * x + intercept; needs two distinct x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Least squares through the origin, y = c * x; returns c.
double fit_proportional(std::span<const double> x, std::span<const double> y);

}  // namespace pstrust
