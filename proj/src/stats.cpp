#include "pstrust/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pstrust/errors.hpp"

namespace pstrust {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEpsilon = 1e-15;

// Series gamma(a, x) * e^x * x^-a * Gamma(a) expansion, valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < kMaxIterations; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEpsilon)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("incomplete gamma series failed to converge");
}

// Modified Lentz evaluation of the continued fraction for Q(a, x), valid for
// x >= a + 1.
double gamma_q_fraction(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / kEpsilon;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("incomplete gamma fraction failed to converge");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw InputError("regularized_gamma_p: needs a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw InputError("regularized_gamma_q: needs a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

double chi_square_uniform(std::span<const std::uint64_t> counts) {
    if (counts.size() < 2) throw InputError("chi_square_uniform: needs at least two bins");
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    if (total == 0) throw InputError("chi_square_uniform: empty sample");
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double statistic = 0.0;
    for (std::uint64_t c : counts) {
        double diff = static_cast<double>(c) - expected;
        statistic += diff * diff / expected;
    }
    return statistic;
}

double chi_square_pvalue(double statistic, int dof) {
    if (dof < 1) throw InputError("chi_square_pvalue: needs dof >= 1");
    if (statistic <= 0.0) return 1.0;
    return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

double uniform_fit_pvalue(std::span<const std::uint64_t> counts) {
    return chi_square_pvalue(chi_square_uniform(counts), static_cast<int>(counts.size()) - 1);
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("fit_line: needs paired samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InputError("fit_line: all x values coincide");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy == 0.0) {
        fit.r_squared = 1.0;  // constant data, perfectly reproduced
    } else {
        double residual = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double e = y[i] - (fit.slope * x[i] + fit.intercept);
            residual += e * e;
        }
        fit.r_squared = 1.0 - residual / syy;
    }
    return fit;
}

double fit_proportional(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) throw InputError("fit_proportional: needs paired samples");
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
    }
    if (sxx == 0.0) throw InputError("fit_proportional: all x values are zero");
    return sxy / sxx;
}

}  // namespace pstrust
