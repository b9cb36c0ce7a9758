#include "pebc/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace pebc {

namespace {

// erfi(x) = 2x/sqrt(pi) * exp(x^2) * S(x), where
// S(x) = sum_n p_n / (2n + 1) and p_n = exp(-x^2) x^(2n) / n! are Poisson
// weights with mean x^2. Every term is positive, so the sum is stable for any
// x; the weights are formed in log space so nothing overflows.
double scaled_series(double x) {
    const double lambda = x * x;
    if (lambda == 0.0) return 1.0;
    const double log_lambda = std::log(lambda);
    const auto n_max = static_cast<long>(lambda + 40.0 * std::sqrt(lambda) + 60.0);
    double sum = 0.0;
    for (long n = 0; n <= n_max; ++n) {
        const double dn = static_cast<double>(n);
        const double log_p = -lambda + dn * log_lambda - std::lgamma(dn + 1.0);
        sum += std::exp(log_p) / (2.0 * dn + 1.0);
    }
    return sum;
}

}  // namespace

double log_erfi(double x) {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(2.0 * x / std::sqrt(std::numbers::pi)) + x * x + std::log(scaled_series(x));
}

double erfi(double x) {
    if (x == 0.0) return 0.0;
    if (x < 0.0) return -erfi(-x);
    if (x < 1.0) {
        // Taylor series: 2/sqrt(pi) sum x^(2n+1) / (n! (2n+1)).
        double term = x;
        double sum = x;
        const double x2 = x * x;
        for (int n = 1; n < 60; ++n) {
            term *= x2 / n;
            const double add = term / (2 * n + 1);
            sum += add;
            if (add < 1e-17 * sum) break;
        }
        return 2.0 / std::sqrt(std::numbers::pi) * sum;
    }
    return std::exp(log_erfi(x));
}

double erf(double x) { return std::erf(x); }

}  // namespace pebc
