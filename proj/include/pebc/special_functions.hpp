#pragma once

namespace pebc {

/// Imaginary error function, erfi(x) = 2/sqrt(pi) int_0^x exp(s^2) ds.
double erfi(double x);

/// log(erfi(x)) for x > 0, finite well past the point where erfi overflows.
double log_erfi(double x);

/// Error function (defers to std::erf).
double erf(double x);

}  // namespace pebc
