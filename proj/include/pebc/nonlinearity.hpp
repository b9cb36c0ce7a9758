#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pebc/grid.hpp"

namespace pebc {

enum class NonlinearityKind { zero, scaled_tanh, scaled_sin, saturation, custom_table };

/// Scalar globally Lipschitz map phi with phi(0) = 0, acting pointwise on
/// fields. lipschitz() is an exact certificate for every built-in kind:
///   scaled_tanh  s -> g tanh(s)
///   scaled_sin   s -> g sin(s)
///   saturation   s -> g clamp(s, -1, 1)
///   custom_table piecewise-linear through (s_k, phi_k), constant outside.
class Nonlinearity {
public:
    Nonlinearity() = default;

    static Nonlinearity zero();
    static Nonlinearity tanh(double gain);
    static Nonlinearity sin(double gain);
    static Nonlinearity saturation(double gain);
    /// Knots must be strictly increasing and the interpolant must vanish at 0.
    static Nonlinearity table(std::vector<double> knots, std::vector<double> values);

    NonlinearityKind kind() const noexcept { return kind_; }
    double gain() const noexcept { return gain_; }
    const std::vector<double>& parameters() const noexcept { return parameters_; }

    /// Certified global Lipschitz constant.
    double lipschitz() const noexcept { return lipschitz_; }
    bool is_zero() const noexcept { return kind_ == NonlinearityKind::zero || lipschitz_ == 0.0; }

    double operator()(double s) const noexcept;

    /// Config spelling, e.g. "tanh(0.3)".
    std::string to_string() const;

private:
    NonlinearityKind kind_ = NonlinearityKind::zero;
    double gain_ = 0.0;
    double lipschitz_ = 0.0;
    std::vector<double> parameters_;  // table: knots then values
};

double evaluate(const Nonlinearity& f, double s);
Field apply_field(const Nonlinearity& f, const Field& u);

struct LipschitzAudit {
    double max_ratio = 0.0;
    bool certified = true;
};

/// Largest |f(a) - f(b)| / |a - b| over random pairs drawn at magnitudes
/// spread log-uniformly over [range * 1e-6, range].
LipschitzAudit lipschitz_audit(const Nonlinearity& f, std::size_t samples, double range,
                               std::uint64_t seed = 0x5eed);

/// Parses "zero", "tanh(g)", "sin(g)", "sat(g)" and "table(s0:v0, s1:v1, ...)".
Nonlinearity parse_nonlinearity(std::string_view text);

}  // namespace pebc
