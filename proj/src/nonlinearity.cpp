#include "pebc/nonlinearity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "pebc/error.hpp"
#include "pebc/format.hpp"

namespace pebc {

Nonlinearity Nonlinearity::zero() { return Nonlinearity{}; }

namespace {

void require_finite_gain(double gain) {
    if (!std::isfinite(gain)) {
        throw Error(ErrorCode::invalid_argument, "nonlinearity gain must be finite");
    }
}

}  // namespace

Nonlinearity Nonlinearity::tanh(double gain) {
    require_finite_gain(gain);
    Nonlinearity f;
    f.kind_ = NonlinearityKind::scaled_tanh;
    f.gain_ = gain;
    f.lipschitz_ = std::abs(gain);
    return f;
}

Nonlinearity Nonlinearity::sin(double gain) {
    require_finite_gain(gain);
    Nonlinearity f;
    f.kind_ = NonlinearityKind::scaled_sin;
    f.gain_ = gain;
    f.lipschitz_ = std::abs(gain);
    return f;
}

Nonlinearity Nonlinearity::saturation(double gain) {
    require_finite_gain(gain);
    Nonlinearity f;
    f.kind_ = NonlinearityKind::saturation;
    f.gain_ = gain;
    f.lipschitz_ = std::abs(gain);
    return f;
}

Nonlinearity Nonlinearity::table(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() < 2 || knots.size() != values.size()) {
        throw Error(ErrorCode::invalid_argument,
                    "table nonlinearity needs at least two (knot, value) pairs");
    }
    double slope = 0.0;
    for (std::size_t k = 0; k < knots.size(); ++k) {
        if (!std::isfinite(knots[k]) || !std::isfinite(values[k])) {
            throw Error(ErrorCode::invalid_argument, "table nonlinearity has non-finite entries");
        }
        if (k > 0) {
            if (!(knots[k] > knots[k - 1])) {
                throw Error(ErrorCode::invalid_argument,
                            "table nonlinearity knots must be strictly increasing");
            }
            slope = std::max(slope, std::abs((values[k] - values[k - 1]) / (knots[k] - knots[k - 1])));
        }
    }
    Nonlinearity f;
    f.kind_ = NonlinearityKind::custom_table;
    f.lipschitz_ = slope;
    f.gain_ = slope;
    f.parameters_ = knots;
    f.parameters_.insert(f.parameters_.end(), values.begin(), values.end());
    if (f(0.0) != 0.0) {
        throw Error(ErrorCode::invalid_argument, "table nonlinearity must vanish at 0");
    }
    return f;
}

double Nonlinearity::operator()(double s) const noexcept {
    switch (kind_) {
        case NonlinearityKind::zero: return 0.0;
        case NonlinearityKind::scaled_tanh: return gain_ * std::tanh(s);
        case NonlinearityKind::scaled_sin: return gain_ * std::sin(s);
        case NonlinearityKind::saturation: return gain_ * std::clamp(s, -1.0, 1.0);
        case NonlinearityKind::custom_table: {
            const std::size_t m = parameters_.size() / 2;
            const double* knots = parameters_.data();
            const double* values = knots + m;
            if (s <= knots[0]) return values[0];
            if (s >= knots[m - 1]) return values[m - 1];
            const std::size_t k = static_cast<std::size_t>(std::upper_bound(knots, knots + m, s) - knots);
            if (s == knots[k - 1]) return values[k - 1];
            const double w = (s - knots[k - 1]) / (knots[k] - knots[k - 1]);
            return values[k - 1] + w * (values[k] - values[k - 1]);
        }
    }
    return 0.0;
}

std::string Nonlinearity::to_string() const {
    switch (kind_) {
        case NonlinearityKind::zero: return "zero";
        case NonlinearityKind::scaled_tanh: return "tanh(" + format_double(gain_) + ")";
        case NonlinearityKind::scaled_sin: return "sin(" + format_double(gain_) + ")";
        case NonlinearityKind::saturation: return "sat(" + format_double(gain_) + ")";
        case NonlinearityKind::custom_table: {
            const std::size_t m = parameters_.size() / 2;
            std::string out = "table(";
            for (std::size_t k = 0; k < m; ++k) {
                if (k > 0) out += ", ";
                out += format_double(parameters_[k]) + ":" + format_double(parameters_[m + k]);
            }
            return out + ")";
        }
    }
    return "zero";
}

double evaluate(const Nonlinearity& f, double s) { return f(s); }

Field apply_field(const Nonlinearity& f, const Field& u) {
    Field out(u.grid());
    if (f.kind() == NonlinearityKind::zero) return out;
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = f(u[i]);
    return out;
}

LipschitzAudit lipschitz_audit(const Nonlinearity& f, std::size_t samples, double range,
                               std::uint64_t seed) {
    if (samples < 2) {
        throw Error(ErrorCode::invalid_argument, "lipschitz_audit needs at least 2 samples");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> decades(-6.0, 0.0);
    LipschitzAudit audit;
    for (std::size_t k = 0; k < samples; ++k) {
        const double scale = range * std::pow(10.0, decades(rng));
        const double a = scale * unit(rng);
        const double b = scale * unit(rng);
        if (a == b) continue;
        audit.max_ratio = std::max(audit.max_ratio, std::abs(f(a) - f(b)) / std::abs(a - b));
    }
    audit.certified = audit.max_ratio <= f.lipschitz() * (1.0 + 1e-9);
    return audit;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
        throw Error(ErrorCode::invalid_argument, "malformed number '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

Nonlinearity parse_nonlinearity(std::string_view text) {
    text = trim(text);
    if (text == "zero" || text == "0") return Nonlinearity::zero();
    const auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') {
        throw Error(ErrorCode::invalid_argument, "unrecognized nonlinearity '" + std::string(text) + "'");
    }
    const std::string_view name = trim(text.substr(0, open));
    const std::string_view args = text.substr(open + 1, text.size() - open - 2);
    if (name == "tanh") return Nonlinearity::tanh(parse_number(args));
    if (name == "sin") return Nonlinearity::sin(parse_number(args));
    if (name == "sat") return Nonlinearity::saturation(parse_number(args));
    if (name == "table") {
        std::vector<double> knots;
        std::vector<double> values;
        std::string_view rest = args;
        while (!trim(rest).empty()) {
            const auto comma = rest.find(',');
            const std::string_view pair = rest.substr(0, comma);
            const auto colon = pair.find(':');
            if (colon == std::string_view::npos) {
                throw Error(ErrorCode::invalid_argument, "table entries must look like s:value");
            }
            knots.push_back(parse_number(pair.substr(0, colon)));
            values.push_back(parse_number(pair.substr(colon + 1)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        return Nonlinearity::table(std::move(knots), std::move(values));
    }
    throw Error(ErrorCode::invalid_argument, "unknown nonlinearity '" + std::string(name) + "'");
}

}  // namespace pebc
