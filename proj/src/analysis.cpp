#include "pebc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pebc/error.hpp"
#include "pebc/format.hpp"
#include "pebc/kernel.hpp"
#include "pebc/special_functions.hpp"

namespace pebc {

namespace {

void require_positive_c1(double c1) {
    if (!(c1 > 0.0) || !std::isfinite(c1)) {
        throw Error(ErrorCode::invalid_argument, "c1 must be positive and finite, got " + format_double(c1));
    }
}

// gain * factor with 0 * inf taken as 0.
double scaled(double gain, double factor) { return gain == 0.0 ? 0.0 : gain * factor; }

double coupling_ratio(const SystemParams& p) {
    return p.alpha() == 0.0 || p.beta() == 0.0 ? 0.0 : p.alpha() * p.beta() / p.gamma();
}

}  // namespace

Spectrum spectrum(const SystemParams& params, int n_max) {
    if (n_max < 0) throw Error(ErrorCode::invalid_argument, "n_max must be non-negative");
    const double ab = params.alpha() * params.beta();
    const double gamma = params.gamma();
    auto eigenvalue = [&](double mode_sq) {
        return -params.rho() + ab / (gamma + mode_sq) - mode_sq;
    };
    Spectrum s;
    s.eigenvalues.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        const double mode = static_cast<double>(n) * std::numbers::pi;
        s.eigenvalues.push_back(eigenvalue(mode * mode));
    }
    s.margin = *std::max_element(s.eigenvalues.begin(), s.eigenvalues.end());

    // For n > n_max with gamma + (n pi)^2 > 0 the coupling term is bounded by
    // |alpha beta| / (gamma + ((n_max + 1) pi)^2) and -(n pi)^2 decreases.
    const double next = static_cast<double>(n_max + 1) * std::numbers::pi;
    const double denom = gamma + next * next;
    if (denom > 0.0) {
        s.tail_bound = -params.rho() + std::abs(ab) / denom - next * next;
        s.tail_certified = s.tail_bound < s.margin;
    } else {
        s.tail_bound = std::numeric_limits<double>::infinity();
        s.tail_certified = false;
    }
    return s;
}

double lipschitz_aggregate(const SystemParams& p) {
    return p.m1() + p.m3() * std::abs(p.alpha()) + p.m2() * std::abs(p.beta()) + p.m2() * p.m3();
}

OpenLoopCondition open_loop_condition(const SystemParams& p) {
    OpenLoopCondition c;
    const double base = p.rho() - coupling_ratio(p);
    c.lipschitz = lipschitz_aggregate(p);
    c.margin = base - c.lipschitz;
    c.printed_reading = base - p.m1() + p.m3() * std::abs(p.alpha()) + p.m2() * std::abs(p.beta()) +
                        p.m2() * p.m3();
    c.spectral_margin = spectrum(p).margin;
    c.pass = c.margin > 0.0 && c.spectral_margin < 0.0;
    return c;
}

ClosedLoopCondition closed_loop_condition(const SystemParams& p, double c1) {
    require_positive_c1(c1);
    ClosedLoopCondition c;
    c.nc1 = kernel_bound_nc1(c1);
    const double amp = (1.0 + c.nc1) * (1.0 + c.nc1);
    const double beta_m3 = std::abs(p.beta()) + p.m3();
    const double printed = p.m1() + (p.m2() + std::abs(p.alpha())) * beta_m3;
    const double l5 = p.m1() + p.m2() * beta_m3;
    const double proof = l5 + std::abs(p.alpha()) * beta_m3;
    c.k1 = c1 + p.rho() - scaled(printed, amp);
    c.k1_proof_form = c1 + p.rho() - scaled(proof, amp);
    if (std::isfinite(c.k1) && std::isfinite(c.k1_proof_form)) {
        const double scale = std::max({1.0, std::abs(c.k1), std::abs(scaled(printed, amp))});
        c.forms_agree = std::abs(c.k1 - c.k1_proof_form) <= 64.0 * std::numeric_limits<double>::epsilon() * scale;
    } else {
        c.forms_agree = c.k1 == c.k1_proof_form;
    }
    c.pass = c.k1 > 0.0;
    return c;
}

double observer_eta(double c1) {
    require_positive_c1(c1);
    const double integral = std::sqrt(std::numbers::pi / (2.0 * c1)) * erf(std::sqrt(c1 / 2.0));
    return 0.5 * c1 * (1.0 + 0.5 * c1) * std::exp(0.25 * c1) * std::sqrt(integral);
}

ObserverCondition observer_condition(const SystemParams& p, double c1) {
    require_positive_c1(c1);
    ObserverCondition c;
    c.nc1 = kernel_bound_nc1(c1);
    c.eta = observer_eta(c1);
    const double amp = (1.0 + c.nc1) * (1.0 + c.nc1);
    const double inner = (p.m2() + std::abs(p.alpha())) * (std::abs(p.beta()) + p.m3()) +
                         0.5 * (c.eta * c.eta + 1.0) + p.m1();
    c.k4 = scaled(inner, amp);
    c.k3 = c1 + p.rho() - c.k4;
    c.pass = c.k3 > 0.0;
    return c;
}

WellposednessConstants wellposedness_constants(const SystemParams& p, double c1) {
    require_positive_c1(c1);
    const double n = kernel_bound_nc1(c1);
    const double root = std::sqrt(2.0 * (1.0 + n * n));
    WellposednessConstants w;
    w.l1 = scaled(std::abs(p.beta()) + p.m3(), root);
    w.l2 = scaled(p.m2(), w.l1) + scaled(p.m1(), root);
    w.l3 = scaled(w.l1 * std::abs(p.alpha()) + w.l2, 1.0 + n) + std::abs(c1 + p.rho());
    return w;
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> norms,
                   std::optional<std::pair<double, double>> window) {
    if (t.size() != norms.size()) {
        throw Error(ErrorCode::invalid_argument, "fit_decay: time and norm series differ in length");
    }
    if (t.empty()) throw Error(ErrorCode::degenerate_fit, "fit_decay: empty series");
    const auto [t0, t1] = window.value_or(std::pair{0.5 * (t.front() + t.back()), t.back()});

    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0, syy = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 || t[i] > t1) continue;
        if (!(norms[i] > 1e-14)) {
            throw Error(ErrorCode::degenerate_fit,
                        "fit_decay: norm " + format_double(norms[i]) + " at t = " + format_double(t[i]) +
                            " is not above 1e-14");
        }
        const double y = std::log(norms[i]);
        st += t[i];
        sy += y;
        stt += t[i] * t[i];
        sty += t[i] * y;
        syy += y * y;
        ++count;
    }
    if (count < 10) {
        throw Error(ErrorCode::degenerate_fit,
                    "fit_decay: " + std::to_string(count) + " samples in window, need at least 10");
    }
    const double nn = static_cast<double>(count);
    const double mean_t = st / nn;
    const double mean_y = sy / nn;
    const double var_t = stt / nn - mean_t * mean_t;
    if (!(var_t > 0.0)) throw Error(ErrorCode::degenerate_fit, "fit_decay: window has no time spread");

    // Second pass in centered form for accuracy.
    double ctt = 0.0, cty = 0.0, cyy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 || t[i] > t1) continue;
        const double dt = t[i] - mean_t;
        const double dy = std::log(norms[i]) - mean_y;
        ctt += dt * dt;
        cty += dt * dy;
        cyy += dy * dy;
    }
    const double slope = cty / ctt;
    DecayFit fit;
    fit.rate = -slope;
    fit.intercept = mean_y - slope * mean_t;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 || t[i] > t1) continue;
        const double r = std::log(norms[i]) - (fit.intercept + slope * t[i]);
        ss_res += r * r;
    }
    const double tiny = 1e-300;
    fit.r_squared = cyy <= tiny ? 1.0 : std::clamp(1.0 - ss_res / cyy, 0.0, 1.0);
    fit.t_start = t0;
    fit.t_end = t1;
    fit.samples = count;
    return fit;
}

bool lemma5_bound_check(const SystemParams& p, double c1, std::span<const double> norm_utilde,
                        std::span<const double> norm_v) {
    require_positive_c1(c1);
    if (norm_utilde.size() != norm_v.size()) {
        throw Error(ErrorCode::invalid_argument, "lemma5_bound_check: series differ in length");
    }
    const double factor = scaled(std::abs(p.beta()) + p.m3(), 1.0 + kernel_bound_nc1(c1));
    for (std::size_t i = 0; i < norm_v.size(); ++i) {
        const double bound = norm_utilde[i] == 0.0 ? 0.0 : factor * norm_utilde[i];
        if (!(norm_v[i] <= bound + 1e-6)) return false;
    }
    return true;
}

std::optional<double> find_c1_for_k1(const SystemParams& params, double target, double c1_max) {
    require_positive_c1(c1_max);
    auto k1 = [&](double c1) { return closed_loop_condition(params, c1).k1; };
    constexpr int kScan = 400;
    const double lo_end = std::min(1e-3, c1_max);
    double prev = lo_end;
    if (k1(prev) >= target) return prev;
    for (int i = 1; i <= kScan; ++i) {
        const double c1 = lo_end * std::pow(c1_max / lo_end, static_cast<double>(i) / kScan);
        if (k1(c1) >= target) {
            double a = prev;
            double b = c1;
            for (int it = 0; it < 200 && b - a > 1e-12 * b; ++it) {
                const double mid = 0.5 * (a + b);
                (k1(mid) >= target ? b : a) = mid;
            }
            return b;
        }
        prev = c1;
    }
    return std::nullopt;
}

GainReport gain_report(const SystemParams& params, double c1) {
    GainReport r;
    r.c1 = c1;
    r.open_loop = open_loop_condition(params);
    r.closed_loop = closed_loop_condition(params, c1);
    r.observer = observer_condition(params, c1);
    r.wellposedness = wellposedness_constants(params, c1);
    r.spectrum = spectrum(params);
    return r;
}

namespace {

struct Entry {
    const char* key;
    std::string value;
};

std::string flag(bool b) { return b ? "true" : "false"; }

std::vector<Entry> entries(const GainReport& r) {
    return {
        {"c1", format_double(r.c1)},
        {"M", format_double(r.open_loop.margin)},
        {"M_lip", format_double(r.open_loop.lipschitz)},
        {"M_printed", format_double(r.open_loop.printed_reading)},
        {"open_loop_rate", format_double(r.open_loop.margin)},
        {"Nc1", format_double(r.closed_loop.nc1)},
        {"eta", format_double(r.observer.eta)},
        {"K1", format_double(r.closed_loop.k1)},
        {"K1_proof_form", format_double(r.closed_loop.k1_proof_form)},
        {"K1_forms_agree", flag(r.closed_loop.forms_agree)},
        {"K3", format_double(r.observer.k3)},
        {"K4", format_double(r.observer.k4)},
        {"L1", format_double(r.wellposedness.l1)},
        {"L2", format_double(r.wellposedness.l2)},
        {"L3", format_double(r.wellposedness.l3)},
        {"spectral_margin", format_double(r.spectrum.margin)},
        {"spectral_tail_certified", flag(r.spectrum.tail_certified)},
        {"open_loop_pass", flag(r.open_loop_pass())},
        {"closed_loop_pass", flag(r.closed_loop_pass())},
        {"observer_pass", flag(r.observer_pass())},
        {"output_feedback_pass", flag(r.output_feedback_pass())},
    };
}

}  // namespace

void write_gain_report(const GainReport& report, std::ostream& out) {
    for (const auto& e : entries(report)) out << e.key << '=' << e.value << '\n';
}

std::string gain_report_text(const GainReport& report) {
    std::ostringstream os;
    write_gain_report(report, os);
    return os.str();
}

std::string gain_report_csv_header() {
    std::string line;
    for (const auto& e : entries(GainReport{})) {
        if (!line.empty()) line += ',';
        line += e.key;
    }
    return line;
}

std::string gain_report_csv_row(const GainReport& report) {
    std::string line;
    bool first = true;
    for (const auto& e : entries(report)) {
        if (!first) line += ',';
        line += e.value;
        first = false;
    }
    return line;
}

}  // namespace pebc
