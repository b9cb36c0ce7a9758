#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pebc/pde.hpp"

namespace pebc {

/// lambda_n = -rho + alpha beta / (gamma + (n pi)^2) - (n pi)^2 for n = 0..n_max,
/// with a tail bound covering every n > n_max.
struct Spectrum {
    std::vector<double> eigenvalues;
    double margin = 0.0;  // max over the computed eigenvalues
    /// Upper bound on lambda_n for all n > n_max.
    double tail_bound = 0.0;
    /// True when the tail bound is monotone beyond n_max and below margin,
    /// so that margin is the supremum over all n.
    bool tail_certified = false;
};

inline constexpr int kDefaultSpectrumModes = 64;

Spectrum spectrum(const SystemParams& params, int n_max = kDefaultSpectrumModes);

/// M1 + M3 |alpha| + M2 |beta| + M2 M3
double lipschitz_aggregate(const SystemParams& params);

struct OpenLoopCondition {
    double lipschitz = 0.0;       // M_lip
    double margin = 0.0;          // M = rho - alpha beta / gamma - M_lip, also the decay rate
    double printed_reading = 0.0; // rho - alpha beta / gamma - M1 + M3|alpha| + M2|beta| + M2 M3
    double spectral_margin = 0.0;
    bool pass = false;            // margin > 0 and spectral_margin < 0
};

OpenLoopCondition open_loop_condition(const SystemParams& params);

struct ClosedLoopCondition {
    double nc1 = 0.0;
    double k1 = 0.0;
    double k1_proof_form = 0.0;  // c1 + rho - (L5 + |alpha|(|beta| + M3))(1 + N)^2
    bool forms_agree = false;
    bool pass = false;           // k1 > 0
};

ClosedLoopCondition closed_loop_condition(const SystemParams& params, double c1);

/// (c1/2)(1 + c1/2) e^{c1/4} (sqrt(pi/(2 c1)) erf(sqrt(c1/2)))^{1/2}
double observer_eta(double c1);

struct ObserverCondition {
    double nc1 = 0.0;
    double eta = 0.0;
    double k3 = 0.0;
    double k4 = 0.0;
    bool pass = false;  // k3 > 0
};

ObserverCondition observer_condition(const SystemParams& params, double c1);

struct WellposednessConstants {
    double l1 = 0.0;
    double l2 = 0.0;
    double l3 = 0.0;
};

WellposednessConstants wellposedness_constants(const SystemParams& params, double c1);

struct DecayFit {
    double rate = 0.0;  // minus the slope of log(norm) against t
    double intercept = 0.0;
    double r_squared = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    std::size_t samples = 0;
};

/// Least-squares line through (t, log norm) over [t_start, t_end]. Without a
/// window the second half of the series is used. Throws Error(degenerate_fit)
/// with fewer than 10 samples in the window or a norm <= 1e-14 there.
DecayFit fit_decay(std::span<const double> t, std::span<const double> norms,
                   std::optional<std::pair<double, double>> window = std::nullopt);

/// ||v|| <= (|beta| + M3)(1 + N) ||utilde|| + 1e-6 at every sample.
bool lemma5_bound_check(const SystemParams& params, double c1, std::span<const double> norm_utilde,
                        std::span<const double> norm_v);

/// Smallest c1 in (0, c1_max] (to bisection accuracy) with K1 >= target, or
/// nothing when the target is out of reach.
std::optional<double> find_c1_for_k1(const SystemParams& params, double target,
                                     double c1_max = 10.0);

/// Every closed-form constant for one (params, c1) pair with per-result flags.
struct GainReport {
    double c1 = 0.0;
    OpenLoopCondition open_loop;
    ClosedLoopCondition closed_loop;
    ObserverCondition observer;
    WellposednessConstants wellposedness;
    Spectrum spectrum;

    bool open_loop_pass() const noexcept { return open_loop.pass; }
    bool closed_loop_pass() const noexcept { return closed_loop.pass; }
    bool observer_pass() const noexcept { return observer.pass; }
    bool output_feedback_pass() const noexcept { return closed_loop.pass && observer.pass; }
};

GainReport gain_report(const SystemParams& params, double c1);

/// Flat key=value lines.
void write_gain_report(const GainReport& report, std::ostream& out);
std::string gain_report_text(const GainReport& report);

/// Column names and values for sweep aggregation, comma separated.
std::string gain_report_csv_header();
std::string gain_report_csv_row(const GainReport& report);

}  // namespace pebc
