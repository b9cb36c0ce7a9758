#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pebc/analysis.hpp"
#include "pebc/control.hpp"
#include "pebc/nonlinearity.hpp"
#include "pebc/pde.hpp"

namespace pebc {

enum class ScenarioMode { open_loop, state_feedback, observer_only, output_feedback, target_system };

std::string to_string(ScenarioMode mode);
ScenarioMode parse_mode(std::string_view text);

/// Initial-condition recipe:
///   constant(a)             a
///   cosine_mode(m, a)       a cos(m pi x)
///   gaussian_bump(c, w, a)  a exp(-(x - c)^2 / (2 w^2))
///   from_csv(path)          one value per node, or x,value rows interpolated
class InitialCondition {
public:
    enum class Kind { constant, cosine_mode, gaussian_bump, from_csv };

    static InitialCondition constant(double a);
    static InitialCondition cosine_mode(int m, double a);
    static InitialCondition gaussian_bump(double center, double width, double a);
    static InitialCondition from_csv(std::filesystem::path path);

    Kind kind() const noexcept { return kind_; }
    const std::vector<double>& args() const noexcept { return args_; }
    const std::filesystem::path& path() const noexcept { return path_; }

    Field sample(const Grid& grid) const;
    std::string to_string() const;

private:
    Kind kind_ = Kind::constant;
    std::vector<double> args_{0.0};
    std::filesystem::path path_;
};

/// Relative from_csv paths resolve against base_dir.
InitialCondition parse_initial_condition(std::string_view text,
                                         const std::filesystem::path& base_dir = {});

struct ScenarioConfig {
    double rho = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 1.0;
    Nonlinearity f1;
    Nonlinearity f2;
    Nonlinearity f3;
    double c1 = 2.0;
    std::size_t grid_n = 201;
    double dt = 1e-4;
    double T = 5.0;
    ScenarioMode mode = ScenarioMode::open_loop;
    InitialCondition u0 = InitialCondition::cosine_mode(1, 1.0);
    InitialCondition observer_u0 = InitialCondition::constant(0.0);
    std::string out = "trajectory.csv";
    std::uint64_t seed = 0;
    double noise_std = 0.0;
    unsigned workers = 1;
    std::filesystem::path base_dir;

    SystemParams params() const;
    /// Throws ConfigError(invariant_violation).
    void validate() const;
};

/// Flat "key = value" lines; '#' starts a comment. Throws ConfigError with
/// the 1-based line of the first problem.
ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

/// Assigns one key as the parser would, without re-validating the whole config.
void set_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value,
                      int line = 0);

enum class ScenarioStatus { pass = 0, condition_fail = 2, diverged = 3 };

std::string to_string(ScenarioStatus status);

/// Condition of the result that applies to a mode.
bool applicable_condition(const GainReport& report, ScenarioMode mode);

struct ScenarioResult {
    GainReport report;
    ScenarioStatus status = ScenarioStatus::pass;
    bool condition_pass = false;
    /// Empty when the fit was rejected (for example zero data).
    std::optional<DecayFit> fit;
    std::string fit_note;
    /// Rate the applicable result guarantees; empty for output feedback.
    std::optional<double> guaranteed_rate;
    bool decay_pass = false;
    std::string divergence;
    Trajectory trajectory;
};

struct RunOptions {
    bool write_csv = true;
    bool keep_trajectory = true;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});

/// Report block: the gain report followed by mode, fit and status lines.
void write_scenario_report(const ScenarioConfig& cfg, const ScenarioResult& result,
                           std::ostream& out);

/// "key=start:stop:count" (inclusive linear grid) or "key=value".
struct SweepAxis {
    std::string key;
    std::vector<double> values;
};

SweepAxis parse_sweep_axis(std::string_view text);

struct SweepRow {
    double value = 0.0;
    ScenarioResult result;
};

/// Runs one scenario per axis value on cfg.workers threads; rows keep axis
/// order and no trajectory files are written.
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const SweepAxis& axis);

void write_sweep_csv(const SweepAxis& axis, const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace pebc
