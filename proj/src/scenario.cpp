#include "pebc/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "pebc/error.hpp"
#include "pebc/format.hpp"
#include "pebc/kernel.hpp"

namespace pebc {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

ConfigError malformed(int line, const std::string& what) {
    return ConfigError(ConfigErrorKind::malformed_value, line, what);
}

ConfigError violated(int line, const std::string& what) {
    return ConfigError(ConfigErrorKind::invariant_violation, line, what);
}

double parse_real(std::string_view key, std::string_view value, int line) {
    const auto v = to_double(value);
    if (!v || !std::isfinite(*v)) {
        throw malformed(line, std::string(key) + ": expected a finite number, got '" +
                                  std::string(value) + "'");
    }
    return *v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view value, int line) {
    value = trim(value);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec == std::errc() && ptr == value.data() + value.size() && !value.empty()) return v;
    // Accept integral reals such as "201.0" produced by sweeps.
    const auto d = to_double(value);
    if (d && *d >= 0.0 && std::floor(*d) == *d && *d < 1.8e19) return static_cast<std::uint64_t>(*d);
    throw malformed(line, std::string(key) + ": expected a non-negative integer, got '" +
                              std::string(value) + "'");
}

// Splits "name(a, b, c)" into name and argument strings.
bool split_call(std::string_view text, std::string_view& name, std::vector<std::string_view>& args) {
    text = trim(text);
    const auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') return false;
    name = trim(text.substr(0, open));
    std::string_view inner = text.substr(open + 1, text.size() - open - 2);
    args.clear();
    if (trim(inner).empty()) return true;
    while (true) {
        const auto comma = inner.find(',');
        args.push_back(trim(inner.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        inner.remove_prefix(comma + 1);
    }
    return true;
}

Field read_csv_field(const std::filesystem::path& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open initial condition file " + path.string());
    std::vector<double> xs;
    std::vector<double> ys;
    std::string line;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        std::string_view s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        std::vector<double> row;
        bool numeric = true;
        while (true) {
            const auto comma = s.find(',');
            const auto v = to_double(s.substr(0, comma));
            if (!v) {
                numeric = false;
                break;
            }
            row.push_back(*v);
            if (comma == std::string_view::npos) break;
            s.remove_prefix(comma + 1);
        }
        if (!numeric) {
            if (xs.empty() && ys.empty()) continue;  // header
            throw Error(ErrorCode::io, path.string() + ": non-numeric row '" + line + "'");
        }
        if (columns == 0) columns = row.size();
        if (row.size() != columns || columns > 2) {
            throw Error(ErrorCode::io, path.string() + ": expected 1 or 2 columns consistently");
        }
        if (columns == 2) xs.push_back(row[0]);
        ys.push_back(row.back());
    }
    if (columns == 1) {
        if (ys.size() != grid.size()) {
            throw Error(ErrorCode::grid_mismatch, path.string() + " has " + std::to_string(ys.size()) +
                                                      " values for a grid of " +
                                                      std::to_string(grid.size()) + " points");
        }
        return Field(grid, std::move(ys));
    }
    if (xs.size() < 2) throw Error(ErrorCode::io, path.string() + ": need at least two rows");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) {
            throw Error(ErrorCode::io, path.string() + ": x column must be strictly increasing");
        }
    }
    if (xs.front() > 0.0 || xs.back() < 1.0) {
        throw Error(ErrorCode::io, path.string() + ": x column must cover [0, 1]");
    }
    return Field::sample(grid, [&](double x) {
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        if (it == xs.end()) return ys.back();
        const auto k = static_cast<std::size_t>(it - xs.begin());
        if (k == 0) return ys.front();
        const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
        return (1.0 - w) * ys[k - 1] + w * ys[k];
    });
}

}  // namespace

std::string to_string(ScenarioMode mode) {
    switch (mode) {
        case ScenarioMode::open_loop: return "open_loop";
        case ScenarioMode::state_feedback: return "state_feedback";
        case ScenarioMode::observer_only: return "observer_only";
        case ScenarioMode::output_feedback: return "output_feedback";
        case ScenarioMode::target_system: return "target_system";
    }
    return "unknown";
}

ScenarioMode parse_mode(std::string_view text) {
    text = trim(text);
    for (auto m : {ScenarioMode::open_loop, ScenarioMode::state_feedback, ScenarioMode::observer_only,
                   ScenarioMode::output_feedback, ScenarioMode::target_system}) {
        if (text == to_string(m)) return m;
    }
    throw Error(ErrorCode::invalid_argument, "unknown mode '" + std::string(text) + "'");
}

InitialCondition InitialCondition::constant(double a) {
    InitialCondition ic;
    ic.kind_ = Kind::constant;
    ic.args_ = {a};
    return ic;
}

InitialCondition InitialCondition::cosine_mode(int m, double a) {
    if (m < 0) throw Error(ErrorCode::invalid_argument, "cosine_mode index must be non-negative");
    InitialCondition ic;
    ic.kind_ = Kind::cosine_mode;
    ic.args_ = {static_cast<double>(m), a};
    return ic;
}

InitialCondition InitialCondition::gaussian_bump(double center, double width, double a) {
    if (!(width > 0.0)) throw Error(ErrorCode::invalid_argument, "gaussian_bump width must be positive");
    InitialCondition ic;
    ic.kind_ = Kind::gaussian_bump;
    ic.args_ = {center, width, a};
    return ic;
}

InitialCondition InitialCondition::from_csv(std::filesystem::path path) {
    InitialCondition ic;
    ic.kind_ = Kind::from_csv;
    ic.args_.clear();
    ic.path_ = std::move(path);
    return ic;
}

Field InitialCondition::sample(const Grid& grid) const {
    switch (kind_) {
        case Kind::constant: {
            const double a = args_[0];
            return Field::sample(grid, [a](double) { return a; });
        }
        case Kind::cosine_mode: {
            const double m = args_[0];
            const double a = args_[1];
            return Field::sample(grid, [m, a](double x) { return a * std::cos(m * std::numbers::pi * x); });
        }
        case Kind::gaussian_bump: {
            const double c = args_[0];
            const double w = args_[1];
            const double a = args_[2];
            return Field::sample(grid, [c, w, a](double x) {
                const double d = (x - c) / w;
                return a * std::exp(-0.5 * d * d);
            });
        }
        case Kind::from_csv: return read_csv_field(path_, grid);
    }
    return Field(grid);
}

std::string InitialCondition::to_string() const {
    switch (kind_) {
        case Kind::constant: return "constant(" + format_double(args_[0]) + ")";
        case Kind::cosine_mode:
            return "cosine_mode(" + format_double(args_[0]) + ", " + format_double(args_[1]) + ")";
        case Kind::gaussian_bump:
            return "gaussian_bump(" + format_double(args_[0]) + ", " + format_double(args_[1]) + ", " +
                   format_double(args_[2]) + ")";
        case Kind::from_csv: return "from_csv(" + path_.string() + ")";
    }
    return {};
}

InitialCondition parse_initial_condition(std::string_view text, const std::filesystem::path& base_dir) {
    std::string_view name;
    std::vector<std::string_view> args;
    if (!split_call(text, name, args)) {
        throw Error(ErrorCode::invalid_argument,
                    "expected recipe(args...), got '" + std::string(trim(text)) + "'");
    }
    auto number = [&](std::size_t i) {
        const auto v = to_double(args[i]);
        if (!v || !std::isfinite(*v)) {
            throw Error(ErrorCode::invalid_argument,
                        std::string(name) + ": bad argument '" + std::string(args[i]) + "'");
        }
        return *v;
    };
    auto arity = [&](std::size_t n) {
        if (args.size() != n) {
            throw Error(ErrorCode::invalid_argument, std::string(name) + " takes " + std::to_string(n) +
                                                         " argument(s), got " + std::to_string(args.size()));
        }
    };
    if (name == "constant") {
        arity(1);
        return InitialCondition::constant(number(0));
    }
    if (name == "cosine_mode") {
        arity(2);
        const double m = number(0);
        if (m < 0.0 || std::floor(m) != m || m > 1e6) {
            throw Error(ErrorCode::invalid_argument, "cosine_mode index must be a non-negative integer");
        }
        return InitialCondition::cosine_mode(static_cast<int>(m), number(1));
    }
    if (name == "gaussian_bump") {
        arity(3);
        return InitialCondition::gaussian_bump(number(0), number(1), number(2));
    }
    if (name == "from_csv") {
        arity(1);
        std::filesystem::path p{std::string(args[0])};
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        return InitialCondition::from_csv(std::move(p));
    }
    throw Error(ErrorCode::invalid_argument, "unknown initial condition '" + std::string(name) + "'");
}

SystemParams ScenarioConfig::params() const { return SystemParams(rho, alpha, beta, gamma, f1, f2, f3); }

namespace {

struct InvariantProblem {
    const char* key;
    std::string message;
};

std::optional<InvariantProblem> find_invariant_problem(const ScenarioConfig& c) {
    if (c.grid_n < 51) return InvariantProblem{"grid_n", "grid_n must be at least 51, got " + std::to_string(c.grid_n)};
    if (!(c.dt > 0.0) || c.dt > 0.01) return InvariantProblem{"dt", "dt must lie in (0, 0.01], got " + format_double(c.dt)};
    if (!(c.T > 0.0)) return InvariantProblem{"T", "T must be positive, got " + format_double(c.T)};
    if (!(c.c1 > 0.0)) return InvariantProblem{"c1", "c1 must be positive, got " + format_double(c.c1)};
    if (!(c.noise_std >= 0.0)) return InvariantProblem{"noise_std", "noise_std must be non-negative"};
    if (c.workers == 0) return InvariantProblem{"workers", "workers must be at least 1"};
    try {
        (void)c.params();
    } catch (const Error& e) {
        return InvariantProblem{e.code() == ErrorCode::near_resonance ? "gamma" : "", e.what()};
    }
    return std::nullopt;
}

}  // namespace

void ScenarioConfig::validate() const {
    if (auto problem = find_invariant_problem(*this)) throw violated(0, problem->message);
}

void set_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value, int line) {
    value = trim(value);
    auto nonlinearity = [&]() {
        try {
            return parse_nonlinearity(value);
        } catch (const Error& e) {
            throw malformed(line, std::string(key) + ": " + e.what());
        }
    };
    auto recipe = [&]() {
        try {
            return parse_initial_condition(value, cfg.base_dir);
        } catch (const Error& e) {
            throw malformed(line, std::string(key) + ": " + e.what());
        }
    };
    if (key == "rho") cfg.rho = parse_real(key, value, line);
    else if (key == "alpha") cfg.alpha = parse_real(key, value, line);
    else if (key == "beta") cfg.beta = parse_real(key, value, line);
    else if (key == "gamma") cfg.gamma = parse_real(key, value, line);
    else if (key == "c1") cfg.c1 = parse_real(key, value, line);
    else if (key == "grid_n") cfg.grid_n = static_cast<std::size_t>(parse_unsigned(key, value, line));
    else if (key == "dt") cfg.dt = parse_real(key, value, line);
    else if (key == "T") cfg.T = parse_real(key, value, line);
    else if (key == "mode") {
        try {
            cfg.mode = parse_mode(value);
        } catch (const Error& e) {
            throw malformed(line, std::string("mode: ") + e.what());
        }
    } else if (key == "f1") cfg.f1 = nonlinearity();
    else if (key == "f2") cfg.f2 = nonlinearity();
    else if (key == "f3") cfg.f3 = nonlinearity();
    else if (key == "u0") cfg.u0 = recipe();
    else if (key == "observer_u0") cfg.observer_u0 = recipe();
    else if (key == "out") {
        if (value.empty()) throw malformed(line, "out: empty path");
        cfg.out = std::string(value);
    } else if (key == "seed") cfg.seed = parse_unsigned(key, value, line);
    else if (key == "noise_std") cfg.noise_std = parse_real(key, value, line);
    else if (key == "workers") {
        const auto w = parse_unsigned(key, value, line);
        if (w > 1024) throw malformed(line, "workers: at most 1024");
        cfg.workers = static_cast<unsigned>(w);
    } else {
        throw ConfigError(ConfigErrorKind::unknown_key, line, "unknown key '" + std::string(key) + "'");
    }
}

ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    ScenarioConfig cfg;
    cfg.base_dir = base_dir;
    std::map<std::string, int, std::less<>> seen;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw malformed(line_no, "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw malformed(line_no, "missing key before '='");
        if (auto it = seen.find(key); it != seen.end()) {
            throw malformed(line_no, "duplicate key '" + std::string(key) + "' (first on line " +
                                         std::to_string(it->second) + ")");
        }
        set_config_value(cfg, key, value, line_no);
        seen.emplace(std::string(key), line_no);
    }
    if (auto problem = find_invariant_problem(cfg)) {
        const auto it = seen.find(std::string_view(problem->key));
        throw violated(it == seen.end() ? 0 : it->second, problem->message);
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(ConfigErrorKind::io, 0, "cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

std::string to_string(ScenarioStatus status) {
    switch (status) {
        case ScenarioStatus::pass: return "pass";
        case ScenarioStatus::condition_fail: return "condition_fail";
        case ScenarioStatus::diverged: return "diverged";
    }
    return "unknown";
}

bool applicable_condition(const GainReport& report, ScenarioMode mode) {
    switch (mode) {
        case ScenarioMode::open_loop: return report.open_loop_pass();
        case ScenarioMode::state_feedback:
        case ScenarioMode::target_system: return report.closed_loop_pass();
        case ScenarioMode::observer_only: return report.observer_pass();
        case ScenarioMode::output_feedback: return report.output_feedback_pass();
    }
    return false;
}

namespace {

std::optional<double> guaranteed_rate(const GainReport& report, ScenarioMode mode) {
    switch (mode) {
        case ScenarioMode::open_loop: return report.open_loop.margin;
        case ScenarioMode::state_feedback:
        case ScenarioMode::target_system: return report.closed_loop.k1;
        case ScenarioMode::observer_only: return report.observer.k3;
        case ScenarioMode::output_feedback: return std::nullopt;
    }
    return std::nullopt;
}

// Norm series the decay audit looks at for each mode.
std::vector<double> audited_norm(const Trajectory& traj, ScenarioMode mode) {
    switch (mode) {
        case ScenarioMode::observer_only: return traj.norm_err_u;
        case ScenarioMode::output_feedback: {
            std::vector<double> joint(traj.size());
            for (std::size_t i = 0; i < joint.size(); ++i) joint[i] = traj.norm_u[i] + traj.norm_err_u[i];
            return joint;
        }
        default: return traj.norm_u;
    }
}

Trajectory run_dynamics(const ScenarioConfig& cfg, const SystemParams& params) {
    const Grid grid(cfg.grid_n);
    const Field u0 = cfg.u0.sample(grid);
    if (cfg.mode == ScenarioMode::open_loop) {
        return simulate(params, u0, feedback_policy(Controller::open_loop()), cfg.T, cfg.dt);
    }
    KernelConfig kc;
    kc.c1 = cfg.c1;
    Kernel k = build_kernel(kc, grid);
    switch (cfg.mode) {
        case ScenarioMode::state_feedback:
            return simulate(params, u0, feedback_policy(Controller::state_feedback(k)), cfg.T, cfg.dt);
        case ScenarioMode::target_system: {
            const Kernel l = invert_kernel(k);
            return simulate_target(params, k, l, forward_transform(k, u0), cfg.T, cfg.dt);
        }
        case ScenarioMode::observer_only:
        case ScenarioMode::output_feedback: {
            const bool output = cfg.mode == ScenarioMode::output_feedback;
            const Controller ctrl = output ? Controller::output_feedback(std::move(k))
                                           : Controller::state_feedback(std::move(k));
            JointOptions opts;
            opts.noise_std = cfg.noise_std;
            opts.seed = cfg.seed;
            return simulate_with_observer(params, ctrl, u0, cfg.observer_u0.sample(grid),
                                          output ? ObserverLoop::output_feedback
                                                 : ObserverLoop::state_feedback,
                                          cfg.T, cfg.dt, opts)
                .trajectory;
        }
        default: break;
    }
    return {};
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
    cfg.validate();
    const SystemParams params = cfg.params();
    ScenarioResult r;
    r.report = gain_report(params, cfg.c1);
    r.condition_pass = applicable_condition(r.report, cfg.mode);
    r.guaranteed_rate = guaranteed_rate(r.report, cfg.mode);

    Trajectory traj;
    try {
        traj = run_dynamics(cfg, params);
    } catch (const DivergenceError& e) {
        r.status = ScenarioStatus::diverged;
        r.divergence = e.what();
        return r;
    }

    if (options.write_csv) {
        std::ofstream out(cfg.out);
        if (!out) throw Error(ErrorCode::io, "cannot write trajectory to " + cfg.out);
        write_trajectory_csv(traj, out);
        if (!out) throw Error(ErrorCode::io, "failed writing trajectory to " + cfg.out);
    }

    const std::vector<double> norms = audited_norm(traj, cfg.mode);
    try {
        r.fit = fit_decay(traj.t, norms);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::degenerate_fit) throw;
        r.fit_note = e.what();
    }

    if (!r.fit) {
        // Nothing to audit; the report stands alone.
        r.decay_pass = true;
    } else if (r.guaranteed_rate) {
        const double g = *r.guaranteed_rate;
        r.decay_pass = r.fit->rate >= g - 0.05 * std::abs(g) - 0.05;
    } else {
        r.decay_pass = r.fit->rate > 0.0 && r.fit->r_squared >= 0.99;
    }
    r.status = r.condition_pass && r.decay_pass ? ScenarioStatus::pass : ScenarioStatus::condition_fail;
    if (options.keep_trajectory) r.trajectory = std::move(traj);
    return r;
}

void write_scenario_report(const ScenarioConfig& cfg, const ScenarioResult& result, std::ostream& out) {
    write_gain_report(result.report, out);
    out << "mode=" << to_string(cfg.mode) << '\n';
    out << "condition_pass=" << (result.condition_pass ? "true" : "false") << '\n';
    if (result.guaranteed_rate) out << "guaranteed_rate=" << format_double(*result.guaranteed_rate) << '\n';
    if (result.fit) {
        out << "fitted_rate=" << format_double(result.fit->rate) << '\n';
        out << "fit_r_squared=" << format_double(result.fit->r_squared) << '\n';
        out << "fit_window=" << format_double(result.fit->t_start) << ':' << format_double(result.fit->t_end)
            << '\n';
    } else if (!result.fit_note.empty()) {
        out << "fit=rejected (" << result.fit_note << ")\n";
    }
    if (result.status != ScenarioStatus::diverged) {
        out << "decay_pass=" << (result.decay_pass ? "true" : "false") << '\n';
    } else {
        out << "divergence=" << result.divergence << '\n';
    }
    out << "status=" << to_string(result.status) << '\n';
}

SweepAxis parse_sweep_axis(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw Error(ErrorCode::invalid_argument, "sweep axis must look like key=start:stop:count");
    }
    SweepAxis axis;
    axis.key = std::string(trim(text.substr(0, eq)));
    std::string_view spec = trim(text.substr(eq + 1));
    std::vector<std::string_view> parts;
    while (true) {
        const auto colon = spec.find(':');
        parts.push_back(trim(spec.substr(0, colon)));
        if (colon == std::string_view::npos) break;
        spec.remove_prefix(colon + 1);
    }
    auto number = [&](std::string_view s) {
        const auto v = to_double(s);
        if (!v || !std::isfinite(*v)) {
            throw Error(ErrorCode::invalid_argument, "bad sweep value '" + std::string(s) + "'");
        }
        return *v;
    };
    if (axis.key.empty()) throw Error(ErrorCode::invalid_argument, "sweep axis has no key");
    if (parts.size() == 1) {
        axis.values = {number(parts[0])};
    } else if (parts.size() == 3) {
        const double start = number(parts[0]);
        const double stop = number(parts[1]);
        const double count = number(parts[2]);
        if (count < 1.0 || std::floor(count) != count || count > 1e6) {
            throw Error(ErrorCode::invalid_argument, "sweep count must be a positive integer");
        }
        const auto n = static_cast<std::size_t>(count);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
            axis.values.push_back(i + 1 == n && n > 1 ? stop : start + w * (stop - start));
        }
    } else {
        throw Error(ErrorCode::invalid_argument, "sweep axis must look like key=start:stop:count");
    }
    return axis;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const SweepAxis& axis) {
    std::vector<ScenarioConfig> configs;
    configs.reserve(axis.values.size());
    for (double v : axis.values) {
        ScenarioConfig c = cfg;
        set_config_value(c, axis.key, format_double(v));
        c.validate();
        configs.push_back(std::move(c));
    }

    std::vector<SweepRow> rows(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                rows[i] = SweepRow{axis.values[i], run_scenario(configs[i], RunOptions{false, false})};
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::min<std::size_t>(std::max(1u, cfg.workers), configs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

void write_sweep_csv(const SweepAxis& axis, const std::vector<SweepRow>& rows, std::ostream& out) {
    out << axis.key << ',' << gain_report_csv_header() << ",fitted_rate,fit_r_squared,status\n";
    for (const auto& row : rows) {
        const auto& r = row.result;
        out << format_double(row.value) << ',' << gain_report_csv_row(r.report) << ',';
        if (r.fit) out << format_double(r.fit->rate) << ',' << format_double(r.fit->r_squared);
        else out << ',';
        out << ',' << to_string(r.status) << '\n';
    }
}

}  // namespace pebc
