#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "pebc/error.hpp"
#include "pebc/scenario.hpp"

using namespace pebc;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "pebc_scenario_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

template <class Fn>
ConfigError config_error(Fn&& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected a config error");
    return ConfigError(ConfigErrorKind::io, -1, "");
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("minimal config takes the defaults") {
    const ScenarioConfig c = parse_config("mode = open_loop\n");
    CHECK(c.mode == ScenarioMode::open_loop);
    CHECK(c.rho == 1.0);
    CHECK(c.alpha == 0.0);
    CHECK(c.beta == 0.0);
    CHECK(c.gamma == 1.0);
    CHECK(c.c1 == 2.0);
    CHECK(c.grid_n == 201);
    CHECK(c.dt == 1e-4);
    CHECK(c.T == 5.0);
    CHECK(c.u0.to_string() == "cosine_mode(1, 1)");
    CHECK(c.observer_u0.to_string() == "constant(0)");
    CHECK(c.noise_std == 0.0);
    CHECK(c.workers == 1);
    CHECK(c.f1.kind() == NonlinearityKind::zero);
    CHECK(c.out == "trajectory.csv");
}

TEST_CASE("full config") {
    const ScenarioConfig c = parse_config(
        "# comment line\n"
        "rho = -0.2   # trailing comment\n"
        "alpha=0.3\n"
        "beta = 0.3\n"
        "gamma = 2\n"
        "f1 = tanh(0.3)\n"
        "f2 = sin(0.2)\n"
        "f3 = sat(0.5)\n"
        "c1 = 1.5\n"
        "grid_n = 101\n"
        "dt = 1e-3\n"
        "T = 2\n"
        "mode = output_feedback\n"
        "u0 = gaussian_bump(0.3, 0.1, 2)\n"
        "observer_u0 = constant(0.5)\n"
        "out = run.csv\n"
        "seed = 17\n"
        "noise_std = 0.01\n"
        "workers = 3\n");
    CHECK(c.rho == -0.2);
    CHECK(c.f1.kind() == NonlinearityKind::scaled_tanh);
    CHECK(c.f1.gain() == 0.3);
    CHECK(c.f3.kind() == NonlinearityKind::saturation);
    CHECK(c.mode == ScenarioMode::output_feedback);
    CHECK(c.u0.kind() == InitialCondition::Kind::gaussian_bump);
    CHECK(c.seed == 17);
    CHECK(c.workers == 3);
    CHECK(c.params().m3() == 0.5);
}

TEST_CASE("config errors carry a kind and a line") {
    auto unknown = config_error([] { parse_config("rho = 1\nkappa = 2\n"); });
    CHECK(unknown.kind() == ConfigErrorKind::unknown_key);
    CHECK(unknown.line() == 2);

    auto bad = config_error([] { parse_config("\n\nrho = one\n"); });
    CHECK(bad.kind() == ConfigErrorKind::malformed_value);
    CHECK(bad.line() == 3);

    CHECK(config_error([] { parse_config("f1 = cube(2)\n"); }).kind() == ConfigErrorKind::malformed_value);
    CHECK(config_error([] { parse_config("mode = closed\n"); }).kind() == ConfigErrorKind::malformed_value);
    CHECK(config_error([] { parse_config("just text\n"); }).kind() == ConfigErrorKind::malformed_value);
    CHECK(config_error([] { parse_config("rho = 1\nrho = 2\n"); }).line() == 2);
    CHECK(config_error([] { parse_config("u0 = cosine_mode(1.5, 1)\n"); }).kind() ==
          ConfigErrorKind::malformed_value);

    auto resonance = config_error([] { parse_config("mode = open_loop\ngamma = -9.8696\n"); });
    CHECK(resonance.kind() == ConfigErrorKind::invariant_violation);
    CHECK(resonance.line() == 2);

    auto grid = config_error([] { parse_config("grid_n = 50\n"); });
    CHECK(grid.kind() == ConfigErrorKind::invariant_violation);
    CHECK(grid.line() == 1);
    CHECK(config_error([] { parse_config("dt = 0.02\n"); }).kind() == ConfigErrorKind::invariant_violation);
    CHECK(config_error([] { parse_config("T = 0\n"); }).kind() == ConfigErrorKind::invariant_violation);
    CHECK(config_error([] { parse_config("c1 = -1\n"); }).kind() == ConfigErrorKind::invariant_violation);
    CHECK(config_error([] { parse_config("alpha = inf\n"); }).kind() == ConfigErrorKind::malformed_value);
    CHECK(config_error([] { load_config("/nonexistent/pebc.cfg"); }).kind() == ConfigErrorKind::io);
}

TEST_CASE("initial condition recipes") {
    const Grid g(11);
    const double pi = std::numbers::pi;
    const Field c = parse_initial_condition("constant(2.5)").sample(g);
    CHECK(c[7] == 2.5);
    const Field m = parse_initial_condition("cosine_mode(2, 0.5)").sample(g);
    CHECK(m[3] == doctest::Approx(0.5 * std::cos(2 * pi * 0.3)));
    const Field b = parse_initial_condition("gaussian_bump(0.5, 0.1, 3)").sample(g);
    CHECK(b[5] == 3.0);
    CHECK(b[6] == doctest::Approx(3 * std::exp(-0.5)));
    CHECK_THROWS_AS(parse_initial_condition("gaussian_bump(0.5, 0, 3)"), Error);
    CHECK_THROWS_AS(parse_initial_condition("constant(1, 2)"), Error);
    CHECK_THROWS_AS(parse_initial_condition("spike(1)"), Error);
}

TEST_CASE("initial condition from csv") {
    const fs::path dir = scratch_dir();
    {
        std::ofstream out(dir / "values.csv");
        out << "u\n";
        for (int i = 0; i < 11; ++i) out << i * 0.1 << '\n';
    }
    {
        std::ofstream out(dir / "pairs.csv");
        out << "x,u\n0,0\n0.5,1\n1,0\n";
    }
    const Grid g(11);
    const Field v = parse_initial_condition("from_csv(values.csv)", dir).sample(g);
    CHECK(v[4] == doctest::Approx(0.4));
    const Field p = parse_initial_condition("from_csv(pairs.csv)", dir).sample(g);
    CHECK(p[5] == doctest::Approx(1.0));
    CHECK(p[2] == doctest::Approx(0.4));
    CHECK_THROWS_AS(parse_initial_condition("from_csv(values.csv)", dir).sample(Grid(12)), Error);
    CHECK_THROWS_AS(parse_initial_condition("from_csv(missing.csv)", dir).sample(g), Error);

    std::ofstream(dir / "run.cfg") << "u0 = from_csv(pairs.csv)\ngrid_n = 51\n";
    const ScenarioConfig cfg = load_config(dir / "run.cfg");
    CHECK(cfg.u0.path() == dir / "pairs.csv");
}

TEST_CASE("zero data gives a report without a fit") {
    const fs::path out = scratch_dir() / "zero.csv";
    ScenarioConfig cfg = parse_config("mode = state_feedback\nrho = -0.5\nu0 = constant(0)\ngrid_n = 51\n"
                                      "dt = 1e-3\nT = 0.5\n");
    cfg.out = out.string();
    const ScenarioResult r = run_scenario(cfg);
    CHECK_FALSE(r.fit);
    CHECK_FALSE(r.fit_note.empty());
    CHECK(r.status == ScenarioStatus::pass);
    for (double n : r.trajectory.norm_u) CHECK(n == 0.0);
    const std::string csv = slurp(out);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 502);  // header + ceil(T/dt) + 1
}

TEST_CASE("every mode keeps zero data at zero") {
    for (const char* mode : {"open_loop", "state_feedback", "observer_only", "output_feedback", "target_system"}) {
        ScenarioConfig cfg = parse_config(std::string("mode = ") + mode +
                                          "\nu0 = constant(0)\ngrid_n = 51\ndt = 1e-3\nT = 0.2\n");
        const ScenarioResult r = run_scenario(cfg, RunOptions{false, true});
        for (double n : r.trajectory.norm_u) CHECK(n == 0.0);
        for (double n : r.trajectory.norm_err_u) CHECK(n == 0.0);
    }
}

TEST_CASE("state feedback demo passes") {
    ScenarioConfig cfg = parse_config("mode = state_feedback\nrho = -0.5\nu0 = constant(1)\ngrid_n = 101\n"
                                      "dt = 1e-3\nT = 5\n");
    const ScenarioResult r = run_scenario(cfg, RunOptions{false, false});
    REQUIRE(r.fit);
    CHECK(r.status == ScenarioStatus::pass);
    CHECK(r.guaranteed_rate == 1.5);
    CHECK(r.fit->rate >= 1.4);
    std::ostringstream os;
    write_scenario_report(cfg, r, os);
    CHECK(os.str().find("status=pass\n") != std::string::npos);
    CHECK(os.str().find("mode=state_feedback\n") != std::string::npos);
}

TEST_CASE("unstable open loop fails its condition") {
    ScenarioConfig cfg = parse_config("mode = open_loop\nrho = -0.5\nu0 = constant(1)\ngrid_n = 51\n"
                                      "dt = 1e-3\nT = 1\n");
    const ScenarioResult r = run_scenario(cfg, RunOptions{false, false});
    CHECK(r.status == ScenarioStatus::condition_fail);
    CHECK_FALSE(r.condition_pass);
}

TEST_CASE("blow-up has its own status") {
    ScenarioConfig cfg = parse_config("mode = open_loop\nrho = -100\nu0 = constant(1)\ngrid_n = 51\n"
                                      "dt = 1e-3\nT = 1\n");
    const ScenarioResult r = run_scenario(cfg, RunOptions{false, false});
    CHECK(r.status == ScenarioStatus::diverged);
    CHECK_FALSE(r.divergence.empty());
}

TEST_CASE("identical configs give identical files") {
    const fs::path dir = scratch_dir();
    ScenarioConfig cfg = parse_config("mode = output_feedback\nrho = -0.5\nu0 = constant(1)\ngrid_n = 51\n"
                                      "dt = 1e-3\nT = 0.5\nnoise_std = 0.01\nseed = 5\n");
    cfg.out = (dir / "a.csv").string();
    run_scenario(cfg);
    cfg.out = (dir / "b.csv").string();
    run_scenario(cfg);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv").find(",,,,") == std::string::npos);
}

TEST_CASE("sweep axis") {
    const SweepAxis a = parse_sweep_axis("c1=0.1:10:25");
    CHECK(a.key == "c1");
    REQUIRE(a.values.size() == 25);
    CHECK(a.values.front() == 0.1);
    CHECK(a.values.back() == 10.0);
    CHECK(a.values[1] == doctest::Approx(0.1 + 9.9 / 24));
    CHECK(parse_sweep_axis("rho=3").values == std::vector<double>{3.0});
    CHECK_THROWS_AS(parse_sweep_axis("c1"), Error);
    CHECK_THROWS_AS(parse_sweep_axis("c1=1:2"), Error);
    CHECK_THROWS_AS(parse_sweep_axis("c1=1:2:0"), Error);
}

TEST_CASE("sweep keeps axis order across workers") {
    ScenarioConfig cfg = parse_config("mode = state_feedback\nrho = -0.5\nu0 = constant(1)\ngrid_n = 51\n"
                                      "dt = 1e-3\nT = 1\nworkers = 3\n");
    const SweepAxis axis = parse_sweep_axis("c1=0.5:3:6");
    const auto rows = run_sweep(cfg, axis);
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].value == axis.values[i]);
        CHECK(rows[i].result.report.c1 == axis.values[i]);
        CHECK(rows[i].result.report.closed_loop.k1 == doctest::Approx(axis.values[i] - 0.5));
    }
    std::ostringstream os;
    write_sweep_csv(axis, rows, os);
    const std::string csv = os.str();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    CHECK(csv.rfind("c1,c1,M,", 0) == 0);

    cfg.workers = 1;
    std::ostringstream serial;
    write_sweep_csv(axis, run_sweep(cfg, axis), serial);
    CHECK(serial.str() == csv);
    CHECK_THROWS_AS(run_sweep(cfg, parse_sweep_axis("kappa=1")), ConfigError);
    CHECK_THROWS_AS(run_sweep(cfg, parse_sweep_axis("grid_n=10:20:2")), ConfigError);
}

}
