// Command-line front end over the C API.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "pebc/pebc.h"

namespace {

constexpr int kExitOtherError = 1;

// Exit code: 0 pass, 2 condition failure, 3 divergence, 4 config error, 1 other.
int exit_code(pebc_status status) {
    switch (status) {
        case PEBC_OK: return 0;
        case PEBC_CONDITION_FAIL: return 2;
        case PEBC_DIVERGED: return 3;
        case PEBC_CONFIG_ERROR: return 4;
        default: return kExitOtherError;
    }
}

int report_error(pebc_status status) {
    const int line = pebc_last_error_line();
    if (line > 0) std::fprintf(stderr, "error: line %d: %s\n", line, pebc_last_error());
    else std::fprintf(stderr, "error: %s\n", pebc_last_error());
    return exit_code(status);
}

pebc_config* load(const std::string& path, pebc_status& status) {
    pebc_config* cfg = nullptr;
    status = pebc_config_load(path.c_str(), &cfg);
    return cfg;
}

int run_kernel(double c1, std::size_t n, const std::string& out) {
    pebc_kernel* k = nullptr;
    pebc_status s = pebc_kernel_build(c1, n, &k);
    if (s != PEBC_OK) return report_error(s);
    s = pebc_kernel_write_csv(k, out.c_str());
    pebc_kernel_free(k);
    return s == PEBC_OK ? 0 : report_error(s);
}

int run_check_gains(const std::string& path, const double* target_k1) {
    pebc_status s;
    pebc_config* cfg = load(path, s);
    if (s != PEBC_OK) return report_error(s);
    pebc_report* report = nullptr;
    s = pebc_check_gains(cfg, &report);
    if (report) std::fputs(pebc_report_text(report), stdout);
    pebc_report_free(report);
    if (s != PEBC_OK && s != PEBC_CONDITION_FAIL) {
        pebc_config_free(cfg);
        return report_error(s);
    }
    if (target_k1) {
        double c1 = 0.0;
        int feasible = 0;
        const pebc_status r = pebc_find_c1(cfg, *target_k1, 10.0, &c1, &feasible);
        if (r != PEBC_OK) {
            pebc_config_free(cfg);
            return report_error(r);
        }
        std::printf("target_K1=%.17g\n", *target_k1);
        if (feasible) {
            std::printf("target_feasible=true\nc1_for_target=%.17g\n", c1);
        } else {
            std::printf("target_feasible=false\n");
            s = PEBC_CONDITION_FAIL;
        }
    }
    pebc_config_free(cfg);
    return exit_code(s);
}

int run_simulate(const std::string& path) {
    pebc_status s;
    pebc_config* cfg = load(path, s);
    if (s != PEBC_OK) return report_error(s);
    pebc_report* report = nullptr;
    s = pebc_simulate(cfg, 1, &report);
    pebc_config_free(cfg);
    if (!report) return report_error(s);
    std::fputs(pebc_report_text(report), stdout);
    pebc_report_free(report);
    if (s == PEBC_DIVERGED) std::fprintf(stderr, "diverged: %s\n", pebc_last_error());
    return exit_code(s);
}

int run_sweep(const std::string& path, const std::string& vary, const std::string& out) {
    pebc_status s;
    pebc_config* cfg = load(path, s);
    if (s != PEBC_OK) return report_error(s);
    s = pebc_sweep(cfg, vary.c_str(), out.c_str());
    pebc_config_free(cfg);
    return s == PEBC_OK ? 0 : report_error(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary stabilization of coupled parabolic-elliptic systems"};
    app.set_version_flag("--version", std::string(pebc_version()));
    app.require_subcommand(1);

    double c1 = 2.0;
    std::size_t n = 201;
    std::string kernel_out = "-";
    auto* kernel = app.add_subcommand("kernel", "Build the control kernel and write it as CSV");
    kernel->add_option("--c1", c1, "Target damping c1 > 0")->required();
    kernel->add_option("--n", n, "Grid points")->required();
    kernel->add_option("--out", kernel_out, "Output CSV path, '-' for stdout");

    std::string config;
    double target_k1 = 0.0;
    auto* gains = app.add_subcommand("check-gains", "Print the gain report for a config");
    gains->add_option("--config", config, "Scenario config file")->required();
    auto* target_opt = gains->add_option("--target-k1", target_k1, "Search c1 <= 10 with K1 >= target");

    auto* sim = app.add_subcommand("simulate", "Run a scenario and write its trajectory");
    sim->add_option("--config", config, "Scenario config file")->required();

    std::string vary;
    std::string sweep_out = "-";
    auto* sweep = app.add_subcommand("sweep", "Run a scenario over a parameter grid");
    sweep->add_option("--config", config, "Scenario config file")->required();
    sweep->add_option("--vary", vary, "key=start:stop:count")->required();
    sweep->add_option("--out", sweep_out, "Output CSV path, '-' for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitOtherError;
    }

    if (*kernel) return run_kernel(c1, n, kernel_out);
    if (*gains) return run_check_gains(config, *target_opt ? &target_k1 : nullptr);
    if (*sim) return run_simulate(config);
    if (*sweep) return run_sweep(config, vary, sweep_out);
    return kExitOtherError;
}
