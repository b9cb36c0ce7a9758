#include "pebc/pebc.h"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "pebc/analysis.hpp"
#include "pebc/error.hpp"
#include "pebc/kernel.hpp"
#include "pebc/scenario.hpp"

struct pebc_kernel {
    pebc::Kernel kernel;
};

struct pebc_config {
    pebc::ScenarioConfig config;
};

struct pebc_report {
    std::string text;
    bool pass = false;
};

namespace {

thread_local std::string last_error;
thread_local int last_error_line = 0;

pebc_status fail(pebc_status status, const std::string& message, int line = 0) {
    last_error = message;
    last_error_line = line;
    return status;
}

pebc_status status_for(pebc::ErrorCode code) {
    switch (code) {
        case pebc::ErrorCode::invalid_argument:
        case pebc::ErrorCode::grid_mismatch: return PEBC_INVALID_ARGUMENT;
        case pebc::ErrorCode::not_converged:
        case pebc::ErrorCode::near_resonance:
        case pebc::ErrorCode::degenerate_fit: return PEBC_NUMERICAL;
        case pebc::ErrorCode::divergence: return PEBC_DIVERGED;
        case pebc::ErrorCode::config: return PEBC_CONFIG_ERROR;
        case pebc::ErrorCode::io: return PEBC_IO;
    }
    return PEBC_INTERNAL;
}

// Runs fn, translating exceptions into status codes and the thread-local message.
template <class Fn>
pebc_status guarded(Fn&& fn) {
    last_error.clear();
    last_error_line = 0;
    try {
        return fn();
    } catch (const pebc::ConfigError& e) {
        return fail(PEBC_CONFIG_ERROR, e.what(), e.line());
    } catch (const pebc::Error& e) {
        return fail(status_for(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(PEBC_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(PEBC_INTERNAL, e.what());
    } catch (...) {
        return fail(PEBC_INTERNAL, "unknown error");
    }
}

pebc_status require(bool ok, const char* what) {
    return ok ? PEBC_OK : fail(PEBC_INVALID_ARGUMENT, what);
}

template <class Fn>
pebc_status with_output(const char* path, Fn&& write) {
    if (std::string(path) == "-") {
        write(std::cout);
        std::cout.flush();
        return PEBC_OK;
    }
    std::ofstream out(path);
    if (!out) return fail(PEBC_IO, std::string("cannot open ") + path + " for writing");
    write(out);
    if (!out) return fail(PEBC_IO, std::string("failed writing ") + path);
    return PEBC_OK;
}

}  // namespace

extern "C" {

const char* pebc_version(void) { return "0.1.0"; }

const char* pebc_last_error(void) { return last_error.c_str(); }

int pebc_last_error_line(void) { return last_error_line; }

pebc_status pebc_kernel_build(double c1, size_t n_points, pebc_kernel** out) {
    return guarded([&] {
        if (auto s = require(out != nullptr, "out must not be null"); s != PEBC_OK) return s;
        *out = nullptr;
        pebc::KernelConfig cfg;
        cfg.c1 = c1;
        const pebc::Grid grid(n_points);
        *out = new pebc_kernel{pebc::build_kernel(cfg, grid)};
        return PEBC_OK;
    });
}

void pebc_kernel_free(pebc_kernel* kernel) { delete kernel; }

size_t pebc_kernel_size(const pebc_kernel* kernel) { return kernel ? kernel->kernel.grid().size() : 0; }

pebc_status pebc_kernel_value(const pebc_kernel* kernel, size_t i, size_t j, double* out) {
    return guarded([&] {
        if (auto s = require(kernel && out, "kernel and out must not be null"); s != PEBC_OK) return s;
        if (auto s = require(i < kernel->kernel.grid().size() && j <= i, "index outside 0 <= j <= i < n");
            s != PEBC_OK) {
            return s;
        }
        *out = kernel->kernel.at(i, j);
        return PEBC_OK;
    });
}

pebc_status pebc_kernel_k11(const pebc_kernel* kernel, double* out) {
    return guarded([&] {
        if (auto s = require(kernel && out, "kernel and out must not be null"); s != PEBC_OK) return s;
        *out = kernel->kernel.k11();
        return PEBC_OK;
    });
}

pebc_status pebc_kernel_l2_norm(const pebc_kernel* kernel, double* out) {
    return guarded([&] {
        if (auto s = require(kernel && out, "kernel and out must not be null"); s != PEBC_OK) return s;
        *out = pebc::kernel_l2_norm(kernel->kernel);
        return PEBC_OK;
    });
}

pebc_status pebc_kernel_write_csv(const pebc_kernel* kernel, const char* path) {
    return guarded([&] {
        if (auto s = require(kernel && path, "kernel and path must not be null"); s != PEBC_OK) return s;
        return with_output(path, [&](std::ostream& os) { pebc::write_kernel_csv(kernel->kernel, os); });
    });
}

pebc_status pebc_nc1(double c1, double* out) {
    return guarded([&] {
        if (auto s = require(out != nullptr, "out must not be null"); s != PEBC_OK) return s;
        if (auto s = require(c1 > 0.0 && std::isfinite(c1), "c1 must be positive and finite"); s != PEBC_OK) {
            return s;
        }
        *out = pebc::kernel_bound_nc1(c1);
        return PEBC_OK;
    });
}

pebc_status pebc_config_load(const char* path, pebc_config** out) {
    return guarded([&] {
        if (auto s = require(path && out, "path and out must not be null"); s != PEBC_OK) return s;
        *out = nullptr;
        *out = new pebc_config{pebc::load_config(path)};
        return PEBC_OK;
    });
}

pebc_status pebc_config_parse(const char* text, pebc_config** out) {
    return guarded([&] {
        if (auto s = require(text && out, "text and out must not be null"); s != PEBC_OK) return s;
        *out = nullptr;
        *out = new pebc_config{pebc::parse_config(text)};
        return PEBC_OK;
    });
}

pebc_status pebc_config_set(pebc_config* config, const char* key, const char* value) {
    return guarded([&] {
        if (auto s = require(config && key && value, "arguments must not be null"); s != PEBC_OK) return s;
        pebc::ScenarioConfig updated = config->config;
        pebc::set_config_value(updated, key, value);
        updated.validate();
        config->config = std::move(updated);
        return PEBC_OK;
    });
}

void pebc_config_free(pebc_config* config) { delete config; }

pebc_status pebc_check_gains(const pebc_config* config, pebc_report** out) {
    return guarded([&] {
        if (auto s = require(config && out, "config and out must not be null"); s != PEBC_OK) return s;
        *out = nullptr;
        const auto& cfg = config->config;
        const pebc::GainReport report = pebc::gain_report(cfg.params(), cfg.c1);
        const bool pass = pebc::applicable_condition(report, cfg.mode);
        std::string text = pebc::gain_report_text(report);
        text += "mode=" + pebc::to_string(cfg.mode) + "\n";
        text += std::string("condition_pass=") + (pass ? "true" : "false") + "\n";
        *out = new pebc_report{std::move(text), pass};
        return pass ? PEBC_OK : PEBC_CONDITION_FAIL;
    });
}

pebc_status pebc_find_c1(const pebc_config* config, double target_k1, double c1_max, double* c1_out,
                         int* feasible) {
    return guarded([&] {
        if (auto s = require(config && c1_out && feasible, "arguments must not be null"); s != PEBC_OK) {
            return s;
        }
        if (auto s = require(std::isfinite(target_k1), "target must be finite"); s != PEBC_OK) return s;
        const auto c1 = pebc::find_c1_for_k1(config->config.params(), target_k1, c1_max);
        *feasible = c1 ? 1 : 0;
        *c1_out = c1.value_or(std::nan(""));
        return PEBC_OK;
    });
}

pebc_status pebc_simulate(const pebc_config* config, int write_csv, pebc_report** out) {
    return guarded([&] {
        if (auto s = require(config && out, "config and out must not be null"); s != PEBC_OK) return s;
        *out = nullptr;
        pebc::RunOptions options;
        options.write_csv = write_csv != 0;
        options.keep_trajectory = false;
        const pebc::ScenarioResult result = pebc::run_scenario(config->config, options);
        std::ostringstream os;
        pebc::write_scenario_report(config->config, result, os);
        *out = new pebc_report{os.str(), result.status == pebc::ScenarioStatus::pass};
        switch (result.status) {
            case pebc::ScenarioStatus::pass: return PEBC_OK;
            case pebc::ScenarioStatus::condition_fail: return PEBC_CONDITION_FAIL;
            case pebc::ScenarioStatus::diverged:
                last_error = result.divergence;
                return PEBC_DIVERGED;
        }
        return PEBC_INTERNAL;
    });
}

pebc_status pebc_sweep(const pebc_config* config, const char* axis, const char* path) {
    return guarded([&] {
        if (auto s = require(config && axis && path, "arguments must not be null"); s != PEBC_OK) return s;
        const pebc::SweepAxis parsed = pebc::parse_sweep_axis(axis);
        const auto rows = pebc::run_sweep(config->config, parsed);
        return with_output(path, [&](std::ostream& os) { pebc::write_sweep_csv(parsed, rows, os); });
    });
}

const char* pebc_report_text(const pebc_report* report) { return report ? report->text.c_str() : ""; }

pebc_status pebc_report_value(const pebc_report* report, const char* key, double* out) {
    return guarded([&] {
        if (auto s = require(report && key && out, "arguments must not be null"); s != PEBC_OK) return s;
        const std::string prefix = std::string(key) + "=";
        std::istringstream in(report->text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind(prefix, 0) != 0) continue;
            const std::string value = line.substr(prefix.size());
            if (value == "inf") *out = HUGE_VAL;
            else if (value == "-inf") *out = -HUGE_VAL;
            else if (value == "nan") *out = std::nan("");
            else {
                std::size_t used = 0;
                try {
                    *out = std::stod(value, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != value.size() || value.empty()) {
                    return fail(PEBC_INVALID_ARGUMENT, "report entry '" + std::string(key) + "' is not numeric");
                }
            }
            return PEBC_OK;
        }
        return fail(PEBC_INVALID_ARGUMENT, "report has no entry '" + std::string(key) + "'");
    });
}

int pebc_report_pass(const pebc_report* report) { return report && report->pass ? 1 : 0; }

void pebc_report_free(pebc_report* report) { delete report; }

}  // extern "C"
