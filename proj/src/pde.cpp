#include "pebc/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "pebc/error.hpp"
#include "pebc/format.hpp"
#include "pde_internal.hpp"

namespace pebc {

namespace {

constexpr double kResonanceGuard = 1e-6;

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::invalid_argument, std::string(name) + " must be finite");
    }
}

// Ghost-point Neumann Laplacian bands on the grid, scaled by `scale`:
// returns (sub, diag, super) of scale * D.
struct Bands {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;
};

Bands neumann_laplacian(const Grid& grid, double scale) {
    const std::size_t n = grid.size();
    const double c = scale / (grid.h() * grid.h());
    Bands b{std::vector<double>(n - 1, c), std::vector<double>(n, -2.0 * c),
            std::vector<double>(n - 1, c)};
    b.super.front() = 2.0 * c;
    b.sub.back() = 2.0 * c;
    return b;
}

}  // namespace

namespace detail {

void check_divergence(const Field& u, double t) {
    const double norm = l2_norm(u);
    if (!std::isfinite(norm) || norm > kDivergenceThreshold) {
        throw DivergenceError("state norm exceeded " + format_double(kDivergenceThreshold) +
                                  " at t = " + format_double(t),
                              t);
    }
}

Field unchecked_field(const Grid& grid, std::vector<double> values) {
    Field f(grid);
    std::copy(values.begin(), values.end(), f.values().begin());
    return f;
}

}  // namespace detail

using detail::PlantStepper;
using detail::check_divergence;
using detail::should_store;
using detail::unchecked_field;

SystemParams::SystemParams(double rho, double alpha, double beta, double gamma, Nonlinearity f1,
                           Nonlinearity f2, Nonlinearity f3)
    : rho_(rho), alpha_(alpha), beta_(beta), gamma_(gamma), f1_(std::move(f1)),
      f2_(std::move(f2)), f3_(std::move(f3)) {
    require_finite(rho, "rho");
    require_finite(alpha, "alpha");
    require_finite(beta, "beta");
    require_finite(gamma, "gamma");
    if (resonance_distance(gamma) <= kResonanceGuard * std::max(1.0, std::abs(gamma))) {
        throw Error(ErrorCode::near_resonance,
                    "gamma = " + format_double(gamma) +
                        " is within 1e-6 max(1, |gamma|) of a Neumann eigenvalue -(n pi)^2");
    }
}

double resonance_distance(double gamma) {
    const double pi = std::numbers::pi;
    const auto n_max = static_cast<long>(std::ceil(std::sqrt(std::abs(gamma)) / pi)) + 2;
    double best = std::abs(gamma);
    for (long n = 1; n <= n_max; ++n) {
        const double mode = static_cast<double>(n) * pi;
        best = std::min(best, std::abs(gamma + mode * mode));
    }
    return best;
}

EllipticSolver::EllipticSolver(const SystemParams& params, const Grid& grid)
    : grid_(grid), beta_(params.beta()), f3_(params.f3()) {
    const double gamma = params.gamma();
    const std::size_t n = grid.last();
    const double h = grid.h();
    // Eigenvalues of -D are (4/h^2) sin^2(m pi / 2N), m = 0..N.
    double closest = std::abs(gamma);
    for (std::size_t m = 1; m <= n; ++m) {
        const double s = std::sin(static_cast<double>(m) * std::numbers::pi / (2.0 * static_cast<double>(n)));
        closest = std::min(closest, std::abs(gamma + 4.0 * s * s / (h * h)));
    }
    if (closest <= 1e-9 * std::max(1.0, std::abs(gamma))) {
        throw Error(ErrorCode::near_resonance,
                    "gamma = " + format_double(gamma) +
                        " is a Neumann eigenvalue of the discrete Laplacian on this grid");
    }
    Bands b = neumann_laplacian(grid, -1.0);
    for (double& d : b.diag) d += gamma;
    lu_ = TridiagonalLU(std::move(b.sub), std::move(b.diag), std::move(b.super));
}

Field EllipticSolver::solve(const Field& rhs) const {
    require_same_grid(grid_, rhs.grid(), "EllipticSolver::solve");
    std::vector<double> x(rhs.values().begin(), rhs.values().end());
    lu_.solve_in_place(x);
    return unchecked_field(grid_, std::move(x));
}

Field EllipticSolver::solve_for(const Field& u) const {
    require_same_grid(grid_, u.grid(), "EllipticSolver::solve_for");
    Field rhs(grid_);
    const bool nonlinear = f3_.kind() != NonlinearityKind::zero;
    for (std::size_t i = 0; i < u.size(); ++i) {
        rhs[i] = beta_ * u[i] + (nonlinear ? f3_(u[i]) : 0.0);
    }
    return solve(rhs);
}

Field solve_elliptic(const SystemParams& params, const Field& u) {
    return EllipticSolver(params, u.grid()).solve_for(u);
}

double elliptic_residual(const SystemParams& params, const Field& u, const Field& v) {
    require_same_grid(u.grid(), v.grid(), "elliptic_residual");
    const Grid& grid = u.grid();
    const std::size_t n = grid.last();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    double worst = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double left = i == 0 ? v[1] : v[i - 1];
        const double right = i == n ? v[n - 1] : v[i + 1];
        const double vxx = (left - 2.0 * v[i] + right) * inv_h2;
        const double r = vxx - params.gamma() * v[i] + params.beta() * u[i] + params.f3()(u[i]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

ParabolicStepper::ParabolicStepper(const Grid& grid, double reaction, double dt)
    : grid_(grid), dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw Error(ErrorCode::invalid_argument, "time step must be positive, got " + format_double(dt));
    }
    require_finite(reaction, "reaction coefficient");
    Bands b = neumann_laplacian(grid, -dt);
    for (double& d : b.diag) d += 1.0 + dt * reaction;
    lu_ = TridiagonalLU(std::move(b.sub), std::move(b.diag), std::move(b.super));
}

Field ParabolicStepper::advance(const Field& u, const Field& source, double boundary_flux) const {
    require_same_grid(grid_, u.grid(), "ParabolicStepper::advance");
    require_same_grid(grid_, source.grid(), "ParabolicStepper::advance");
    std::vector<double> rhs(u.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = u[i] + dt_ * source[i];
    rhs.back() += dt_ * 2.0 * boundary_flux / grid_.h();
    lu_.solve_in_place(rhs);
    return unchecked_field(grid_, std::move(rhs));
}

Field ParabolicStepper::advance(const Field& u, double boundary_flux) const {
    return advance(u, Field(grid_), boundary_flux);
}

namespace detail {

Field plant_source(const SystemParams& params, const Field& u, const Field& v) {
    Field s(u.grid());
    const bool has_f1 = params.f1().kind() != NonlinearityKind::zero;
    const bool has_f2 = params.f2().kind() != NonlinearityKind::zero;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double value = params.alpha() * v[i];
        if (has_f1) value += params.f1()(u[i]);
        if (has_f2) value += params.f2()(v[i]);
        s[i] = value;
    }
    return s;
}

PlantStepper::PlantStepper(const SystemParams& params, const Grid& grid, double dt)
    : params_(params), elliptic_(params, grid), parabolic_(grid, params.rho(), dt) {}

SimState PlantStepper::step(const SimState& s, double omega) const {
    if (!std::isfinite(omega)) {
        throw DivergenceError("boundary input is not finite at t = " + format_double(s.t), s.t);
    }
    Field u = parabolic_.advance(s.u, plant_source(params_, s.u, s.v), omega);
    const double t = s.t + parabolic_.dt();
    check_divergence(u, t);
    Field v = elliptic_.solve_for(u);
    return SimState{t, std::move(u), std::move(v)};
}

bool should_store(std::size_t step, std::size_t last, std::size_t every) {
    if (step == 0 || step == last) return true;
    return every > 0 && step % every == 0;
}

}  // namespace detail

SimState step_parabolic(const SystemParams& params, const SimState& state, double boundary_input,
                        double dt) {
    require_same_grid(state.u.grid(), state.v.grid(), "step_parabolic");
    return PlantStepper(params, state.u.grid(), dt).step(state, boundary_input);
}

std::size_t step_count(double T, double dt) {
    if (!(T > 0.0) || !(dt > 0.0) || !std::isfinite(T) || !std::isfinite(dt)) {
        throw Error(ErrorCode::invalid_argument, "T and dt must be positive");
    }
    const double ratio = T / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio)) {
        return static_cast<std::size_t>(rounded);
    }
    return static_cast<std::size_t>(std::ceil(ratio));
}

Trajectory simulate(const SystemParams& params, const Field& u0, const BoundaryPolicy& policy,
                    double T, double dt, const SimulationOptions& options) {
    const std::size_t steps = step_count(T, dt);
    const PlantStepper stepper(params, u0.grid(), dt);
    SimState state{0.0, u0, stepper.elliptic().solve_for(u0)};

    Trajectory traj;
    traj.t.reserve(steps + 1);
    traj.norm_u.reserve(steps + 1);
    traj.norm_v.reserve(steps + 1);
    traj.omega.reserve(steps + 1);
    for (std::size_t k = 0;; ++k) {
        const double omega = policy ? policy(state) : 0.0;
        traj.t.push_back(state.t);
        traj.norm_u.push_back(l2_norm(state.u));
        traj.norm_v.push_back(l2_norm(state.v));
        traj.omega.push_back(omega);
        if (options.on_step) options.on_step(state);
        if (should_store(k, steps, options.store_every)) traj.snapshots.push_back(state);
        if (k == steps) break;
        state = stepper.step(state, omega);
        state.t = static_cast<double>(k + 1) * dt;
    }
    return traj;
}

TargetDynamics::TargetDynamics(const SystemParams& params, Kernel k, Kernel l)
    : params_(params), k_(std::move(k)), l_(std::move(l)), elliptic_(params, k_.grid()) {
    require_same_grid(k_.grid(), l_.grid(), "TargetDynamics");
}

Field TargetDynamics::elliptic_state(const Field& utilde) const {
    return elliptic_.solve_for(inverse_transform(l_, utilde));
}

Field TargetDynamics::explicit_terms(const Field& utilde, Field* v_out) const {
    const Field u = inverse_transform(l_, utilde);
    Field v = elliptic_.solve_for(u);
    const Field f1u = apply_field(params_.f1(), u);
    const Field f2v = apply_field(params_.f2(), v);
    const Field kv = volterra_apply(k_, v);
    const Field kf2 = volterra_apply(k_, f2v);
    const Field kf1 = volterra_apply(k_, f1u);
    const double alpha = params_.alpha();
    Field out(utilde.grid());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = alpha * v[i] - alpha * kv[i] + f1u[i] + f2v[i] - kf2[i] - kf1[i];
    }
    if (v_out) *v_out = std::move(v);
    return out;
}

Field TargetDynamics::lambda(const Field& utilde) const {
    return axpby(-damping(), utilde, 1.0, explicit_terms(utilde));
}

Trajectory simulate_target(const SystemParams& params, const Kernel& k, const Kernel& l,
                           const Field& utilde0, double T, double dt,
                           const SimulationOptions& options) {
    require_same_grid(k.grid(), utilde0.grid(), "simulate_target");
    const std::size_t steps = step_count(T, dt);
    const TargetDynamics dynamics(params, k, l);
    const ParabolicStepper stepper(utilde0.grid(), dynamics.damping(), dt);

    Field v(utilde0.grid());
    Field source = dynamics.explicit_terms(utilde0, &v);
    SimState state{0.0, utilde0, v};

    Trajectory traj;
    traj.t.reserve(steps + 1);
    for (std::size_t n = 0;; ++n) {
        traj.t.push_back(state.t);
        traj.norm_u.push_back(l2_norm(state.u));
        traj.norm_v.push_back(l2_norm(state.v));
        traj.omega.push_back(0.0);
        if (options.on_step) options.on_step(state);
        if (should_store(n, steps, options.store_every)) traj.snapshots.push_back(state);
        if (n == steps) break;
        Field next = stepper.advance(state.u, source, 0.0);
        const double t = static_cast<double>(n + 1) * dt;
        check_divergence(next, t);
        source = dynamics.explicit_terms(next, &v);
        state = SimState{t, std::move(next), v};
    }
    return traj;
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
    out << "t,norm_u,norm_v,omega,norm_u_hat,norm_v_hat,norm_err_u,norm_err_v\n";
    const bool obs = trajectory.has_observer();
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        out << format_double(trajectory.t[k]) << ',' << format_double(trajectory.norm_u[k]) << ','
            << format_double(trajectory.norm_v[k]) << ',' << format_double(trajectory.omega[k]);
        if (obs) {
            out << ',' << format_double(trajectory.norm_u_hat[k]) << ','
                << format_double(trajectory.norm_v_hat[k]) << ','
                << format_double(trajectory.norm_err_u[k]) << ','
                << format_double(trajectory.norm_err_v[k]) << '\n';
        } else {
            out << ",,,,\n";
        }
    }
}

}  // namespace pebc
