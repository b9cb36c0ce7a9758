#include "pebc/control.hpp"

#include <cmath>
#include <random>
#include <string>

#include "pebc/error.hpp"
#include "pebc/format.hpp"
#include "pde_internal.hpp"

namespace pebc {

namespace {

void require_trace(const Kernel& k, const char* where) {
    if (!k.has_boundary_trace()) {
        throw Error(ErrorCode::invalid_argument,
                    std::string(where) + ": kernel carries no boundary trace k_x(1, y)");
    }
}

double boundary_law(const Kernel& k, const Field& u) {
    require_same_grid(k.grid(), u.grid(), "control_signal");
    const auto kx = k.kx_at_1();
    const auto uv = u.values();
    std::vector<double> integrand(uv.size());
    for (std::size_t j = 0; j < uv.size(); ++j) integrand[j] = kx[j] * uv[j];
    return composite_quadrature(integrand, u.grid().h()) + k.k11() * u.back();
}

// Cached operators for the observer copy of the plant.
class ObserverStepper {
public:
    ObserverStepper(const SystemParams& params, const Grid& grid, double dt)
        : params_(params), elliptic_(params, grid), parabolic_(grid, params.rho(), dt) {}

    ObserverState step(const ObserverState& obs, double y, double omega) const {
        if (!std::isfinite(y) || !std::isfinite(omega)) {
            throw DivergenceError("observer input is not finite at t = " + format_double(obs.t),
                                  obs.t);
        }
        const double innovation = y - obs.u_hat.back();
        Field source = detail::plant_source(params_, obs.u_hat, obs.v_hat);
        for (std::size_t i = 0; i < source.size(); ++i) source[i] += obs.sigma1[i] * innovation;
        Field u = parabolic_.advance(obs.u_hat, source, omega + obs.sigma2 * innovation);
        const double t = obs.t + parabolic_.dt();
        detail::check_divergence(u, t);
        Field v = elliptic_.solve_for(u);
        return ObserverState{t, std::move(u), std::move(v), obs.sigma2, obs.sigma1};
    }

private:
    const SystemParams& params_;
    EllipticSolver elliptic_;
    ParabolicStepper parabolic_;
};

Field difference(const Field& a, const Field& b) { return axpby(1.0, a, -1.0, b); }

}  // namespace

Controller::Controller(ControlMode mode, std::optional<Kernel> kernel)
    : mode_(mode), kernel_(std::move(kernel)) {}

Controller Controller::open_loop() { return Controller(ControlMode::open_loop, std::nullopt); }

Controller Controller::state_feedback(Kernel kernel) {
    require_trace(kernel, "Controller::state_feedback");
    return Controller(ControlMode::state_feedback, std::move(kernel));
}

Controller Controller::output_feedback(Kernel kernel) {
    require_trace(kernel, "Controller::output_feedback");
    return Controller(ControlMode::output_feedback, std::move(kernel));
}

const Kernel& Controller::kernel() const {
    if (!kernel_) throw Error(ErrorCode::invalid_argument, "open-loop controller has no kernel");
    return *kernel_;
}

double control_signal(const Controller& ctrl, const Field& u) {
    if (ctrl.mode() == ControlMode::open_loop) return 0.0;
    return boundary_law(ctrl.kernel(), u);
}

BoundaryPolicy feedback_policy(const Controller& ctrl) {
    return [ctrl](const SimState& s) { return control_signal(ctrl, s.u); };
}

double control_increment_bound(const Kernel& kernel, const Field& delta) {
    require_trace(kernel, "control_increment_bound");
    require_same_grid(kernel.grid(), delta.grid(), "control_increment_bound");
    const auto kx = kernel.kx_at_1();
    std::vector<double> sq(kx.size());
    for (std::size_t j = 0; j < kx.size(); ++j) sq[j] = kx[j] * kx[j];
    const double kx_norm = std::sqrt(composite_quadrature(sq, kernel.grid().h()));
    return kx_norm * l2_norm(delta) + std::abs(kernel.k11()) * std::abs(delta.back());
}

ObserverState make_observer(const SystemParams& params, const Kernel& kernel,
                            const Field& u_hat0) {
    require_same_grid(kernel.grid(), u_hat0.grid(), "make_observer");
    const Grid& grid = u_hat0.grid();
    return ObserverState{0.0, u_hat0, EllipticSolver(params, grid).solve_for(u_hat0),
                         -kernel.k11(), Field(grid)};
}

ObserverState observer_step(const SystemParams& params, const ObserverState& obs,
                            double measurement_u1, double omega, double dt) {
    return ObserverStepper(params, obs.u_hat.grid(), dt).step(obs, measurement_u1, omega);
}

double output_feedback_signal(const Controller& ctrl, const ObserverState& obs) {
    return boundary_law(ctrl.kernel(), obs.u_hat);
}

JointTrajectory simulate_with_observer(const SystemParams& params, const Controller& ctrl,
                                       const Field& u0, const Field& u_hat0, ObserverLoop loop,
                                       double T, double dt, const JointOptions& options) {
    require_same_grid(u0.grid(), u_hat0.grid(), "simulate_with_observer");
    if (!(options.noise_std >= 0.0) || !std::isfinite(options.noise_std)) {
        throw Error(ErrorCode::invalid_argument, "noise_std must be finite and non-negative");
    }
    const Kernel& kernel = ctrl.kernel();
    const std::size_t steps = step_count(T, dt);
    const Grid& grid = u0.grid();
    const detail::PlantStepper plant(params, grid, dt);
    const ObserverStepper observer(params, grid, dt);

    SimState state{0.0, u0, plant.elliptic().solve_for(u0)};
    ObserverState obs = make_observer(params, kernel, u_hat0);

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    JointTrajectory out;
    Trajectory& traj = out.trajectory;
    for (std::size_t n = 0;; ++n) {
        double y = state.u.back();
        if (options.noise_std > 0.0) y += options.noise_std * noise(rng);
        const double omega = loop == ObserverLoop::state_feedback
                                 ? boundary_law(kernel, state.u)
                                 : output_feedback_signal(ctrl, obs);
        traj.t.push_back(state.t);
        traj.norm_u.push_back(l2_norm(state.u));
        traj.norm_v.push_back(l2_norm(state.v));
        traj.omega.push_back(omega);
        traj.norm_u_hat.push_back(l2_norm(obs.u_hat));
        traj.norm_v_hat.push_back(l2_norm(obs.v_hat));
        traj.norm_err_u.push_back(l2_norm(difference(state.u, obs.u_hat)));
        traj.norm_err_v.push_back(l2_norm(difference(state.v, obs.v_hat)));
        if (options.on_step) options.on_step(state, obs);
        if (detail::should_store(n, steps, options.store_every)) {
            traj.snapshots.push_back(state);
            out.observer_snapshots.push_back(obs);
        }
        if (n == steps) break;
        const double t = static_cast<double>(n + 1) * dt;
        obs = observer.step(obs, y, omega);
        obs.t = t;
        state = plant.step(state, omega);
        state.t = t;
    }
    return out;
}

ErrorTrajectory simulate_error_system(const SystemParams& params, const Kernel& kernel,
                                      std::span<const SimState> plant, const Field& eps_u0,
                                      double dt, std::size_t store_every) {
    if (plant.empty()) {
        throw Error(ErrorCode::invalid_argument, "simulate_error_system needs plant states");
    }
    const Grid& grid = eps_u0.grid();
    require_same_grid(kernel.grid(), grid, "simulate_error_system");
    const double sigma2 = -kernel.k11();
    const std::size_t steps = plant.size() - 1;
    const EllipticSolver elliptic(params, grid);
    const ParabolicStepper parabolic(grid, params.rho(), dt);
    const Nonlinearity& f1 = params.f1();
    const Nonlinearity& f2 = params.f2();
    const Nonlinearity& f3 = params.f3();

    auto elliptic_error = [&](const Field& e, const SimState& s) {
        require_same_grid(s.u.grid(), grid, "simulate_error_system");
        Field rhs(grid);
        for (std::size_t i = 0; i < rhs.size(); ++i) {
            rhs[i] = params.beta() * e[i] + f3(s.u[i]) - f3(s.u[i] - e[i]);
        }
        return elliptic.solve(rhs);
    };

    ErrorState state{0.0, eps_u0, elliptic_error(eps_u0, plant[0])};
    ErrorTrajectory traj;
    for (std::size_t n = 0;; ++n) {
        traj.t.push_back(state.t);
        traj.norm_eps_u.push_back(l2_norm(state.eps_u));
        traj.norm_eps_v.push_back(l2_norm(state.eps_v));
        if (detail::should_store(n, steps, store_every)) traj.snapshots.push_back(state);
        if (n == steps) break;
        const SimState& s = plant[n];
        const Field& e = state.eps_u;
        const Field& ev = state.eps_v;
        Field source(grid);
        for (std::size_t i = 0; i < source.size(); ++i) {
            source[i] = params.alpha() * ev[i] + f1(s.u[i]) - f1(s.u[i] - e[i]) + f2(s.v[i]) -
                        f2(s.v[i] - ev[i]);
        }
        Field next = parabolic.advance(e, source, -sigma2 * e.back());
        const double t = static_cast<double>(n + 1) * dt;
        detail::check_divergence(next, t);
        Field next_v = elliptic_error(next, plant[n + 1]);
        state = ErrorState{t, std::move(next), std::move(next_v)};
    }
    return traj;
}

TransformedBoundaryCheck transformed_error_boundary(const Kernel& k, const Kernel& l,
                                                    const Field& eps_u) {
    require_trace(k, "transformed_error_boundary");
    require_same_grid(k.grid(), l.grid(), "transformed_error_boundary");
    const Grid& grid = eps_u.grid();
    const std::size_t n = grid.last();
    const Field et = forward_transform(k, eps_u);
    const Field l_et = volterra_apply(l, et);
    const auto kx = k.kx_at_1();

    std::vector<double> plus(grid.size());
    std::vector<double> minus(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        plus[j] = kx[j] * (et[j] + l_et[j]);
        minus[j] = kx[j] * (et[j] - l_et[j]);
    }
    TransformedBoundaryCheck out;
    out.derivative = (3.0 * et[n] - 4.0 * et[n - 1] + et[n - 2]) / (2.0 * grid.h());
    out.predicted = -composite_quadrature(plus, grid.h());
    out.predicted_minus = -composite_quadrature(minus, grid.h());
    return out;
}

}  // namespace pebc
