#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pebc/kernel.hpp"
#include "pebc/pde.hpp"

namespace pebc {

enum class ControlMode { open_loop, state_feedback, output_feedback };

/// Boundary law omega = int_0^1 k_x(1,y) u(y) dy + k(1,1) u(1).
class Controller {
public:
    static Controller open_loop();
    static Controller state_feedback(Kernel kernel);
    static Controller output_feedback(Kernel kernel);

    ControlMode mode() const noexcept { return mode_; }
    bool has_kernel() const noexcept { return kernel_.has_value(); }
    /// Throws Error(invalid_argument) in open-loop mode.
    const Kernel& kernel() const;

private:
    Controller(ControlMode mode, std::optional<Kernel> kernel);

    ControlMode mode_;
    std::optional<Kernel> kernel_;
};

/// Zero in open-loop mode; otherwise the trapezoid rule for the law above.
double control_signal(const Controller& ctrl, const Field& u);

/// Boundary policy for simulate() that applies control_signal to the state.
BoundaryPolicy feedback_policy(const Controller& ctrl);

/// Bound on |omega(u + delta) - omega(u)|:
/// ||k_x(1, .)|| ||delta|| + |k(1,1)| |delta(1)|.
double control_increment_bound(const Kernel& kernel, const Field& delta);

/// Luenberger boundary observer with sigma1 = 0 and sigma2 = -k(1,1).
struct ObserverState {
    double t = 0.0;
    Field u_hat;
    Field v_hat;
    double sigma2 = 0.0;
    Field sigma1;
};

/// Observer at t = 0 with v_hat from the elliptic solve for u_hat0.
ObserverState make_observer(const SystemParams& params, const Kernel& kernel, const Field& u_hat0);

/// One IMEX step of the observer. The boundary flux is
/// omega + sigma2 (y - u_hat(1)); sigma1 (y - u_hat(1)) enters as a source.
ObserverState observer_step(const SystemParams& params, const ObserverState& obs,
                            double measurement_u1, double omega, double dt);

/// control_signal evaluated on the observer estimate; requires a kernel.
double output_feedback_signal(const Controller& ctrl, const ObserverState& obs);

enum class ObserverLoop {
    /// The plant is driven by the state-feedback law on the true state.
    state_feedback,
    /// The plant is driven by the law evaluated on the observer estimate.
    output_feedback,
};

struct JointOptions {
    std::size_t store_every = 0;
    double noise_std = 0.0;
    std::uint64_t seed = 0;
    std::function<void(const SimState&, const ObserverState&)> on_step;
};

struct JointTrajectory {
    /// Plant and observer columns; snapshots hold plant states.
    Trajectory trajectory;
    std::vector<ObserverState> observer_snapshots;
};

/// Plant and observer advanced together; the observer sees u(1, t_n) plus
/// optional Gaussian noise.
JointTrajectory simulate_with_observer(const SystemParams& params, const Controller& ctrl,
                                       const Field& u0, const Field& u_hat0, ObserverLoop loop,
                                       double T, double dt, const JointOptions& options = {});

struct ErrorState {
    double t = 0.0;
    Field eps_u;
    Field eps_v;
};

struct ErrorTrajectory {
    std::vector<double> t;
    std::vector<double> norm_eps_u;
    std::vector<double> norm_eps_v;
    std::vector<ErrorState> snapshots;
};

/// Integrates the observation-error system directly:
///   e_t = e_xx - rho e + alpha e_v - sigma1 e(1)
///         + f1(u) - f1(u - e) + f2(v) - f2(v - e_v)
///   0   = e_v,xx - gamma e_v + beta e + f3(u) - f3(u - e)
///   e_x(0) = 0, e_x(1) = -sigma2 e(1)
/// using the plant states (one per step, spaced dt) for the nonlinear terms.
ErrorTrajectory simulate_error_system(const SystemParams& params, const Kernel& kernel,
                                      std::span<const SimState> plant, const Field& eps_u0,
                                      double dt, std::size_t store_every = 0);

/// Boundary condition of the transformed error etilde = (I - K) e at x = 1.
struct TransformedBoundaryCheck {
    double derivative = 0.0;       // one-sided difference of etilde at x = 1
    double predicted = 0.0;        // -int k_x(1,y) (etilde + L etilde)(y) dy
    double predicted_minus = 0.0;  // same with etilde - L etilde
};

TransformedBoundaryCheck transformed_error_boundary(const Kernel& k, const Kernel& l,
                                                    const Field& eps_u);

}  // namespace pebc
