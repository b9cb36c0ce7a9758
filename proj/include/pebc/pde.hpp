#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "pebc/grid.hpp"
#include "pebc/kernel.hpp"
#include "pebc/nonlinearity.hpp"
#include "pebc/tridiagonal.hpp"

namespace pebc {

/// Coefficients of
///   u_t = u_xx - rho u + f1(u) + alpha v + f2(v)
///   0   = v_xx - gamma v + beta u + f3(u)
/// with Neumann ends. Construction rejects gamma within 1e-6 max(1, |gamma|)
/// of -(n pi)^2.
class SystemParams {
public:
    SystemParams(double rho, double alpha, double beta, double gamma,
                 Nonlinearity f1 = Nonlinearity::zero(), Nonlinearity f2 = Nonlinearity::zero(),
                 Nonlinearity f3 = Nonlinearity::zero());

    double rho() const noexcept { return rho_; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double gamma() const noexcept { return gamma_; }
    const Nonlinearity& f1() const noexcept { return f1_; }
    const Nonlinearity& f2() const noexcept { return f2_; }
    const Nonlinearity& f3() const noexcept { return f3_; }

    double m1() const noexcept { return f1_.lipschitz(); }
    double m2() const noexcept { return f2_.lipschitz(); }
    double m3() const noexcept { return f3_.lipschitz(); }

private:
    double rho_;
    double alpha_;
    double beta_;
    double gamma_;
    Nonlinearity f1_;
    Nonlinearity f2_;
    Nonlinearity f3_;
};

/// min over n >= 0 of |gamma + (n pi)^2|.
double resonance_distance(double gamma);

struct SimState {
    double t = 0.0;
    Field u;
    Field v;
};

/// Factored ghost-point discretization of (gamma I - d^2/dx^2) with
/// v_x(0) = v_x(1) = 0. Throws Error(near_resonance) when gamma sits on a
/// Neumann eigenvalue of the discrete Laplacian.
class EllipticSolver {
public:
    EllipticSolver(const SystemParams& params, const Grid& grid);

    /// Solves gamma v - v_xx = rhs.
    Field solve(const Field& rhs) const;
    /// v for the state u: right-hand side beta u + f3(u).
    Field solve_for(const Field& u) const;

    const Grid& grid() const noexcept { return grid_; }

private:
    Grid grid_;
    double beta_;
    Nonlinearity f3_;
    TridiagonalLU lu_;
};

Field solve_elliptic(const SystemParams& params, const Field& u);

/// Max-norm of the discrete residual v_xx - gamma v + beta u + f3(u).
double elliptic_residual(const SystemParams& params, const Field& u, const Field& v);

/// Backward Euler for u_xx - reaction*u with ghost-point Neumann ends; the
/// right boundary flux enters the last row as 2*flux/h.
class ParabolicStepper {
public:
    ParabolicStepper(const Grid& grid, double reaction, double dt);

    /// Solves (I - dt (D - reaction)) u_next = u + dt*source + dt*(2 flux / h) e_N.
    Field advance(const Field& u, const Field& source, double boundary_flux) const;
    /// Same without a source term.
    Field advance(const Field& u, double boundary_flux) const;

    double dt() const noexcept { return dt_; }

private:
    Grid grid_;
    double dt_;
    TridiagonalLU lu_;
};

/// Blow-up guard on the L2 norm of u.
inline constexpr double kDivergenceThreshold = 1e12;

/// One IMEX step: diffusion and -rho u implicit, f1(u) + alpha v + f2(v) and
/// the boundary flux explicit; v is re-solved at the new time.
SimState step_parabolic(const SystemParams& params, const SimState& state, double boundary_input,
                        double dt);

/// Per-step record of a run. Observer columns stay empty when no observer ran.
struct Trajectory {
    std::vector<double> t;
    std::vector<double> norm_u;
    std::vector<double> norm_v;
    std::vector<double> omega;
    std::vector<double> norm_u_hat;
    std::vector<double> norm_v_hat;
    std::vector<double> norm_err_u;
    std::vector<double> norm_err_v;
    /// States kept according to SimulationOptions::store_every.
    std::vector<SimState> snapshots;

    std::size_t size() const noexcept { return t.size(); }
    bool has_observer() const noexcept { return !norm_u_hat.empty(); }
};

using BoundaryPolicy = std::function<double(const SimState&)>;

struct SimulationOptions {
    /// Keep every k-th state; 0 keeps only the first and the last.
    std::size_t store_every = 0;
    /// Called with every state, including the initial one.
    std::function<void(const SimState&)> on_step;
};

/// Number of steps of size dt covering [0, T].
std::size_t step_count(double T, double dt);

/// Runs the plant from u0 (v0 from the elliptic solve) under the boundary
/// policy. The trajectory holds step_count(T, dt) + 1 rows.
Trajectory simulate(const SystemParams& params, const Field& u0, const BoundaryPolicy& policy,
                    double T, double dt, const SimulationOptions& options = {});

/// Right-hand side of the transformed (target) system for utilde:
///   utilde_t = utilde_xx - (c1 + rho) utilde + alpha v - alpha K v
///              + f1(u) + f2(v) - K f2(v) - K f1(u)
/// where u = (I + L) utilde and v solves the elliptic equation for u.
class TargetDynamics {
public:
    TargetDynamics(const SystemParams& params, Kernel k, Kernel l);

    double damping() const noexcept { return k_.c1() + params_.rho(); }

    /// Every term except -(c1 + rho) utilde; optionally returns v.
    Field explicit_terms(const Field& utilde, Field* v_out = nullptr) const;
    /// The full reaction map Lambda(utilde) = -(c1 + rho) utilde + explicit_terms.
    Field lambda(const Field& utilde) const;
    Field elliptic_state(const Field& utilde) const;

    const SystemParams& params() const noexcept { return params_; }
    const Kernel& k() const noexcept { return k_; }
    const Kernel& l() const noexcept { return l_; }

private:
    SystemParams params_;
    Kernel k_;
    Kernel l_;
    EllipticSolver elliptic_;
};

/// Direct simulation of the target system with homogeneous Neumann ends.
/// Trajectory columns: norm_u holds ||utilde||, omega is zero. Snapshot
/// states carry utilde in the u slot.
Trajectory simulate_target(const SystemParams& params, const Kernel& k, const Kernel& l,
                           const Field& utilde0, double T, double dt,
                           const SimulationOptions& options = {});

/// Header: t,norm_u,norm_v,omega,norm_u_hat,norm_v_hat,norm_err_u,norm_err_v
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);

}  // namespace pebc
