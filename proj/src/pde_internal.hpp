#pragma once

#include <vector>

#include "pebc/pde.hpp"

namespace pebc::detail {

void check_divergence(const Field& u, double t);

// Assembles a Field without the finiteness check so that blow-up is reported
// as divergence rather than as a bad argument.
Field unchecked_field(const Grid& grid, std::vector<double> values);

// f1(u) + alpha v + f2(v)
Field plant_source(const SystemParams& params, const Field& u, const Field& v);

bool should_store(std::size_t step, std::size_t last, std::size_t every);

// One IMEX plant step with cached operators. Keeps a reference to params.
class PlantStepper {
public:
    PlantStepper(const SystemParams& params, const Grid& grid, double dt);

    SimState step(const SimState& s, double omega) const;

    const EllipticSolver& elliptic() const { return elliptic_; }

private:
    const SystemParams& params_;
    EllipticSolver elliptic_;
    ParabolicStepper parabolic_;
};

}  // namespace pebc::detail
