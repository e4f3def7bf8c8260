#pragma once

#include <Eigen/Sparse>

#include "phi4lab/grid.hpp"

namespace phi4lab {

using SpMat = Eigen::SparseMatrix<double>;

/// One-particle Hamiltonian h = kappa - Lap/2 + U on the lattice,
/// as the pointwise-action matrix: (h f)(x) = sum_y H(x,y) f(y).
struct OperatorMatrix {
    SpMat H;
    LatticeGrid grid;
    double kappa = 0.0;

    int dimension() const { return static_cast<int>(H.rows()); }
};

/// Assemble kappa*I + (-Lap)/2 + diag(U) with the 5-point stencil.
/// Dirichlet keeps the full diagonal 2/a^2 (zero boundary data);
/// periodic wraps the neighbours.
OperatorMatrix assemble_hamiltonian(const LatticeGrid& grid, const Vec& potential, double kappa);

}  // namespace phi4lab
