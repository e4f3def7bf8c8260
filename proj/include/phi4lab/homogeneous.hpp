#pragma once

#include <functional>
#include <vector>

#include "phi4lab/grid.hpp"

namespace phi4lab {

/// Translation-invariant references on a periodic U = 0 grid, evaluated from
/// the plane-wave diagonalization kappa + (2 - cos p1 a - cos p2 a)/a^2.
/// No eigensolver involved; exact up to rounding.
struct HomogeneousReference {
    LatticeGrid grid;  // periodic companion
    double kappa = 0.0;

    /// Matching periodic companion of a Dirichlet grid: same spacing,
    /// half_width adjusted to n*a/2 so the lattice is unchanged.
    static HomogeneousReference companion(const LatticeGrid& dirichlet_grid, double kappa);

    /// (1/(n^2 a^2)) sum_p w(lambda_p): the diagonal of any spectral kernel.
    double diagonal(const std::function<double(double)>& weight) const;

    /// G^0(delta) for a set of lattice offsets (in sites).
    std::vector<double> green_offsets(const std::vector<Eigen::Vector2i>& offsets) const;

    double green_diagonal() const;                       // G^0(0)
    double density(double nu) const;                     // rho_nu^0
    double heat_diagonal(double t) const;                // e^{-th}(x,x)
};

}  // namespace phi4lab
