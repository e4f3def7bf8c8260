#pragma once

#include <Eigen/Sparse>

#include <vector>

#include "phi4lab/grid.hpp"
#include "phi4lab/kernels.hpp"

namespace phi4lab {

/// The base two-body profile v: even, smooth, compactly supported in the unit
/// disk, positive type, integral one. Realized as the normalized
/// autocorrelation of the standard bump supported in radius 1/2.
double base_profile(double r);

/// v^eps sampled on lattice offsets and renormalized so a^2 sum = 1.
/// is_delta marks the local limit v^eps = delta/a^2 (single-site stencil).
struct LatticeInteraction {
    double epsilon = 0.0;
    int reach = 0;  // stencil radius in sites
    std::vector<Eigen::Vector2i> offsets;
    std::vector<double> values;  // v^eps at each offset
    bool is_delta = false;

    double value_at_zero() const;
};

LatticeInteraction discretize_interaction(double epsilon, const LatticeGrid& grid);
LatticeInteraction delta_interaction(const LatticeGrid& grid);

/// v^eps(x-y) as a sparse pair matrix (values only, no quadrature weight).
SpMat interaction_pair_matrix(const LatticeInteraction& li, const LatticeGrid& grid);

/// v^eps * f, the lattice convolution a^2 sum_y v^eps(x-y) f(y); zero data
/// outside a Dirichlet grid, wrap-around on a periodic one.
Vec convolve(const LatticeInteraction& li, const LatticeGrid& grid, const Vec& f);

/// Renormalisation data tau^eps(x) = a^2 sum_y v^eps(x-y) G(x,y) and
/// E^eps = (1/2) a^4 sum_{x,y} v^eps(x-y) G(x,y)^2.
struct RenormData {
    Vec tau;
    double E_eps = 0.0;
    double tau0 = 0.0;  // homogeneous reference, filled by the caller
};
RenormData tau_and_E(const KernelMatrix& G, const LatticeInteraction& li);

/// tau^eps at selected sites from the sparse factorized Hamiltonian:
/// tau(x) = (h^{-1} v_x)(x) with v_x(y) = a^2 v^eps(x-y). One solve per site;
/// the large-grid path where a dense G is out of reach.
Vec tau_at_sites(const LatticeInteraction& li, const LatticeGrid& grid,
                 const Eigen::SimplicialLLT<SpMat>& llt, const std::vector<int>& sites);

}  // namespace phi4lab
