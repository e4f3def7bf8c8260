#pragma once

#include "phi4lab/bounds.hpp"
#include "phi4lab/potential.hpp"

namespace phi4lab {

/// Brownian bridge pinned to omega(0) = y, omega(t) = x, built from the
/// coupling X_s = B_s - (s/t) B_t + y + (s/t)(x - y) on a uniform time grid.
struct BridgePath {
    Eigen::Vector2d x, y;
    double t = 0.0;
    int steps = 0;
    Mat samples;  // (steps+1) x 2
};

BridgePath sample_bridge(const Eigen::Vector2d& x, const Eigen::Vector2d& y, double t, int steps,
                         uint64_t seed, uint64_t stream = 0);

struct FKEstimate {
    double value = 0.0;
    double err = 0.0;
    long n_paths = 0;
};

/// e^{-t h}(x,y) = psi^t(x-y) e^{-kappa t} E_bridge[e^{-int U}], trapezoid
/// time quadrature, off-lattice potential evaluation.
FKEstimate fk_heat_kernel(const Eigen::Vector2d& x, const Eigen::Vector2d& y, double t,
                          const PotentialSpec& spec, double kappa, long n_paths, int steps,
                          uint64_t seed);

/// rho_nu(x) = nu sum_{n>=1} e^{-nu n h}(x,x) via Feynman-Kac loops. n_terms
/// must leave a kappa-tail below its own contribution to the error budget;
/// the truncation bound is returned in tail_bound.
struct FKDensity {
    FKEstimate estimate;
    double tail_bound = 0.0;
    int n_terms = 0;
};
FKDensity fk_rho_nu(const Eigen::Vector2d& x, double nu, int n_terms, const PotentialSpec& spec,
                    double kappa, long n_paths, int steps, uint64_t seed);

/// Gaussian heat kernel (2 pi t)^{-1} e^{-|x|^2/2t}.
inline double free_heat_kernel(const Eigen::Vector2d& dx, double t) {
    return std::exp(-dx.squaredNorm() / (2.0 * t)) / (2.0 * M_PI * t);
}

/// Bilinear interpolation of a dense grid kernel in both arguments.
double kernel_interp(const Mat& K, const LatticeGrid& grid, const Eigen::Vector2d& x,
                     const Eigen::Vector2d& y);

/// Fit (c, C) of the heat-kernel envelope over (pair, time) samples where
/// `kernel` supplies measured values e^{-t h}(x, xt).
BoundFit envelope_check_lemma62(
    const PotentialSpec& spec,
    const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>& pairs,
    const std::vector<double>& times,
    const std::function<double(const Eigen::Vector2d&, const Eigen::Vector2d&, double)>& kernel);

}  // namespace phi4lab
