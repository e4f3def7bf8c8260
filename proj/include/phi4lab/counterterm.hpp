#pragma once

#include "phi4lab/homogeneous.hpp"
#include "phi4lab/interaction.hpp"

namespace phi4lab {

/// The dressed-potential iteration Phi(U) = bare + (tau^{eps,U} - tau^{eps,0})
///                                        + v^eps * (rho_nu^U - rho_nu^0),
/// or its (eps, nu) -> 0 limit bare + 2 diag(h_U^{-1} - h_0^{-1}).
struct CountertermParams {
    double epsilon = 0.0;
    double nu = 0.0;
    double kappa = 4.0;
    bool limiting = false;
    double tol = 1e-10;
    int max_iter = 200;
    double ball_radius = 0.9;  // admissible sup |U - bare|/bare
    double tol_eig = 1e-9;
};

struct CountertermState {
    Vec bare;
    Vec iterate;
    std::vector<double> residual_history;     // ||Phi(U) - U||_bare per iteration
    std::vector<double> contraction_history;  // successive residual ratios
    std::vector<double> min_ratio_history;    // min U/bare
    std::vector<double> max_ratio_history;    // max U/bare
    CountertermParams params;
    bool converged = false;
    bool positivity_ok = true;
    std::string failure;
};

/// sup |f/bare|, the solver norm.
inline double bare_norm(const Vec& f, const Vec& bare) {
    return (f.array() / bare.array()).abs().maxCoeff();
}

/// diag of the quantum Green function; strictly positive.
Vec rho_nu(const SpectralData& sd, double nu);

/// One application of Phi; re-decomposes h^{U_iter} internally (sparse solves
/// for the tau part, a confined spectral window for rho_nu).
Vec phi_map(const Vec& U_iter, const Vec& bare, const LatticeInteraction& li,
            const LatticeGrid& grid, const CountertermParams& p);

/// start = nullptr begins from the bare potential; a different admissible
/// start probes uniqueness of the fixed point.
CountertermState solve_counterterm(const Vec& bare, const LatticeGrid& grid,
                                   const CountertermParams& p, const Vec* start = nullptr);

/// Fixed point of U -> bare + 2 diag(h_U^{-1} - h_0^{-1}).
CountertermState solve_limiting(const Vec& bare, const LatticeGrid& grid,
                                const CountertermParams& p, const Vec* start = nullptr);

struct NonsolvabilityReport {
    std::vector<double> epsilons;
    std::vector<double> residuals;  // ||v^eps * alpha - tau^eps||_2 / ||tau^eps||_2 at best alpha
};

/// Least-squares solvability of v^eps * alpha = tau^eps on the given grid,
/// for a precomputed tau per epsilon.
double nonsolvability_residual(const LatticeInteraction& li, const LatticeGrid& grid,
                               const Vec& tau);

}  // namespace phi4lab
