#pragma once

#include "phi4lab/spectral.hpp"

namespace phi4lab {

enum class Cutoff { exp, sharp };

enum class KernelKind { green, green_truncated, heat, quantum_green, quantum_green_partial };

/// Dense symmetric grid kernel K(x,y); operator action is
/// (K f)(x) = a^2 sum_y K(x,y) f(y).
struct KernelMatrix {
    Mat k;
    KernelKind kind = KernelKind::green;
    double N = std::numeric_limits<double>::infinity();  // spectral cutoff
    double t = 0.0;                                      // heat time
    double nu = 0.0;                                     // inverse-temperature scale
    double t_partial = 0.0;
    Cutoff cutoff = Cutoff::exp;
    LatticeGrid grid;
};

/// theta(lambda/N) for the chosen regularisation.
inline double cutoff_factor(Cutoff c, double lambda, double N) {
    if (std::isinf(N)) return 1.0;
    return c == Cutoff::exp ? std::exp(-lambda / N) : (lambda <= N ? 1.0 : 0.0);
}

/// Spectral weight of the quantum Green function, nu e^{t nu lambda}/(e^{nu lambda}-1),
/// evaluated without overflow.
inline double quantum_green_weight(double lambda, double nu, double t_partial) {
    const double z = nu * lambda;
    return nu * std::exp((t_partial - 1.0) * z) / (-std::expm1(-z));
}

/// G_N = theta(h/N)/h as a dense kernel; N = inf gives G = h^{-1} over the
/// retained modes. The dropped-mode tail is bounded by
/// (sites - K) * theta(lambda_K/N)/lambda_K and must stay below tail_tol.
KernelMatrix green(const SpectralData& sd, double N, Cutoff cutoff,
                   double tail_tol = std::numeric_limits<double>::infinity());

KernelMatrix heat_kernel(const SpectralData& sd, double t);

/// nu e^{t_partial nu h}/(e^{nu h}-1); t_partial = 0 is the quantum Green function.
KernelMatrix quantum_green(const SpectralData& sd, double nu, double t_partial = 0.0);

/// Single kernel entries, O(K) each; used where full matrices are wasteful.
double kernel_entry(const SpectralData& sd, const Vec& weights, int i, int j);
Vec green_weights(const SpectralData& sd, double N, Cutoff cutoff);
Vec heat_weights(const SpectralData& sd, double t);
Vec quantum_green_weights(const SpectralData& sd, double nu, double t_partial = 0.0);

/// Finite-difference gradient of K(.,y) in the first argument; central
/// stencils inside, one-sided on Dirichlet edges.
struct GradientKernel {
    Mat dx, dy;
};
GradientKernel green_gradient(const KernelMatrix& K);

/// diag(h^{-1}) by sparse Cholesky solves, exact to solver precision.
Vec resolvent_diagonal(const OperatorMatrix& op);

/// The full Green kernel G = h^{-1}/a^2 by sparse Cholesky, exact to solver
/// precision. Spectral sums with k_max < sites carry a rank-truncation ghost
/// floor (~ product of mode tails) that drowns the true sub-exponential
/// range; decay fits need this route.
Mat inverse_kernel_dense(const OperatorMatrix& op);

/// e^{-t H} v by Chebyshev expansion on [0, lambda_max]; every eigenvalue of
/// H must lie inside (use a Gershgorin bound of a capped operator).
Vec heat_apply(const SpMat& H, double lambda_max, double t, const Vec& v);

/// T(x) = diag(h_U^{-1} - h_U2^{-1}) against its nu-Riemann-sum version
/// T_nu(x) = diag(G_nu^U - G_nu^U2); returns (a^2 sum |T - T_nu|, sup |T|).
struct TraceGap {
    double gap_L1 = 0.0;
    double T_sup = 0.0;
};
TraceGap riemann_trace_gap(const OperatorMatrix& opU, const OperatorMatrix& opU2,
                           const SpectralData& sdU, const SpectralData& sdU2, double nu);

}  // namespace phi4lab
