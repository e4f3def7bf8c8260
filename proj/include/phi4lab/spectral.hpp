#pragma once

#include "phi4lab/hamiltonian.hpp"

namespace phi4lab {

/// Eigenpairs of the lattice Hamiltonian, orthonormal under the lattice
/// inner product a^2 sum conj(u) u.
struct SpectralData {
    Vec eigenvalues;  // ascending, size K
    Mat modes;        // sites x K, column k is u_k
    LatticeGrid grid;
    double trace_exponent_s = 1.5;
    double trace_h_minus_s = 0.0;  // sum over retained modes of lambda^{-s}
    double tol_eig = 1e-9;

    int count() const { return static_cast<int>(eigenvalues.size()); }
    bool complete() const { return count() == grid.sites(); }
};

/// Dense full decomposition, truncated to the k_max lowest modes.
/// Residuals ||H u - lambda u|| <= tol_eig * lambda are verified for every
/// retained mode; failure reports the first offending index.
SpectralData spectral_decompose(const OperatorMatrix& op, int k_max, double tol_eig,
                                double trace_exponent_s);

/// Toy entry point for tests: decompose an explicit dense symmetric matrix,
/// orthonormalizing in the weighted inner product of `grid`.
SpectralData spectral_decompose_dense(const Mat& H, const LatticeGrid& grid, int k_max,
                                      double tol_eig, double trace_exponent_s);

/// Every eigenpair with lambda <= lambda_cap, however many there are. The
/// workhorse behind kernels whose spectral weights die above lambda_cap.
SpectralData spectral_window(const OperatorMatrix& op, double lambda_cap, double tol_eig,
                             double trace_exponent_s);

}  // namespace phi4lab
