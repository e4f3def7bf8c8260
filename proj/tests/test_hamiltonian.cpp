#include <doctest.h>

#include <algorithm>

#include "phi4lab/hamiltonian.hpp"
#include "phi4lab/spectral.hpp"

using namespace phi4lab;

namespace {

// discrete Fourier diagonalization of the periodic U = 0 Hamiltonian
std::vector<double> plane_wave_spectrum(const LatticeGrid& g, double kappa) {
    std::vector<double> lam;
    for (int k1 = 0; k1 < g.n; ++k1)
        for (int k2 = 0; k2 < g.n; ++k2)
            lam.push_back(kappa + (2.0 - std::cos(2 * M_PI * k1 / g.n) -
                                   std::cos(2 * M_PI * k2 / g.n)) /
                                      g.site_weight);
    std::sort(lam.begin(), lam.end());
    return lam;
}

}  // namespace

TEST_CASE("assembly is symmetric and rejects bad input") {
    const LatticeGrid g = build_grid(4.0, 12, Boundary::dirichlet);
    const Vec U = Vec::Ones(g.sites());
    const OperatorMatrix op = assemble_hamiltonian(g, U, 1.0);
    const SpMat diff = SpMat(op.H - SpMat(op.H.transpose()));
    double asym = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SpMat::InnerIterator it(diff, k); it; ++it) asym = std::max(asym, std::abs(it.value()));
    CHECK(asym == 0.0);

    CHECK_THROWS_AS(assemble_hamiltonian(g, U, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble_hamiltonian(g, Vec::Zero(g.sites()), 1.0), std::invalid_argument);
}

TEST_CASE("periodic U=0 spectrum matches the plane-wave oracle") {
    const LatticeGrid g = build_grid(3.0, 10, Boundary::periodic);
    const double kappa = 2.0;
    const Vec U = Vec::Constant(g.sites(), 1e-12);  // U = 0 limit, positivity guard
    const OperatorMatrix op = assemble_hamiltonian(g, U, kappa);
    const SpectralData sd = spectral_decompose(op, g.sites(), 1e-9, 1.5);

    const std::vector<double> oracle = plane_wave_spectrum(g, kappa);
    for (int k = 0; k < g.sites(); ++k)
        CHECK(sd.eigenvalues(k) == doctest::Approx(oracle[k]).epsilon(1e-10));
}

TEST_CASE("constant potential shifts the spectrum exactly") {
    const LatticeGrid g = build_grid(3.0, 8, Boundary::periodic);
    const OperatorMatrix op0 = assemble_hamiltonian(g, Vec::Constant(g.sites(), 1e-12), 1.0);
    const OperatorMatrix op1 = assemble_hamiltonian(g, Vec::Ones(g.sites()), 1.0);
    const SpectralData s0 = spectral_decompose(op0, 10, 1e-9, 1.5);
    const SpectralData s1 = spectral_decompose(op1, 10, 1e-9, 1.5);
    for (int k = 0; k < 10; ++k)
        CHECK(s1.eigenvalues(k) - s0.eigenvalues(k) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("dirichlet U=0 lowest mode matches the discrete sine eigenvalue") {
    const LatticeGrid g = build_grid(M_PI / 2, 16, Boundary::dirichlet);
    const double kappa = 1.0;
    const OperatorMatrix op = assemble_hamiltonian(g, Vec::Constant(g.sites(), 1e-12), kappa);
    const SpectralData sd = spectral_decompose(op, 1, 1e-9, 1.5);
    const double lam1d = (1.0 - std::cos(M_PI / (g.n + 1))) / g.site_weight;
    CHECK(sd.eigenvalues(0) == doctest::Approx(kappa + 2 * lam1d).epsilon(1e-10));
}
