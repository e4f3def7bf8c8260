#include <doctest.h>

#include "phi4lab/homogeneous.hpp"
#include "phi4lab/interaction.hpp"
#include "phi4lab/potential.hpp"
#include "phi4lab/spectral.hpp"

using namespace phi4lab;

TEST_CASE("base profile: even support, unit mass, positive") {
    CHECK(base_profile(0.0) > 0.0);
    CHECK(base_profile(0.999) >= 0.0);
    CHECK(base_profile(1.0) == 0.0);
    // mass check by radial quadrature: 2 pi int r v(r) dr = 1
    const int m = 2000;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        const double r = (i + 0.5) / m;
        acc += base_profile(r) * r / m;
    }
    CHECK(2 * M_PI * acc == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("lattice interaction renormalizes to unit quadrature mass") {
    const LatticeGrid g = build_grid(4.0, 32, Boundary::dirichlet);
    const LatticeInteraction li = discretize_interaction(6.0 * g.spacing, g);
    double total = 0.0;
    for (double v : li.values) total += v;
    CHECK(g.site_weight * total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(discretize_interaction(1.5 * g.spacing, g), std::invalid_argument);
}

TEST_CASE("sampled interaction is of positive type on the lattice") {
    const LatticeGrid g = build_grid(4.0, 32, Boundary::periodic);
    const LatticeInteraction li = discretize_interaction(5.0 * g.spacing, g);
    // DFT of the offset stencil over the periodic grid
    double worst = 0.0;
    for (int k1 = 0; k1 < g.n; k1 += 3)
        for (int k2 = 0; k2 < g.n; k2 += 3) {
            double re = 0.0;
            for (size_t s = 0; s < li.offsets.size(); ++s)
                re += li.values[s] * std::cos(2 * M_PI *
                                              (k1 * li.offsets[s].x() + k2 * li.offsets[s].y()) /
                                              static_cast<double>(g.n));
            worst = std::min(worst, re);
        }
    CHECK(worst >= -1e-10);
}

TEST_CASE("tau with the delta interaction returns the Green diagonal") {
    const LatticeGrid g = build_grid(2.0, 10, Boundary::dirichlet);
    PotentialSpec p;
    p.theta = 2.0;
    const OperatorMatrix op = assemble_hamiltonian(g, eval_potential(p, g), 1.0);
    const SpectralData sd = spectral_decompose(op, g.sites(), 1e-9, 1.5);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    const RenormData rd = tau_and_E(G, delta_interaction(g));
    CHECK((rd.tau - G.k.diagonal()).array().abs().maxCoeff() < 1e-12);
}

TEST_CASE("tau is positive and E^eps positive for a smooth interaction") {
    const LatticeGrid g = build_grid(2.0, 16, Boundary::dirichlet);
    PotentialSpec p;
    p.theta = 2.0;
    const OperatorMatrix op = assemble_hamiltonian(g, eval_potential(p, g), 1.0);
    const SpectralData sd = spectral_decompose(op, g.sites(), 1e-9, 1.5);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    const LatticeInteraction li = discretize_interaction(4.0 * g.spacing, g);
    const RenormData rd = tau_and_E(G, li);
    CHECK(rd.tau.minCoeff() > 0.0);
    CHECK(rd.E_eps > 0.0);
}

TEST_CASE("tau_at_sites agrees with the dense route") {
    const LatticeGrid g = build_grid(2.0, 16, Boundary::dirichlet);
    PotentialSpec p;
    p.theta = 2.0;
    const OperatorMatrix op = assemble_hamiltonian(g, eval_potential(p, g), 1.0);
    const SpectralData sd = spectral_decompose(op, g.sites(), 1e-9, 1.5);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    const LatticeInteraction li = discretize_interaction(4.0 * g.spacing, g);
    const RenormData rd = tau_and_E(G, li);

    Eigen::SimplicialLLT<SpMat> llt(op.H);
    const std::vector<int> sites = {0, 17, 100, g.sites() - 1};
    const Vec tt = tau_at_sites(li, g, llt, sites);
    for (size_t q = 0; q < sites.size(); ++q)
        CHECK(tt(q) == doctest::Approx(rd.tau(sites[q])).epsilon(1e-7));
}

TEST_CASE("homogeneous reference reproduces the periodic eigensolve") {
    const LatticeGrid dg = build_grid(3.0, 12, Boundary::dirichlet);
    const double kappa = 2.0;
    const HomogeneousReference hom = HomogeneousReference::companion(dg, kappa);
    CHECK(hom.grid.spacing == doctest::Approx(dg.spacing).epsilon(1e-15));

    const OperatorMatrix op =
        assemble_hamiltonian(hom.grid, Vec::Constant(hom.grid.sites(), 1e-13), kappa);
    const SpectralData sd = spectral_decompose(op, hom.grid.sites(), 1e-9, 1.5);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    // diagonal average vs analytic
    CHECK(hom.green_diagonal() == doctest::Approx(G.k.diagonal().mean()).epsilon(1e-9));
    // an offset entry
    const std::vector<double> g0 = hom.green_offsets({{2, 1}});
    CHECK(g0[0] == doctest::Approx(G.k(hom.grid.index(0, 0), hom.grid.index(2, 1))).epsilon(1e-9));
    // density vs quantum green diagonal
    const KernelMatrix Q = quantum_green(sd, 0.3);
    CHECK(hom.density(0.3) == doctest::Approx(Q.k.diagonal().mean()).epsilon(1e-9));
}
