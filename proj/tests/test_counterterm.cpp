#include <doctest.h>

#include "phi4lab/counterterm.hpp"
#include "phi4lab/potential.hpp"

using namespace phi4lab;

namespace {

struct Setup {
    LatticeGrid grid;
    Vec bare;
    PotentialSpec pot;
};

Setup make_setup(int n = 24, double L = 6.0) {
    Setup s;
    s.grid = build_grid(L, n, Boundary::dirichlet);
    s.pot.theta = 12.0;
    s.bare = eval_potential(s.pot, s.grid);
    return s;
}

}  // namespace

TEST_CASE("rho_nu: single-mode weight and the small-nu Green limit") {
    const LatticeGrid g = build_grid(2.0, 8, Boundary::dirichlet);
    Mat H = Mat::Zero(g.sites(), g.sites());
    H(0, 0) = 1.0;
    for (int i = 1; i < g.sites(); ++i) H(i, i) = 1e9;
    const SpectralData one = spectral_decompose_dense(H, g, 1, 1e-10, 1.5);
    const Vec rho = rho_nu(one, 1.0);
    const Vec expect = one.modes.col(0).array().square() / (M_E - 1.0);
    CHECK((rho - expect).cwiseAbs().maxCoeff() < 1e-12);

    PotentialSpec p;
    p.theta = 2.0;
    const OperatorMatrix op = assemble_hamiltonian(g, eval_potential(p, g), 1.0);
    const SpectralData sd = spectral_decompose(op, g.sites(), 1e-9, 1.5);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    const Vec rho_small = rho_nu(sd, 1e-6);
    CHECK(((rho_small - G.k.diagonal()).array().abs() /
           G.k.diagonal().array())
              .maxCoeff() < 1e-4);
}

TEST_CASE("solver converges, is idempotent at the fixed point, and is unique") {
    const Setup s = make_setup();
    CountertermParams p;
    p.epsilon = 4.0 * s.grid.spacing;
    p.nu = 0.1;
    p.kappa = 16.0;
    p.tol = 1e-10;

    const CountertermState st = solve_counterterm(s.bare, s.grid, p);
    CHECK(st.converged);
    CHECK(st.residual_history.back() <= p.tol);
    CHECK(st.positivity_ok);
    CHECK(st.residual_history.size() <= 50);

    // residuals strictly decreasing after the second iteration
    for (size_t i = 2; i < st.residual_history.size(); ++i)
        CHECK(st.residual_history[i] < st.residual_history[i - 1]);

    // re-applying Phi at the fixed point stays within tolerance
    const LatticeInteraction li = discretize_interaction(p.epsilon, s.grid);
    const Vec again = phi_map(st.iterate, s.bare, li, s.grid, p);
    CHECK(bare_norm(again - st.iterate, s.bare) <= 2.0 * p.tol);

    // second start point lands on the same fixed point
    const Vec start2 = 1.1 * s.bare;
    const CountertermState st2 = solve_counterterm(s.bare, s.grid, p, &start2);
    CHECK(st2.converged);
    CHECK(bare_norm(st.iterate - st2.iterate, s.bare) <= 10.0 * p.tol);

    // iterate stays inside the admissible ball
    CHECK(bare_norm(st.iterate - s.bare, s.bare) <= p.ball_radius);
}

TEST_CASE("tiny kappa is detected as a hypothesis violation") {
    const Setup s = make_setup(16, 4.0);
    CountertermParams p;
    p.epsilon = 4.0 * s.grid.spacing;
    p.nu = 0.1;
    p.kappa = 0.01;
    const CountertermState st = solve_counterterm(s.bare, s.grid, p);
    CHECK_FALSE(st.converged);
    CHECK(!st.failure.empty());
}

TEST_CASE("limiting equation: fixed point and consistency of the map") {
    const Setup s = make_setup(20, 5.0);
    CountertermParams p;
    p.kappa = 16.0;
    p.tol = 1e-10;
    const CountertermState st = solve_limiting(s.bare, s.grid, p);
    CHECK(st.converged);
    // U solves bare = U - 2 diag(h_U^{-1} - h_0^{-1})
    const OperatorMatrix op = assemble_hamiltonian(s.grid, st.iterate, p.kappa);
    const Vec diag = resolvent_diagonal(op);
    const double g0 = HomogeneousReference::companion(s.grid, p.kappa).green_diagonal();
    const Vec residual = s.bare - st.iterate + 2.0 * (diag.array() - g0).matrix();
    CHECK(bare_norm(residual, s.bare) <= 10.0 * p.tol);
}

TEST_CASE("least-squares solvability: homogeneous and constructed instances") {
    const LatticeGrid g = build_grid(4.0, 24, Boundary::periodic);
    const LatticeInteraction li = discretize_interaction(4.0 * g.spacing, g);

    // homogeneous: constant tau is solved by a constant alpha
    const Vec tau_const = Vec::Constant(g.sites(), 0.37);
    CHECK(nonsolvability_residual(li, g, tau_const) <= 1e-8);

    // constructed solvable instance: tau = v * beta recovers residual ~ 0
    Vec beta(g.sites());
    for (int i = 0; i < g.sites(); ++i)
        beta(i) = std::exp(-g.site(i).squaredNorm() / 2.0) + 0.2;
    const Vec tau = convolve(li, g, beta);
    CHECK(nonsolvability_residual(li, g, tau) <= 1e-8);
}
