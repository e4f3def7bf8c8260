#include <doctest.h>

#include "phi4lab/homogeneous.hpp"
#include "phi4lab/kernels.hpp"
#include "phi4lab/potential.hpp"
#include "phi4lab/rng.hpp"

using namespace phi4lab;

namespace {

SpectralData mild_trap(const LatticeGrid& g, double kappa, double theta = 2.0) {
    PotentialSpec p;
    p.theta = theta;
    const OperatorMatrix op = assemble_hamiltonian(g, eval_potential(p, g), kappa);
    return spectral_decompose(op, g.sites(), 1e-9, 1.5);
}

SpectralData homogeneous(const LatticeGrid& g, double kappa) {
    const OperatorMatrix op = assemble_hamiltonian(g, Vec::Constant(g.sites(), 1e-12), kappa);
    return spectral_decompose(op, g.sites(), 1e-9, 1.5);
}

}  // namespace

TEST_CASE("sharp cutoff with N above the spectrum equals G exactly") {
    const LatticeGrid g = build_grid(2.0, 10, Boundary::dirichlet);
    const SpectralData sd = mild_trap(g, 1.0);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    const KernelMatrix GN = green(sd, 2.0 * sd.eigenvalues(sd.count() - 1), Cutoff::sharp);
    CHECK((G.k - GN.k).array().abs().maxCoeff() == 0.0);
}

TEST_CASE("periodic homogeneous Green function matches the Bessel oracle") {
    const LatticeGrid g = build_grid(8.0, 64, Boundary::periodic);
    const double kappa = 4.0;
    const SpectralData sd = homogeneous(g, kappa);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    // window a << r << L
    const int i = g.index(32, 32);
    for (double r : {1.0, 1.5, 2.0}) {
        const int j = g.index(32 + static_cast<int>(std::round(r / g.spacing)), 32);
        const double rr = (g.site(i) - g.site(j)).norm();
        const double oracle = std::cyl_bessel_k(0.0, std::sqrt(2 * kappa) * rr) / M_PI;
        CHECK(G.k(i, j) == doctest::Approx(oracle).epsilon(0.05));
    }
}

TEST_CASE("G - G_N is positive semidefinite for the exponential cutoff") {
    const LatticeGrid g = build_grid(2.0, 8, Boundary::dirichlet);
    const SpectralData sd = mild_trap(g, 1.0);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    const KernelMatrix GN = green(sd, 5.0, Cutoff::exp);
    Eigen::SelfAdjointEigenSolver<Mat> es(G.k - GN.k);
    CHECK(es.eigenvalues()(0) >= -1e-10);
}

TEST_CASE("monotone truncation: N1 <= N2 gives psd increment") {
    const LatticeGrid g = build_grid(2.0, 8, Boundary::dirichlet);
    const SpectralData sd = mild_trap(g, 1.0);
    const KernelMatrix g1 = green(sd, 4.0, Cutoff::exp);
    const KernelMatrix g2 = green(sd, 16.0, Cutoff::exp);
    Eigen::SelfAdjointEigenSolver<Mat> es(g2.k - g1.k);
    CHECK(es.eigenvalues()(0) >= -1e-10);
}

TEST_CASE("heat kernel semigroup law under the lattice product") {
    const LatticeGrid g = build_grid(2.0, 10, Boundary::dirichlet);
    const SpectralData sd = mild_trap(g, 1.0);
    const KernelMatrix Ks = heat_kernel(sd, 0.3);
    const KernelMatrix Kt = heat_kernel(sd, 0.7);
    const KernelMatrix Kst = heat_kernel(sd, 1.0);
    const Mat prod = g.site_weight * Ks.k * Kt.k;
    CHECK((prod - Kst.k).array().abs().maxCoeff() < 1e-9);
}

TEST_CASE("heat kernel at t -> 0 approaches identity/a^2 on the diagonal") {
    const LatticeGrid g = build_grid(2.0, 8, Boundary::dirichlet);
    const SpectralData sd = mild_trap(g, 1.0);
    const KernelMatrix K = heat_kernel(sd, 1e-8);
    CHECK(K.k.diagonal().maxCoeff() == doctest::Approx(1.0 / g.site_weight).epsilon(1e-5));
    CHECK(K.k.diagonal().minCoeff() == doctest::Approx(1.0 / g.site_weight).epsilon(1e-5));
}

TEST_CASE("free lattice heat kernel matches the Gaussian in its window") {
    const LatticeGrid g = build_grid(8.0, 64, Boundary::periodic);
    const double kappa = 0.5;
    const SpectralData sd = homogeneous(g, kappa);
    const double t = 0.5;  // a^2 << t << L^2
    const KernelMatrix K = heat_kernel(sd, t);
    const int i = g.index(32, 32), j = g.index(36, 34);
    const Eigen::Vector2d dx = g.site(i) - g.site(j);
    const double psi =
        std::exp(-kappa * t) * std::exp(-dx.squaredNorm() / (2 * t)) / (2 * M_PI * t);
    CHECK(K.k(i, j) == doctest::Approx(psi).epsilon(0.02));
}

TEST_CASE("quantum green weights: scalar value, G limit, monotonicity") {
    CHECK(quantum_green_weight(1.0, 1.0, 0.0) == doctest::Approx(1.0 / (M_E - 1.0)));

    const LatticeGrid g = build_grid(2.0, 8, Boundary::dirichlet);
    const SpectralData sd = mild_trap(g, 1.0);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    const KernelMatrix Q = quantum_green(sd, 1e-4);
    CHECK(((Q.k - G.k).array().abs() / G.k.array().abs().max(1e-12)).maxCoeff() < 1e-3);

    Vec w = quantum_green_weights(sd, 0.7, 0.0);
    for (int k = 1; k < sd.count(); ++k) CHECK(w(k) <= w(k - 1) + 1e-15);
}

TEST_CASE("quantum green series matches nu sum e^{-nu n h}") {
    const LatticeGrid g = build_grid(2.0, 8, Boundary::dirichlet);
    const SpectralData sd = mild_trap(g, 1.0);
    const double nu = 0.5;
    const KernelMatrix Q = quantum_green(sd, nu);
    const int n_max = 60;
    Mat series = Mat::Zero(g.sites(), g.sites());
    for (int n = 1; n <= n_max; ++n) series += nu * heat_kernel(sd, nu * n).k;
    const double lam0 = sd.eigenvalues(0);
    const double tail = std::exp(-nu * n_max * lam0) / (nu * lam0);
    CHECK((series - Q.k).array().abs().maxCoeff() <= tail / g.site_weight + 1e-12);
}

TEST_CASE("green positivity: diagonal and quadratic form") {
    const LatticeGrid g = build_grid(2.0, 10, Boundary::dirichlet);
    const SpectralData sd = mild_trap(g, 1.0);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    CHECK(G.k.diagonal().minCoeff() > 0.0);
    std::mt19937_64 eng = make_engine(11, 0);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 100; ++trial) {
        Vec f(g.sites());
        for (int i = 0; i < g.sites(); ++i) f(i) = gauss(eng);
        CHECK(f.dot(G.k * f) >= -1e-10);
    }
}

TEST_CASE("resolvent identity across two potentials") {
    const LatticeGrid g = build_grid(2.0, 10, Boundary::dirichlet);
    PotentialSpec p;
    p.theta = 2.0;
    const Vec U1 = eval_potential(p, g);
    const Vec U2 = U1.array() + 0.7;
    const SpectralData s1 = spectral_decompose(assemble_hamiltonian(g, U1, 1.0), g.sites(), 1e-9, 1.5);
    const SpectralData s2 = spectral_decompose(assemble_hamiltonian(g, U2, 1.0), g.sites(), 1e-9, 1.5);
    const Mat G1 = green(s1, std::numeric_limits<double>::infinity(), Cutoff::exp).k;
    const Mat G2 = green(s2, std::numeric_limits<double>::infinity(), Cutoff::exp).k;
    // G1 - G2 = G1 (U2 - U1) G2; one lattice weight from the operator product
    const Mat rhs = g.site_weight * G1 * (U2 - U1).asDiagonal() * G2;
    CHECK((G1 - G2 - rhs).norm() / rhs.norm() < 1e-8);
}

TEST_CASE("heat kernel domination: larger potential, smaller kernel") {
    const LatticeGrid g = build_grid(2.0, 10, Boundary::dirichlet);
    PotentialSpec p;
    p.theta = 2.0;
    const Vec U2 = eval_potential(p, g);
    const Vec U1 = U2.array() + 1.5;  // U1 >= U2
    const SpectralData s1 = spectral_decompose(assemble_hamiltonian(g, U1, 1.0), g.sites(), 1e-9, 1.5);
    const SpectralData s2 = spectral_decompose(assemble_hamiltonian(g, U2, 1.0), g.sites(), 1e-9, 1.5);
    for (double t : {0.1, 1.0, 10.0}) {
        const Mat K1 = heat_kernel(s1, t).k;
        const Mat K2 = heat_kernel(s2, t).k;
        CHECK(((K1 - K2).array() <= 1e-10).all());
    }
}

TEST_CASE("heat kernels are entrywise nonnegative up to roundoff") {
    const LatticeGrid g = build_grid(2.0, 10, Boundary::dirichlet);
    const SpectralData sd = mild_trap(g, 1.0);
    const KernelMatrix K = heat_kernel(sd, 0.5);
    CHECK(K.k.minCoeff() >= -1e-10);
}

TEST_CASE("gradient kernel: isotropy on the homogeneous grid") {
    const LatticeGrid g = build_grid(6.0, 48, Boundary::periodic);
    const SpectralData sd = homogeneous(g, 4.0);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    const GradientKernel grad = green_gradient(G);
    const int y = g.index(24, 24);
    // direction of grad_x G(x,y) aligns with x - y
    for (auto [dx, dy] : std::vector<std::pair<int, int>>{{6, 0}, {0, 6}, {5, 5}}) {
        const int x = g.index(24 + dx, 24 + dy);
        const Eigen::Vector2d dir(grad.dx(x, y), grad.dy(x, y));
        const Eigen::Vector2d sep = g.site(x) - g.site(y);
        const double cross = std::abs(dir.x() * sep.y() - dir.y() * sep.x());
        CHECK(cross / (dir.norm() * sep.norm()) < 1e-6);
    }
    // magnitude against the Bessel derivative oracle
    const int x = g.index(30, 24);
    const double r = (g.site(x) - g.site(y)).norm();
    const double oracle = std::sqrt(8.0) * std::cyl_bessel_k(1.0, std::sqrt(8.0) * r) / M_PI;
    CHECK(std::hypot(grad.dx(x, y), grad.dy(x, y)) == doctest::Approx(oracle).epsilon(0.05));
}

TEST_CASE("gradient of a symmetric kernel vanishes at the symmetric centre") {
    const LatticeGrid g = build_grid(2.0, 9, Boundary::dirichlet);  // odd: exact centre site
    const SpectralData sd = mild_trap(g, 1.0);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    const GradientKernel grad = green_gradient(G);
    const int c = g.index(4, 4);
    CHECK(std::abs(grad.dx(c, c)) < 1e-10);
    CHECK(std::abs(grad.dy(c, c)) < 1e-10);
}

TEST_CASE("trace gap vanishes for identical potentials and stays finite") {
    const LatticeGrid g = build_grid(4.0, 16, Boundary::dirichlet);
    PotentialSpec p;
    p.theta = 4.0;
    const Vec U = eval_potential(p, g);
    const OperatorMatrix op = assemble_hamiltonian(g, U, 2.0);
    const SpectralData sd = spectral_decompose(op, g.sites(), 1e-9, 1.5);
    const TraceGap same = riemann_trace_gap(op, op, sd, sd, 0.1);
    CHECK(same.gap_L1 == 0.0);

    Vec U2 = U.array() + 1.0;
    const OperatorMatrix op2 = assemble_hamiltonian(g, U2, 2.0);
    const SpectralData sd2 = spectral_decompose(op2, g.sites(), 1e-9, 1.5);
    const TraceGap big = riemann_trace_gap(op, op2, sd, sd2, 1e4);
    const Vec T = resolvent_diagonal(op) - resolvent_diagonal(op2);
    CHECK(big.gap_L1 <= 2.0 * g.site_weight * T.array().abs().sum() + 1e-9);
}

TEST_CASE("tail tolerance flags insufficient k_max") {
    const LatticeGrid g = build_grid(8.0, 16, Boundary::dirichlet);
    PotentialSpec p;
    const OperatorMatrix op = assemble_hamiltonian(g, eval_potential(p, g), 4.0);
    const SpectralData sd = spectral_decompose(op, 10, 1e-9, 1.5);
    CHECK_THROWS_AS(green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp, 1e-12),
                    std::runtime_error);
}

TEST_CASE("exact inverse kernel agrees with a complete spectral sum") {
    const LatticeGrid g = build_grid(2.0, 10, Boundary::dirichlet);
    PotentialSpec p;
    p.theta = 2.0;
    const OperatorMatrix op = assemble_hamiltonian(g, eval_potential(p, g), 1.0);
    const SpectralData sd = spectral_decompose(op, g.sites(), 1e-9, 1.5);
    const Mat Gs = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp).k;
    const Mat Ge = inverse_kernel_dense(op);
    CHECK((Gs - Ge).norm() / Ge.norm() < 1e-9);
}

TEST_CASE("chebyshev heat application matches the spectral exponential") {
    const LatticeGrid g = build_grid(3.0, 14, Boundary::dirichlet);
    PotentialSpec p;
    p.theta = 4.0;
    const Vec U = eval_potential(p, g);
    const OperatorMatrix op = assemble_hamiltonian(g, U, 2.0);
    const SpectralData sd = spectral_decompose(op, g.sites(), 1e-9, 1.5);
    const double lam_max = 2.0 + U.maxCoeff() + 8.0 / g.site_weight;
    for (double t : {0.02, 0.2, 1.0}) {
        const KernelMatrix K = heat_kernel(sd, t);
        Vec v = Vec::Zero(g.sites());
        v(g.index(7, 6)) = 1.0;
        const Vec via_cheb = heat_apply(op.H, lam_max, t, v);
        const Vec via_spec = g.site_weight * (K.k * v);
        CHECK((via_cheb - via_spec).cwiseAbs().maxCoeff() < 1e-11);
    }
}
