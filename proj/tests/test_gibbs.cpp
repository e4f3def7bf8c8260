#include <doctest.h>

#include "phi4lab/gibbs.hpp"
#include "phi4lab/potential.hpp"
#include "phi4lab/rng.hpp"

using namespace phi4lab;

namespace {

struct Setup {
    LatticeGrid grid;
    SpectralData sd;
    KernelMatrix G;
};

Setup make_setup(int n = 10) {
    Setup s;
    s.grid = build_grid(2.0, n, Boundary::dirichlet);
    PotentialSpec p;
    p.theta = 2.0;
    const OperatorMatrix op = assemble_hamiltonian(s.grid, eval_potential(p, s.grid), 1.0);
    s.sd = spectral_decompose(op, s.grid.sites(), 1e-9, 1.5);
    s.G = green(s.sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    return s;
}

}  // namespace

TEST_CASE("partition estimate of the zero interaction is exactly one") {
    const MeanErr z = partition_estimate(Vec::Zero(5000));
    CHECK(z.value == 1.0);
    CHECK(z.err == 0.0);
    Vec bad = Vec::Zero(5000);
    bad(7) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(partition_estimate(bad), std::invalid_argument);
    CHECK_THROWS_AS(partition_estimate(Vec::Zero(10)), std::invalid_argument);
}

TEST_CASE("one-mode toy partition function matches polar quadrature") {
    // single mode, lambda = 1: phi = X u; V = (c/2) a^2 sum :|phi|^4:
    const LatticeGrid g = build_grid(2.0, 8, Boundary::dirichlet);
    Mat H = Mat::Zero(g.sites(), g.sites());
    H(0, 0) = 1.0;
    for (int i = 1; i < g.sites(); ++i) H(i, i) = 1e9;
    const SpectralData sd = spectral_decompose_dense(H, g, 1, 1e-10, 1.5);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    const InteractionEvaluator ev(G, delta_interaction(g));

    const int B = 50000;
    const FieldBatch b = sample_free_field(sd, std::numeric_limits<double>::infinity(),
                                           Cutoff::exp, B, 5, 0);
    const double coupling = 0.4;
    const MeanErr z = partition_estimate(coupling * ev.evaluate(b, InteractionKind::V_N));

    // oracle: with u the lattice-normalized mode, q4 = a^2 sum |u|^4,
    // :|phi|^4: integrates to q4 (|X|^4 - 4|X|^2 + 2), so
    // zeta = E[exp(-c q4/2 (|X|^4 - 4|X|^2 + 2))], X standard complex normal:
    // polar integral int_0^inf e^{-f(r^2)} 2 r e^{-r^2} dr
    const Vec u = sd.modes.col(0);
    const double q4 = g.site_weight * u.array().pow(4).sum();
    const int m = 40000;
    double oracle = 0.0;
    const double rmax = 6.0;
    for (int i = 0; i < m; ++i) {
        const double r = (i + 0.5) * rmax / m;
        const double s2 = r * r;
        const double V = 0.5 * coupling * q4 * (s2 * s2 - 4.0 * s2 + 2.0);
        oracle += std::exp(-V) * 2.0 * r * std::exp(-s2) * rmax / m;
    }
    CHECK(std::abs(z.value - oracle) <= 3.0 * z.err);
}

TEST_CASE("free correlation permanents at p = 1 and 2") {
    const Setup s = make_setup();
    const int x1 = 12, x2 = 34, t1 = 56, t2 = 7;
    CHECK(free_corr(s.G, {x1}, {t1}).real() == doctest::Approx(s.G.k(x1, t1)));
    const double expect = s.G.k(x1, t1) * s.G.k(x2, t2) + s.G.k(x1, t2) * s.G.k(x2, t1);
    CHECK(free_corr(s.G, {x1, x2}, {t1, t2}).real() == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("free-case corr_estimate reproduces free_corr within 4 sigma") {
    const Setup s = make_setup();
    const int B = 40000;
    const FieldBatch b = sample_free_field(s.sd, std::numeric_limits<double>::infinity(),
                                           Cutoff::exp, B, 17, 0);
    const Vec zero = Vec::Zero(B);
    std::mt19937_64 eng = make_engine(23, 0);
    std::uniform_int_distribution<int> site(0, s.grid.sites() - 1);
    for (int trial = 0; trial < 10; ++trial) {
        const std::vector<int> xs = {site(eng)};
        const std::vector<int> ts = {site(eng)};
        const CorrelationEstimate e = corr_estimate(b, zero, s.G, xs, ts, false);
        CHECK(std::abs(e.value - free_corr(s.G, xs, ts)) <= 4.0 * e.err + 1e-12);
    }
    for (int trial = 0; trial < 5; ++trial) {
        const std::vector<int> xs = {site(eng), site(eng)};
        const std::vector<int> ts = {site(eng), site(eng)};
        const CorrelationEstimate e = corr_estimate(b, zero, s.G, xs, ts, false);
        CHECK(std::abs(e.value - free_corr(s.G, xs, ts)) <= 4.0 * e.err + 1e-12);
    }
}

TEST_CASE("free-case Wick-ordered correlations vanish") {
    const Setup s = make_setup();
    const int B = 40000;
    const FieldBatch b = sample_free_field(s.sd, std::numeric_limits<double>::infinity(),
                                           Cutoff::exp, B, 19, 0);
    const Vec zero = Vec::Zero(B);
    const CorrelationEstimate e = corr_estimate(b, zero, s.G, {3}, {77}, true);
    CHECK(std::abs(e.value) <= 4.0 * e.err);
    // and the combination route agrees: gamma-hat_1 = gamma_1 - G
    const CorrelationEstimate c = corr_combination(b, zero, s.G, {3}, {77});
    CHECK(std::abs(c.value - e.value) <= 1e-10 + 4.0 * std::hypot(c.err, e.err));
}

TEST_CASE("interacting two-route agreement at p = 2 on a toy") {
    const Setup s = make_setup(8);
    const int B = 60000;
    const FieldBatch b = sample_free_field(s.sd, std::numeric_limits<double>::infinity(),
                                           Cutoff::exp, B, 31, 0);
    const InteractionEvaluator ev(s.G, delta_interaction(s.grid));
    const Vec V = 0.5 * ev.evaluate(b, InteractionKind::V_N);
    const std::vector<int> xs = {10, 30}, ts = {50, 20};
    const CorrelationEstimate direct = corr_estimate(b, V, s.G, xs, ts, true);
    const CorrelationEstimate comb = corr_combination(b, V, s.G, xs, ts);
    CHECK(std::abs(direct.value - comb.value) <= 4.0 * std::hypot(direct.err, comb.err));
}

TEST_CASE("gauge selection: unequal phi counts average to zero") {
    const Setup s = make_setup();
    const int B = 30000;
    const FieldBatch b = sample_free_field(s.sd, std::numeric_limits<double>::infinity(),
                                           Cutoff::exp, B, 37, 0);
    const CVec mono = b.fields.row(3).transpose().cwiseProduct(b.fields.row(5).transpose());
    const Cplx m = mono.mean();
    const double se = std::sqrt(mono.cwiseAbs2().mean() / B);
    CHECK(std::abs(m) <= 4.0 * se);
}

TEST_CASE("upsilon weight: reference values and permutation invariance") {
    CHECK(upsilon({{2.0, 0.0}}, 12.0) == doctest::Approx(1.0 / 4097.0));
    // two points at distance 0.5 merge into one component, min-norm representative
    const double v = upsilon({{1.0, 0.0}, {1.5, 0.0}}, 2.0);
    CHECK(v == doctest::Approx(1.0 / 2.0));
    // distance 3 apart, both at the origin-norm 0: product of two unit factors
    CHECK(upsilon({{0.0, 0.0}, {3.0, 0.0}}, 12.0) ==
          doctest::Approx(1.0 / (1.0 + std::pow(3.0, 12.0))));
    // permutation invariance
    CHECK(upsilon({{0.3, 1.0}, {2.5, 0.1}, {0.4, 0.9}}, 5.0) ==
          doctest::Approx(upsilon({{2.5, 0.1}, {0.4, 0.9}, {0.3, 1.0}}, 5.0)));
    CHECK(upsilon({{0.0, 0.0}}, 12.0) == doctest::Approx(1.0));
}

TEST_CASE("integration-by-parts representation on a 6-mode system") {
    // free case: representation gives zero for gamma-hat_1
    const LatticeGrid g = build_grid(2.0, 8, Boundary::dirichlet);
    Mat H = Mat::Zero(g.sites(), g.sites());
    for (int i = 0; i < g.sites(); ++i) H(i, i) = i < 6 ? 1.0 + 0.5 * i : 1e9;
    // couple the low block so modes spread over several sites
    for (int i = 0; i + 1 < 6; ++i) {
        H(i, i + 1) = -0.3;
        H(i + 1, i) = -0.3;
    }
    const SpectralData sd = spectral_decompose_dense(H, g, 6, 1e-10, 1.5);
    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    const LatticeInteraction li = delta_interaction(g);

    const IbpReport quartic = ibp_corr_check(sd, G, li, 0.05, 1, 3, 80000, 61);
    CHECK(quartic.sigma_distance <= 4.0);

    SpectralData sd7 = sd;
    sd7.eigenvalues = Vec::Ones(7);
    sd7.modes = Mat::Ones(g.sites(), 7);
    CHECK_THROWS_AS(ibp_corr_check(sd7, G, li, 0.1, 1, 3, 100, 1), std::invalid_argument);
}
