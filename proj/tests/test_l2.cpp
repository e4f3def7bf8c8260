#include <doctest.h>

#include "phi4lab/l2_distance.hpp"
#include "phi4lab/potential.hpp"

using namespace phi4lab;

namespace {

SpectralData small_trap(const LatticeGrid& g, double kappa = 1.0) {
    PotentialSpec p;
    p.theta = 2.0;
    const OperatorMatrix op = assemble_hamiltonian(g, eval_potential(p, g), kappa);
    return spectral_decompose(op, g.sites(), 1e-9, 1.5);
}

}  // namespace

TEST_CASE("identical cutoffs give exactly zero distance") {
    const LatticeGrid g = build_grid(2.0, 10, Boundary::dirichlet);
    const SpectralData sd = small_trap(g);
    L2DistanceParams p;
    p.N = 16.0;
    p.M = 16.0;
    p.epsilon = 3.0 * g.spacing;
    CHECK(l2_distance_exact(sd, InteractionPair::VN_VM, p) == 0.0);
}

TEST_CASE("closed form matches direct Monte Carlo variance") {
    const LatticeGrid g = build_grid(2.0, 10, Boundary::dirichlet);
    const SpectralData sd = small_trap(g);
    const double N = 6.0, M = 24.0;
    const LatticeInteraction li = discretize_interaction(3.0 * g.spacing, g);

    const double exact2 = quartic_second_moment(sd, li, N, N, Cutoff::exp) +
                          quartic_second_moment(sd, li, M, M, Cutoff::exp) -
                          2.0 * quartic_second_moment(sd, li, N, M, Cutoff::exp);

    const KernelMatrix GN = green(sd, N, Cutoff::exp);
    const KernelMatrix GM = green(sd, M, Cutoff::exp);
    const InteractionEvaluator evN(GN, li), evM(GM, li);
    const int B = 60000;
    const FieldBatch bN = sample_free_field(sd, N, Cutoff::exp, B, 101, 0);
    FieldBatch bM = field_from_coords(sd, M, Cutoff::exp, bN.coords);  // coupled cutoffs
    const Vec diff = evM.evaluate(bM, InteractionKind::V_eps) -
                     evN.evaluate(bN, InteractionKind::V_eps);
    const Vec sq = diff.array().square();
    const double mc = sq.mean();
    const double se = std::sqrt((sq.array() - mc).square().sum() / (B - 1.0) / B);
    CHECK(std::abs(mc - exact2) <= 4.0 * se);
}

TEST_CASE("W - V closed form matches Monte Carlo") {
    const LatticeGrid g = build_grid(2.0, 10, Boundary::dirichlet);
    const SpectralData sd = small_trap(g);
    const double eps = 3.0 * g.spacing;
    L2DistanceParams p;
    p.epsilon = eps;
    const double exact = l2_distance_exact(sd, InteractionPair::Veps_Weps, p);

    const KernelMatrix G = green(sd, std::numeric_limits<double>::infinity(), Cutoff::exp);
    const InteractionEvaluator ev(G, discretize_interaction(eps, g));
    const int B = 60000;
    const FieldBatch b = sample_free_field(sd, std::numeric_limits<double>::infinity(),
                                           Cutoff::exp, B, 103, 0);
    const auto pv = ev.evaluate_pair(b);
    const Vec sq = (pv.W - pv.V).array().square();
    const double mc = sq.mean();
    const double se = std::sqrt((sq.array() - mc).square().sum() / (B - 1.0) / B);
    CHECK(std::abs(mc - exact * exact) <= 4.0 * se);
}

TEST_CASE("V_eps approaches the local V as eps shrinks") {
    const LatticeGrid g = build_grid(2.0, 16, Boundary::dirichlet);
    const SpectralData sd = small_trap(g);
    L2DistanceParams p;
    p.epsilon = 6.0 * g.spacing;
    const double far = l2_distance_exact(sd, InteractionPair::Veps_V, p);
    p.epsilon = 2.5 * g.spacing;
    const double near = l2_distance_exact(sd, InteractionPair::Veps_V, p);
    CHECK(near < far);
    CHECK(near > 0.0);
}
