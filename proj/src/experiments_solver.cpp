#include <cmath>

#include "experiments_internal.hpp"
#include "phi4lab/rng.hpp"

namespace phi4lab::detail {

using json = nlohmann::ordered_json;

namespace {

// smooth random profile with sup norm <= 1, for ball probes
Vec smooth_profile(const LatticeGrid& grid, uint64_t seed, uint64_t stream) {
    std::mt19937_64 eng = make_engine(seed, stream);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vec f = Vec::Zero(grid.sites());
    for (int b = 0; b < 6; ++b) {
        const Eigen::Vector2d c(uni(eng) * grid.half_width * 0.5,
                                uni(eng) * grid.half_width * 0.5);
        const double amp = uni(eng);
        const double w = 0.5 + 0.75 * std::abs(uni(eng));
        for (int i = 0; i < grid.sites(); ++i)
            f(i) += amp * std::exp(-(grid.site(i) - c).squaredNorm() / (2 * w * w));
    }
    return f / f.array().abs().maxCoeff();
}

}  // namespace

// ---------------------------------------------------------------------------
// counterterm: criterion 9
// ---------------------------------------------------------------------------
ExperimentResult exp_counterterm(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.name = "counterterm";
    const LatticeGrid grid = make_grid(cfg);
    const Vec bare = eval_potential(cfg.potential, grid);

    CountertermParams p;
    p.epsilon = 4.0 * grid.spacing;
    p.nu = 0.05;
    p.kappa = 16.0;
    p.tol = 1e-10;
    p.max_iter = 200;
    p.tol_eig = cfg.spectral.tol_eig;
    const LatticeInteraction li = discretize_interaction(p.epsilon, grid);

    bool pass = true;

    const CountertermState st = solve_counterterm(bare, grid, p);
    res.metrics["iterations"] = st.residual_history.size();
    res.metrics["final_residual"] = st.residual_history.empty() ? -1.0
                                                                : st.residual_history.back();
    res.metrics["converged"] = st.converged;
    pass = pass && st.converged && st.residual_history.size() <= 50 &&
           st.residual_history.back() <= 1e-10;
    if (!st.contraction_history.empty()) {
        res.metrics["last_contraction_ratio"] = st.contraction_history.back();
        pass = pass && st.contraction_history.back() < 1.0;
    }
    {
        std::vector<std::vector<double>> rows;
        for (size_t i = 0; i < st.residual_history.size(); ++i)
            rows.push_back({static_cast<double>(i), st.residual_history[i],
                            i > 0 ? st.contraction_history[i - 1] : 0.0});
        res.series["iteration_log"] = series_table({"iteration", "residual", "ratio"}, rows);
    }

    // uniqueness probe: a second admissible start lands on the same point
    {
        const Vec start2 = 1.1 * bare;
        const CountertermState st2 = solve_counterterm(bare, grid, p, &start2);
        const double dist = bare_norm(st.iterate - st2.iterate, bare);
        res.metrics["two_start_distance"] = dist;
        pass = pass && st2.converged && dist <= 10.0 * p.tol;
    }

    // first-step kappa scaling: sup |Phi(bare) - bare| / g ~ kappa^{-1/2}
    {
        Vec g(grid.sites());
        for (int i = 0; i < grid.sites(); ++i)
            g(i) = growth_floor(cfg.potential, grid.site(i));
        std::vector<double> logk, logy;
        std::vector<std::vector<double>> rows;
        for (double kappa : {4.0, 16.0, 64.0, 256.0}) {
            CountertermParams pk = p;
            pk.kappa = kappa;
            const Vec phi1 = phi_map(bare, bare, li, grid, pk);
            const double y = ((phi1 - bare).array() / g.array()).abs().maxCoeff();
            logk.push_back(std::log(kappa));
            logy.push_back(std::log(y));
            rows.push_back({kappa, y});
        }
        const double slope = ls_slope(logk, logy);
        res.metrics["first_step_kappa_slope"] = slope;
        res.series["kappa_sweep"] = series_table({"kappa", "first_step_over_g"}, rows);
        pass = pass && std::abs(slope + 0.5) <= 0.15;
    }

    // contraction factors on random pairs in the r = 0.5 ball
    {
        double q16 = 0.0, q256 = 0.0;
        for (double kappa : {16.0, 256.0}) {
            CountertermParams pk = p;
            pk.kappa = kappa;
            double q = 0.0;
            for (int trial = 0; trial < 10; ++trial) {
                const Vec u1 =
                    bare.array() *
                    (1.0 + 0.5 * smooth_profile(grid, cfg.mc.seed, 2 * trial).array());
                const Vec u2 =
                    bare.array() *
                    (1.0 + 0.5 * smooth_profile(grid, cfg.mc.seed, 2 * trial + 1).array());
                const Vec f1 = phi_map(u1, bare, li, grid, pk);
                const Vec f2 = phi_map(u2, bare, li, grid, pk);
                q = std::max(q, bare_norm(f1 - f2, bare) / bare_norm(u1 - u2, bare));
            }
            (kappa == 16.0 ? q16 : q256) = q;
        }
        res.metrics["contraction_q16"] = q16;
        res.metrics["contraction_q256"] = q256;
        pass = pass && q256 < q16 && q16 < 1.0;
    }

    // Feynman-Kac positivity of the homogeneous-minus-trapped counterterms
    {
        const OperatorMatrix op = assemble_hamiltonian(grid, bare, p.kappa);
        Eigen::SimplicialLLT<SpMat> llt(op.H);
        std::vector<int> sites;
        for (int i = 0; i < grid.sites(); i += 7) sites.push_back(i);
        const Vec tau = tau_at_sites(li, grid, llt, sites);
        const HomogeneousReference hom = HomogeneousReference::companion(grid, p.kappa);
        std::vector<double> g0 = hom.green_offsets(li.offsets);
        double tau0 = 0.0;
        for (size_t s = 0; s < li.offsets.size(); ++s)
            tau0 += grid.site_weight * li.values[s] * g0[s];
        const double tau_gap = tau0 - tau.maxCoeff();

        const SpectralData sdw =
            spectral_window(op, p.kappa + 50.0 / p.nu, p.tol_eig, cfg.spectral.s);
        const double rho_gap = hom.density(p.nu) - rho_nu(sdw, p.nu).maxCoeff();
        res.metrics["tau0_minus_tau_min"] = tau_gap;
        res.metrics["rho0_minus_rho_min"] = rho_gap;
        pass = pass && tau_gap >= -1e-10 && rho_gap >= -1e-10;
    }

    // nu-Cauchy scaling (the (nu v nu')^{1-s/2}/eps^2 yardstick)
    {
        std::vector<double> nus = {0.05, 0.1, 0.2, 0.4};
        std::vector<Vec> fixed;
        for (double nu : nus) {
            CountertermParams pn = p;
            pn.nu = nu;
            fixed.push_back(solve_counterterm(bare, grid, pn).iterate);
        }
        double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i + 1 < nus.size(); ++i) {
            const double yard = std::pow(nus[i + 1], 1.0 - cfg.spectral.s / 2.0) /
                                (p.epsilon * p.epsilon);
            const double ratio = bare_norm(fixed[i] - fixed[i + 1], bare) / yard;
            rmax = std::max(rmax, ratio);
            rmin = std::min(rmin, ratio);
        }
        res.metrics["nu_cauchy_ratio_max"] = rmax;
        res.metrics["nu_cauchy_ratio_min"] = rmin;
        pass = pass && std::isfinite(rmax);
    }

    res.metrics["crit9_pass"] = pass;
    res.pass = pass;
    return res;
}

// ---------------------------------------------------------------------------
// limiting: criterion 10
// ---------------------------------------------------------------------------
namespace {

// max |grad f| / g~^{3/2} over interior sites, central differences
double gradient_bound_constant(const Vec& f, const LatticeGrid& grid, const PotentialSpec& spec) {
    const int n = grid.n;
    double worst = 0.0;
    for (int iy = 1; iy + 1 < n; ++iy)
        for (int ix = 1; ix + 1 < n; ++ix) {
            const int i = grid.index(ix, iy);
            const double dx =
                (f(grid.index(ix + 1, iy)) - f(grid.index(ix - 1, iy))) / (2 * grid.spacing);
            const double dy =
                (f(grid.index(ix, iy + 1)) - f(grid.index(ix, iy - 1))) / (2 * grid.spacing);
            const double g32 = std::pow(growth_floor_dilated(spec, grid.site(i)), 1.5);
            worst = std::max(worst, std::hypot(dx, dy) / g32);
        }
    return worst;
}

}  // namespace

ExperimentResult exp_limiting(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.name = "limiting";
    const LatticeGrid grid = make_grid(cfg);
    const Vec bare = eval_potential(cfg.potential, grid);

    CountertermParams p;
    p.kappa = 16.0;
    p.tol = 1e-10;
    p.max_iter = 200;
    p.tol_eig = cfg.spectral.tol_eig;

    const CountertermState lim = solve_limiting(bare, grid, p);
    res.metrics["limit_converged"] = lim.converged;
    res.metrics["limit_iterations"] = lim.residual_history.size();
    bool pass = lim.converged;

    const double nu0 = 0.4;
    std::vector<double> dists;
    double sandwich_C = 1.0, grad_C = gradient_bound_constant(lim.iterate, grid, cfg.potential);
    std::vector<std::vector<double>> rows;
    for (int j = 0; j <= 4; ++j) {
        CountertermParams pj = p;
        pj.nu = nu0 * std::pow(2.0, -j);
        pj.epsilon = std::pow(pj.nu, 0.1);
        const CountertermState st = solve_counterterm(bare, grid, pj);
        pass = pass && st.converged;
        const double d = bare_norm(st.iterate - lim.iterate, bare);
        dists.push_back(d);
        const double up = (st.iterate.array() / bare.array()).maxCoeff();
        const double dn = (bare.array() / st.iterate.array()).maxCoeff();
        sandwich_C = std::max({sandwich_C, up, dn});
        grad_C = std::max(grad_C, gradient_bound_constant(st.iterate, grid, cfg.potential));
        rows.push_back({pj.nu, pj.epsilon, d});
    }
    bool decreasing = true;
    for (size_t i = 0; i + 1 < dists.size(); ++i) decreasing = decreasing && dists[i + 1] < dists[i];

    res.metrics["distance_decreasing"] = decreasing;
    res.metrics["sandwich_C"] = sandwich_C;
    res.metrics["gradient_C"] = grad_C;
    res.series["limit_sweep"] = series_table({"nu", "eps", "distance_to_limit"}, rows);
    res.pass = pass && decreasing && std::isfinite(sandwich_C) && std::isfinite(grad_C);
    res.metrics["crit10_pass"] = res.pass;
    return res;
}

}  // namespace phi4lab::detail
