#include <Eigen/SparseCholesky>

#include <cmath>

#include "experiments_internal.hpp"
#include "phi4lab/bounds.hpp"
#include "phi4lab/l2_distance.hpp"

namespace phi4lab::detail {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// spectrum: assembly and decomposition health at the configured scale
// ---------------------------------------------------------------------------
ExperimentResult exp_spectrum(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.name = "spectrum";
    const LatticeGrid grid = make_grid(cfg);
    const Vec U = eval_potential(cfg.potential, grid);
    const OperatorMatrix op = assemble_hamiltonian(grid, U, cfg.potential.kappa);
    const SpectralData sd = configured_spectral(cfg);

    // symmetry is exact by construction
    const SpMat asym = SpMat(op.H - SpMat(op.H.transpose()));
    const double sym_defect = asym.coeffs().size() ? asym.coeffs().abs().maxCoeff() : 0.0;

    double max_res = 0.0;
    for (int k = 0; k < sd.count(); ++k) {
        const double lam = sd.eigenvalues(k);
        max_res = std::max(max_res, (op.H * sd.modes.col(k) - lam * sd.modes.col(k)).norm() /
                                        (lam * sd.modes.col(k).norm()));
    }
    const int korth = std::min(sd.count(), 200);
    const Mat gram =
        grid.site_weight * sd.modes.leftCols(korth).transpose() * sd.modes.leftCols(korth);
    const double orth_defect = (gram - Mat::Identity(korth, korth)).array().abs().maxCoeff();

    const double floor_gap =
        sd.eigenvalues(0) - (cfg.potential.kappa + U.minCoeff() - cfg.spectral.tol_eig);

    // grid refinement: 10 lowest eigenvalues move by < 2% when n doubles
    ExperimentConfig fine = cfg;
    fine.grid.n = 2 * cfg.grid.n;
    const LatticeGrid grid2 = make_grid(fine);
    const OperatorMatrix op2 =
        assemble_hamiltonian(grid2, eval_potential(fine.potential, grid2), fine.potential.kappa);
    const SpectralData sd2 = spectral_decompose(op2, 10, cfg.spectral.tol_eig, cfg.spectral.s);
    double max_shift = 0.0;
    for (int k = 0; k < 10; ++k)
        max_shift = std::max(max_shift, std::abs(sd2.eigenvalues(k) - sd.eigenvalues(k)) /
                                            sd.eigenvalues(k));

    const GrowthReport growth = verify_growth_assumption(cfg.potential, grid);

    res.metrics["symmetry_defect"] = sym_defect;
    res.metrics["max_rel_eigen_residual"] = max_res;
    res.metrics["orthonormality_defect"] = orth_defect;
    res.metrics["spectral_floor_gap"] = floor_gap;
    res.metrics["refinement_max_shift"] = max_shift;
    res.metrics["lambda0"] = sd.eigenvalues(0);
    res.metrics["trace_h_minus_s"] = sd.trace_h_minus_s;
    res.metrics["growth_lower_c"] = growth.lower_c;
    res.metrics["growth_gradient_C"] = growth.gradient_C;
    res.pass = sym_defect == 0.0 && max_res <= cfg.spectral.tol_eig && orth_defect <= 1e-10 &&
               floor_gap >= 0.0 && max_shift < 0.02 && growth.sandwich_holds;
    return res;
}

// ---------------------------------------------------------------------------
// green-bounds: criteria 1 (G and G_N - G envelopes), 2 (gradient), 3 (tau)
// ---------------------------------------------------------------------------
namespace {

// continuum tau^{eps,0} oracle: 2 int_0^1 v(u) K0(sqrt(2 kappa) eps u) u du
double tau0_bessel_oracle(double epsilon, double kappa) {
    const int m = 256;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        const double u = (i + 0.5) / m;
        acc += base_profile(u) * std::cyl_bessel_k(0.0, std::sqrt(2.0 * kappa) * epsilon * u) * u;
    }
    return 2.0 * acc / m;
}

}  // namespace

namespace {

// |G_N - G| against the two-branch truncation envelope, measured on a grid
// whose ultraviolet scale sits a fixed factor above the cutoff: 1/a^2 = 16 N.
// Beyond r ~ 1/(N a) lattice light-cone transport overtakes the continuum
// Gaussian and the bound stops describing the discretization, exactly like
// the 2a exclusion at short distance; the window r in [2a, min(1/(Na), 2)]
// spans N r^2 in [0.25, 16], covering both envelope branches.
BoundFit truncation_envelope_fit(double N, const PotentialSpec& pot, double kappa) {
    const int n = static_cast<int>(std::lround(32.0 * std::sqrt(N)));
    const LatticeGrid fg = build_grid(4.0, n, Boundary::dirichlet);
    const double a = fg.spacing;
    const Vec U = eval_potential(pot, fg);
    const OperatorMatrix op = assemble_hamiltonian(fg, U, kappa);
    Eigen::SimplicialLLT<SpMat> llt(op.H);

    // capped operator for the Chebyshev heat application; the cap only
    // touches sites where e^{-U/N} < e^{-60}
    const double u_cap = 60.0 * N;
    const OperatorMatrix opc = assemble_hamiltonian(fg, U.cwiseMin(u_cap), kappa);
    const double lam_max = kappa + u_cap + 8.0 / fg.site_weight;

    const double r_lo = 2.0 * a;
    const double r_hi = std::min(1.0 / (N * a), 2.0);
    std::vector<FitSample> samples;
    Vec e = Vec::Zero(fg.sites());
    for (int sy = 0; sy < fg.n; sy += fg.n / 16) {
        for (int sx = 0; sx < fg.n; sx += fg.n / 16) {
            const int src = fg.index(sx, sy);
            if (fg.site(src).norm() > 1.2) continue;
            e(src) = 1.0;
            // (G - G_N) column = h^{-1}(1 - e^{-h/N}) delta / a^2
            const Vec rhs = e - heat_apply(opc.H, lam_max, 1.0 / N, e);
            const Vec col = llt.solve(rhs) / fg.site_weight;
            e(src) = 0.0;
            for (int x = 0; x < fg.sites(); ++x) {
                const double r = (fg.site(x) - fg.site(src)).norm();
                if (r < r_lo || r > r_hi) continue;
                const double v = std::abs(col(x));
                if (v < 1e-280) continue;
                const double zz = N * r * r;
                FitSample smp;
                smp.value = v;
                smp.log_pref =
                    std::log(std::max(0.0, std::log(1.0 / zz)) + std::exp(-zz) / zz);
                smp.xi = 0.0;
                smp.i = x;
                smp.j = src;
                samples.push_back(smp);
            }
        }
    }
    BoundFit fit = fit_exponential_envelope(samples, EnvelopeForm::prop61_GN_minus_G, false);
    fit.c = 1.0;
    fit.ok = fit.pairs > 100 && std::isfinite(fit.C) && fit.C > 0.0;
    return fit;
}

}  // namespace

ExperimentResult exp_green_bounds(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.name = "green-bounds";
    const LatticeGrid grid = make_grid(cfg);
    const OperatorMatrix op =
        assemble_hamiltonian(grid, eval_potential(cfg.potential, grid), cfg.potential.kappa);

    bool pass = true;

    // --- criterion 1: G against the boundG envelope. The kernel comes from
    // sparse solves: a k_max-truncated spectral sum carries a rank ghost
    // floor that buries the true tail.
    const Mat G = inverse_kernel_dense(op);
    const BoundFit fitG = fit_decay_bound(G, grid, cfg.potential, EnvelopeForm::prop61_boundG,
                                          std::numeric_limits<double>::infinity());
    res.metrics["boundG_c"] = fitG.c;
    res.metrics["boundG_C"] = fitG.C;
    res.metrics["boundG_pairs"] = fitG.pairs;
    bool crit1 = fitG.ok;
    pass = pass && fitG.ok;

    {
        // plot series: kernel vs envelope along a diagonal ray from the centre
        std::vector<std::vector<double>> rows;
        const int ci = grid.index(grid.n / 2, grid.n / 2);
        for (int j = 0; j < grid.sites(); j += grid.n + 1) {
            const double r = (grid.site(ci) - grid.site(j)).norm();
            if (r < 2 * grid.spacing) continue;
            const double gmax = std::max(growth_floor_dilated(cfg.potential, grid.site(ci)),
                                         growth_floor_dilated(cfg.potential, grid.site(j)));
            const double xi = r * std::sqrt(gmax);
            const double pref = std::max(1.0, std::max(0.0, std::log(1.0 / xi)));
            rows.push_back({r, G(ci, j), fitG.C * pref * std::exp(-fitG.c * xi)});
        }
        res.series["decay_fit"] = series_table({"r", "kernel", "envelope"}, rows);
    }

    // --- criterion 1b: |G_N - G| against the eq-(6.2) envelope
    for (double N : {4.0, 16.0, 64.0}) {
        const BoundFit fd = truncation_envelope_fit(N, cfg.potential, cfg.potential.kappa);
        res.metrics["GN_minus_G_C_N" + std::to_string(static_cast<int>(N))] = fd.C;
        res.metrics["GN_minus_G_pairs_N" + std::to_string(static_cast<int>(N))] = fd.pairs;
        crit1 = crit1 && fd.ok;
        pass = pass && fd.ok;
    }
    res.metrics["crit1_pass"] = crit1;

    // --- criterion 2: gradient envelope
    {
        KernelMatrix Gk;
        Gk.k = G;
        Gk.kind = KernelKind::green;
        Gk.grid = grid;
        const GradientKernel grad = green_gradient(Gk);
        const Mat mag = (grad.dx.array().square() + grad.dy.array().square()).sqrt();
        const BoundFit fg = fit_decay_bound(mag, grid, cfg.potential, EnvelopeForm::prop63_gradG,
                                            std::numeric_limits<double>::infinity());
        res.metrics["gradG_c"] = fg.c;
        res.metrics["gradG_C"] = fg.C;
        res.metrics["crit2_pass"] = fg.ok;
        pass = pass && fg.ok;
    }

    // --- criterion 3: tau^eps divergence on a fine grid (the log regime
    //     needs eps < 1, unreachable at the default spacing)
    {
        const double kappa = cfg.potential.kappa;
        const int n_tau = std::min(512, 8 * cfg.grid.n);
        const LatticeGrid fg = build_grid(4.0, n_tau, Boundary::dirichlet);
        const double a = fg.spacing;
        PotentialSpec pot = cfg.potential;
        const Vec U = eval_potential(pot, fg);
        const OperatorMatrix op = assemble_hamiltonian(fg, U, kappa);
        Eigen::SimplicialLLT<SpMat> llt(op.H);

        // sup over a bulk sample; tau is eps-smooth and radially decreasing
        std::vector<int> sites;
        for (int iy = 0; iy < fg.n; iy += 10)
            for (int ix = 0; ix < fg.n; ix += 10)
                if (fg.site(fg.index(ix, iy)).norm() <= 1.2) sites.push_back(fg.index(ix, iy));

        const HomogeneousReference hom = HomogeneousReference::companion(fg, kappa);
        const std::vector<double> eps_over_a = {4, 6, 8, 12, 16, 24, 32};
        std::vector<double> log_inv_eps, tau0s, ratios, oracle;
        std::vector<std::vector<double>> rows;
        for (double ea : eps_over_a) {
            const double eps = ea * a;
            const LatticeInteraction li = discretize_interaction(eps, fg);
            const Vec tau = tau_at_sites(li, fg, llt, sites);
            const double tau_sup = tau.maxCoeff();
            std::vector<double> g0 = hom.green_offsets(li.offsets);
            double tau0 = 0.0;
            for (size_t s = 0; s < li.offsets.size(); ++s)
                tau0 += fg.site_weight * li.values[s] * g0[s];
            const double chi = std::log(1.0 / eps);
            log_inv_eps.push_back(chi);
            tau0s.push_back(tau0);
            ratios.push_back(tau_sup / chi);
            oracle.push_back(tau0_bessel_oracle(eps, kappa));
            rows.push_back({eps, tau_sup, tau0, oracle.back()});
        }
        const double slope = ls_slope(log_inv_eps, tau0s);
        const double oracle_slope = ls_slope(log_inv_eps, oracle);
        const double ratio_spread =
            *std::max_element(ratios.begin(), ratios.end()) /
            *std::min_element(ratios.begin(), ratios.end());
        res.metrics["tau0_slope"] = slope;
        res.metrics["tau0_slope_oracle"] = oracle_slope;
        res.metrics["tau0_slope_target"] = 1.0 / M_PI;
        res.metrics["tau_sup_over_chi_spread"] = ratio_spread;
        res.series["tau_divergence"] =
            series_table({"eps", "tau_sup", "tau0_lattice", "tau0_oracle"}, rows);
        const bool crit3 = std::abs(slope - 1.0 / M_PI) <= 0.1 / M_PI && ratio_spread <= 2.0;
        res.metrics["crit3_pass"] = crit3;
        pass = pass && crit3;
    }

    res.pass = pass;
    return res;
}

// ---------------------------------------------------------------------------
// l2-scaling: criterion 4
// ---------------------------------------------------------------------------
namespace {

// E[(V_M - V_N)^2] on a two-mode system by 4D Gauss-Hermite quadrature of the
// defining expectation; exact for this polynomial degree.
double two_mode_quadrature(const SpectralData& sd, const LatticeInteraction& li, double N,
                           double M, Cutoff cutoff) {
    static const double gh_x[5] = {0.0, 0.958572464613819, -0.958572464613819,
                                   2.020182870456086, -2.020182870456086};
    static const double gh_w[5] = {0.945308720482942, 0.393619323152241, 0.393619323152241,
                                   0.019953242059046, 0.019953242059046};
    const KernelMatrix GN = green(sd, N, cutoff);
    const KernelMatrix GM = green(sd, M, cutoff);
    const InteractionEvaluator evN(GN, li), evM(GM, li);

    double acc = 0.0;
    for (int i1 = 0; i1 < 5; ++i1)
        for (int i2 = 0; i2 < 5; ++i2)
            for (int i3 = 0; i3 < 5; ++i3)
                for (int i4 = 0; i4 < 5; ++i4) {
                    CMat X(2, 1);
                    X(0, 0) = Cplx(gh_x[i1], gh_x[i2]);
                    X(1, 0) = Cplx(gh_x[i3], gh_x[i4]);
                    const FieldBatch bN = field_from_coords(sd, N, cutoff, X);
                    const FieldBatch bM = field_from_coords(sd, M, cutoff, X);
                    const double vN = evN.evaluate(bN, InteractionKind::V_eps)(0);
                    const double vM = evM.evaluate(bM, InteractionKind::V_eps)(0);
                    const double w = gh_w[i1] * gh_w[i2] * gh_w[i3] * gh_w[i4] /
                                     (M_PI * M_PI);
                    acc += w * (vM - vN) * (vM - vN);
                }
    return acc;
}

}  // namespace

ExperimentResult exp_l2_scaling(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.name = "l2-scaling";
    const SpectralData sd = configured_spectral(cfg);
    const double eps = 4.0 * sd.grid.spacing;

    std::vector<double> logN, logd;
    std::vector<std::vector<double>> rows;
    for (double N : {8.0, 16.0, 32.0, 64.0, 128.0}) {
        L2DistanceParams p;
        p.N = N;
        p.M = 4.0 * N;
        p.cutoff = Cutoff::exp;
        p.epsilon = eps;
        const double d = l2_distance_exact(sd, InteractionPair::VN_VM, p);
        logN.push_back(std::log(N));
        logd.push_back(std::log(d));
        rows.push_back({N, d});
    }
    const double slope = ls_slope(logN, logd);
    const double bound = -0.5 + 1.0 / cfg.potential.theta + 0.15;

    // two-mode oracle vs the closed form
    const LatticeGrid toy = build_grid(2.0, 8, Boundary::dirichlet);
    Mat Htoy = Mat::Zero(toy.sites(), toy.sites());
    // an explicit 2-mode system: lambda = 1, 3 on the first two sites
    Htoy(0, 0) = 1.0;
    Htoy(1, 1) = 3.0;
    for (int i = 2; i < toy.sites(); ++i) Htoy(i, i) = 1e8;
    SpectralData toy_sd = spectral_decompose_dense(Htoy, toy, 2, 1e-9, 1.5);
    const LatticeInteraction toy_li = delta_interaction(toy);
    const double closed = quartic_second_moment(toy_sd, toy_li, 8.0, 8.0, Cutoff::exp) +
                          quartic_second_moment(toy_sd, toy_li, 32.0, 32.0, Cutoff::exp) -
                          2.0 * quartic_second_moment(toy_sd, toy_li, 8.0, 32.0, Cutoff::exp);
    const double quad = two_mode_quadrature(toy_sd, toy_li, 8.0, 32.0, Cutoff::exp);
    const double oracle_gap = std::abs(closed - quad);

    res.metrics["slope"] = slope;
    res.metrics["slope_bound"] = bound;
    res.metrics["two_mode_oracle_gap"] = oracle_gap;
    res.metrics["epsilon"] = eps;
    res.series["l2_scaling"] = series_table({"N", "distance"}, rows);
    res.pass = slope <= bound && oracle_gap <= 1e-8;
    res.metrics["crit4_pass"] = res.pass;
    return res;
}

// ---------------------------------------------------------------------------
// t-gap: criterion 11
// ---------------------------------------------------------------------------
ExperimentResult exp_tgap(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.name = "t-gap";
    const LatticeGrid grid = make_grid(cfg);
    const Vec U = eval_potential(cfg.potential, grid);
    Vec U2 = U;
    for (int i = 0; i < grid.sites(); ++i)
        U2(i) += 3.0 * std::exp(-grid.site(i).squaredNorm());  // bounded bump

    const double kappa = cfg.potential.kappa;
    const OperatorMatrix opU = assemble_hamiltonian(grid, U, kappa);
    const OperatorMatrix opU2 = assemble_hamiltonian(grid, U2, kappa);

    std::vector<double> nus;
    for (int j = 0; j <= 6; ++j) nus.push_back(1e-3 * std::pow(10.0, j / 3.0));
    const double cap = kappa + 50.0 / nus.front() + U2.minCoeff();
    const SpectralData sdU = spectral_window(opU, cap, cfg.spectral.tol_eig, cfg.spectral.s);
    const SpectralData sdU2 = spectral_window(opU2, cap, cfg.spectral.tol_eig, cfg.spectral.s);

    std::vector<double> lognu, loggap;
    std::vector<std::vector<double>> rows;
    double t_sup = 0.0;
    for (double nu : nus) {
        const TraceGap tg = riemann_trace_gap(opU, opU2, sdU, sdU2, nu);
        lognu.push_back(std::log(nu));
        loggap.push_back(std::log(tg.gap_L1));
        rows.push_back({nu, tg.gap_L1});
        t_sup = tg.T_sup;
    }
    const double slope = ls_slope(lognu, loggap);
    const double bound = 1.0 - cfg.spectral.s / 2.0 - 0.2;

    res.metrics["slope"] = slope;
    res.metrics["slope_bound"] = bound;
    res.metrics["T_sup"] = t_sup;
    res.metrics["modes_U"] = sdU.count();
    res.series["t_gap"] = series_table({"nu", "gap_L1"}, rows);
    res.pass = slope >= bound;
    res.metrics["crit11_pass"] = res.pass;
    return res;
}

// ---------------------------------------------------------------------------
// nonsolve-demo: criterion 13
// ---------------------------------------------------------------------------
ExperimentResult exp_nonsolve(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.name = "nonsolve-demo";
    const LatticeGrid grid = make_grid(cfg);
    const double a = grid.spacing;
    const double kappa = cfg.potential.kappa;
    const std::vector<double> eps_over_a = {16, 12, 8, 6, 4};

    // homogeneous control: periodic box, constant potential
    const LatticeGrid pgrid = build_grid(cfg.grid.L, cfg.grid.n, Boundary::periodic);
    const HomogeneousReference hom{pgrid, kappa + 1.0};
    double hom_worst = 0.0;
    for (double ea : eps_over_a) {
        const LatticeInteraction li = discretize_interaction(ea * pgrid.spacing, pgrid);
        std::vector<double> g0 = hom.green_offsets(li.offsets);
        double tau0 = 0.0;
        for (size_t s = 0; s < li.offsets.size(); ++s)
            tau0 += pgrid.site_weight * li.values[s] * g0[s];
        const Vec tau = Vec::Constant(pgrid.sites(), tau0);
        hom_worst = std::max(hom_worst, nonsolvability_residual(li, pgrid, tau));
    }

    // step trap: tau from the Green function of the step Hamiltonian
    PotentialSpec step = cfg.potential;
    step.kind = PotentialKind::step;
    const Vec U = eval_potential(step, grid);
    const OperatorMatrix op = assemble_hamiltonian(grid, U, kappa);
    Eigen::SimplicialLLT<SpMat> llt(op.H);
    std::vector<int> all_sites(grid.sites());
    std::iota(all_sites.begin(), all_sites.end(), 0);

    double step_floor = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> rows;
    for (double ea : eps_over_a) {
        const LatticeInteraction li = discretize_interaction(ea * a, grid);
        const Vec tau = tau_at_sites(li, grid, llt, all_sites);
        const double r = nonsolvability_residual(li, grid, tau);
        step_floor = std::min(step_floor, r);
        rows.push_back({ea * a, r});
    }

    res.metrics["homogeneous_residual"] = hom_worst;
    res.metrics["step_floor"] = step_floor;
    res.series["nonsolve"] = series_table({"eps", "residual"}, rows);
    res.pass = hom_worst <= 1e-8 && step_floor > 100.0 * std::max(hom_worst, 1e-12);
    res.metrics["crit13_pass"] = res.pass;
    return res;
}

}  // namespace phi4lab::detail
