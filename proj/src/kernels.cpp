#include "phi4lab/kernels.hpp"

#include <Eigen/SparseCholesky>

#include <stdexcept>

namespace phi4lab {

namespace {

Mat weighted_outer(const SpectralData& sd, const Vec& w) {
    // sum_k w_k u_k u_k^T, grouped as (U sqrt(w)) (U sqrt(w))^T
    Mat scaled = sd.modes * w.array().sqrt().matrix().asDiagonal();
    const int m = static_cast<int>(scaled.rows());
    Mat out(m, m);
    out.setZero();
    out.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
    out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
    return out;
}

}  // namespace

Vec green_weights(const SpectralData& sd, double N, Cutoff cutoff) {
    Vec w(sd.count());
    for (int k = 0; k < sd.count(); ++k)
        w(k) = cutoff_factor(cutoff, sd.eigenvalues(k), N) / sd.eigenvalues(k);
    return w;
}

Vec heat_weights(const SpectralData& sd, double t) {
    return (-t * sd.eigenvalues.array()).exp();
}

Vec quantum_green_weights(const SpectralData& sd, double nu, double t_partial) {
    Vec w(sd.count());
    for (int k = 0; k < sd.count(); ++k)
        w(k) = quantum_green_weight(sd.eigenvalues(k), nu, t_partial);
    return w;
}

double kernel_entry(const SpectralData& sd, const Vec& weights, int i, int j) {
    return (sd.modes.row(i).transpose().array() * sd.modes.row(j).transpose().array() *
            weights.array())
        .sum();
}

KernelMatrix green(const SpectralData& sd, double N, Cutoff cutoff, double tail_tol) {
    if (!(N > 0))
        throw std::invalid_argument("green: N must be positive");
    const int K = sd.count();
    const double lam_top = sd.eigenvalues(K - 1);
    const double dropped = static_cast<double>(sd.grid.sites() - K);
    const double tail = dropped * cutoff_factor(cutoff, lam_top, N) / lam_top;
    if (tail > tail_tol)
        throw std::runtime_error("green: retained-mode tail above tail_tol, increase k_max");

    KernelMatrix km;
    km.kind = std::isinf(N) ? KernelKind::green : KernelKind::green_truncated;
    km.N = N;
    km.cutoff = cutoff;
    km.grid = sd.grid;
    km.k = weighted_outer(sd, green_weights(sd, N, cutoff));
    return km;
}

KernelMatrix heat_kernel(const SpectralData& sd, double t) {
    if (!(t > 0))
        throw std::invalid_argument("heat_kernel: t must be positive");
    KernelMatrix km;
    km.kind = KernelKind::heat;
    km.t = t;
    km.grid = sd.grid;
    km.k = weighted_outer(sd, heat_weights(sd, t));
    return km;
}

KernelMatrix quantum_green(const SpectralData& sd, double nu, double t_partial) {
    if (!(nu > 0))
        throw std::invalid_argument("quantum_green: nu must be positive");
    KernelMatrix km;
    km.kind = t_partial == 0.0 ? KernelKind::quantum_green : KernelKind::quantum_green_partial;
    km.nu = nu;
    km.t_partial = t_partial;
    km.grid = sd.grid;
    km.k = weighted_outer(sd, quantum_green_weights(sd, nu, t_partial));
    return km;
}

GradientKernel green_gradient(const KernelMatrix& K) {
    if (K.kind != KernelKind::green && K.kind != KernelKind::green_truncated &&
        K.kind != KernelKind::quantum_green)
        throw std::invalid_argument("green_gradient: kernel kind not supported");
    const LatticeGrid& g = K.grid;
    const int n = g.n;
    const int m = g.sites();
    const double a = g.spacing;
    const bool periodic = g.boundary == Boundary::periodic;

    GradientKernel out;
    out.dx.resize(m, m);
    out.dy.resize(m, m);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const int i = g.index(ix, iy);
            auto row_at = [&](int jx, int jy) -> Mat::ConstRowXpr {
                return K.k.row(g.index((jx + n) % n, (jy + n) % n));
            };
            if (periodic || (ix > 0 && ix + 1 < n))
                out.dx.row(i) = (row_at(ix + 1, iy) - row_at(ix - 1, iy)) / (2 * a);
            else if (ix == 0)
                out.dx.row(i) = (row_at(1, iy) - row_at(0, iy)) / a;
            else
                out.dx.row(i) = (row_at(n - 1, iy) - row_at(n - 2, iy)) / a;
            if (periodic || (iy > 0 && iy + 1 < n))
                out.dy.row(i) = (row_at(ix, iy + 1) - row_at(ix, iy - 1)) / (2 * a);
            else if (iy == 0)
                out.dy.row(i) = (row_at(ix, 1) - row_at(ix, 0)) / a;
            else
                out.dy.row(i) = (row_at(ix, n - 1) - row_at(ix, n - 2)) / a;
        }
    }
    return out;
}

Vec resolvent_diagonal(const OperatorMatrix& op) {
    Eigen::SimplicialLLT<SpMat> llt(op.H);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("resolvent_diagonal: Cholesky factorization failed");
    const int m = op.dimension();
    Vec d(m), e = Vec::Zero(m);
    for (int i = 0; i < m; ++i) {
        e(i) = 1.0;
        d(i) = llt.solve(e)(i);
        e(i) = 0.0;
    }
    return d;
}

Mat inverse_kernel_dense(const OperatorMatrix& op) {
    Eigen::SimplicialLLT<SpMat> llt(op.H);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("inverse_kernel_dense: Cholesky factorization failed");
    const int m = op.dimension();
    Mat G = llt.solve(Mat::Identity(m, m));
    G /= op.grid.site_weight;
    return G;
}

Vec heat_apply(const SpMat& H, double lambda_max, double t, const Vec& v) {
    // Chebyshev interpolation of e^{-t lambda} on [0, lambda_max], then
    // Clenshaw recurrence in the scaled operator.
    const double half = 0.5 * lambda_max;
    const double z = t * lambda_max;
    int degree = static_cast<int>(0.6 * z + 20.0 * std::sqrt(z + 1.0) + 40.0);
    std::vector<double> coeff;
    for (;; degree = (3 * degree) / 2) {
        coeff.assign(degree + 1, 0.0);
        for (int k = 0; k <= degree; ++k) {
            double ck = 0.0;
            for (int j = 0; j <= degree; ++j) {
                const double theta = M_PI * (j + 0.5) / (degree + 1);
                ck += std::exp(-t * (half + half * std::cos(theta))) * std::cos(k * theta);
            }
            coeff[k] = 2.0 * ck / (degree + 1);
        }
        double tail = 0.0;
        for (int k = degree - 7; k <= degree; ++k) tail = std::max(tail, std::abs(coeff[k]));
        if (tail < 1e-15 || degree >= 1 << 15) break;
    }
    // y = (H - half)/half has spectrum in [-1, 1]
    Vec b1 = Vec::Zero(v.size()), b2 = Vec::Zero(v.size());
    for (int k = degree; k >= 1; --k) {
        Vec tmp = (2.0 / half) * (H * b1) - 2.0 * b1 - b2 + coeff[k] * v;
        b2 = std::move(b1);
        b1 = std::move(tmp);
    }
    return (1.0 / half) * (H * b1) - b1 - b2 + 0.5 * coeff[0] * v;
}

TraceGap riemann_trace_gap(const OperatorMatrix& opU, const OperatorMatrix& opU2,
                           const SpectralData& sdU, const SpectralData& sdU2, double nu) {
    if (opU.dimension() != opU2.dimension())
        throw std::invalid_argument("riemann_trace_gap: operators on different grids");
    const Vec T = resolvent_diagonal(opU) - resolvent_diagonal(opU2);

    auto qg_diag = [&](const SpectralData& sd) {
        const Vec w = quantum_green_weights(sd, nu, 0.0);
        return (sd.modes.array().square().matrix() * w).eval();
    };
    const Vec Tnu = qg_diag(sdU) - qg_diag(sdU2);

    TraceGap out;
    out.gap_L1 = opU.grid.site_weight * (T - Tnu).array().abs().sum();
    out.T_sup = T.array().abs().maxCoeff();
    return out;
}

}  // namespace phi4lab
