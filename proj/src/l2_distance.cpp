#include "phi4lab/l2_distance.hpp"

#include <cmath>
#include <stdexcept>

namespace phi4lab {

namespace {

// Cross kernel of two coupled cutoffs, sum_k sqrt(w_A w_B) u_k u_k^T.
Mat cross_kernel(const SpectralData& sd, double A, double B, Cutoff cutoff) {
    Vec w(sd.count());
    for (int k = 0; k < sd.count(); ++k) {
        const double lam = sd.eigenvalues(k);
        w(k) = std::sqrt(cutoff_factor(cutoff, lam, A) / lam) *
               std::sqrt(cutoff_factor(cutoff, lam, B) / lam);
    }
    Mat scaled = sd.modes * w.array().sqrt().matrix().asDiagonal();
    const int m = static_cast<int>(scaled.rows());
    Mat out(m, m);
    out.setZero();
    out.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
    out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
    return out;
}

// sum over valid (x,y) of A(x,y) * B(x + s1, y + s2) where s1, s2 are lattice
// offsets applied to the row and column site indices. Dirichlet only: shifted
// sites must stay on the grid.
double shifted_frobenius(const Mat& A, const Mat& B, const LatticeGrid& g,
                         const Eigen::Vector2i& s1, const Eigen::Vector2i& s2) {
    const int n = g.n;
    const int rx0 = std::max(0, -s1.x()), rx1 = n - std::max(0, s1.x());
    const int ry0 = std::max(0, -s1.y()), ry1 = n - std::max(0, s1.y());
    const int cx0 = std::max(0, -s2.x()), cx1 = n - std::max(0, s2.x());
    const int cy0 = std::max(0, -s2.y()), cy1 = n - std::max(0, s2.y());
    if (rx0 >= rx1 || ry0 >= ry1 || cx0 >= cx1 || cy0 >= cy1) return 0.0;

    const int rshift = s1.x() + n * s1.y();
    const int cshift = s2.x() + n * s2.y();
    double sum = 0.0;
    for (int ry = ry0; ry < ry1; ++ry) {
        const int r = ry * n + rx0, rlen = rx1 - rx0;
        for (int cy = cy0; cy < cy1; ++cy) {
            const int c = cy * n + cx0, clen = cx1 - cx0;
            sum += (A.block(r, c, rlen, clen).array() *
                    B.block(r + rshift, c + cshift, rlen, clen).array())
                       .sum();
        }
    }
    return sum;
}

}  // namespace

double quartic_cross_moment_kernel(const Mat& C, const LatticeGrid& grid,
                                   const LatticeInteraction& liA, const LatticeInteraction& liB) {
    if (grid.boundary != Boundary::dirichlet)
        throw std::invalid_argument("quartic moment: Dirichlet grids only");
    const Mat P = C.array().square();

    // E[V_A V_B] = (1/4) a^8 sum v_A(x-xt) v_B(y-yt)
    //              [C(x,y)C(xt,yt) + C(x,yt)C(xt,y)]^2
    // expands to 2*direct + 2*cross by symmetry of both stencils.
    double direct = 0.0, cross = 0.0;
    for (size_t sa = 0; sa < liA.offsets.size(); ++sa) {
        const Eigen::Vector2i& da = liA.offsets[sa];
        const double va = liA.values[sa];
        // D(x,y) = C(x,y) C(x+da, y) on valid rows
        const int n = grid.n;
        Mat D = Mat::Zero(C.rows(), C.cols());
        {
            const int rx0 = std::max(0, -da.x()), rx1 = n - std::max(0, da.x());
            const int ry0 = std::max(0, -da.y()), ry1 = n - std::max(0, da.y());
            const int rshift = da.x() + n * da.y();
            for (int ry = ry0; ry < ry1; ++ry) {
                const int r = ry * n + rx0, rlen = rx1 - rx0;
                D.middleRows(r, rlen) = C.middleRows(r, rlen).array() *
                                        C.middleRows(r + rshift, rlen).array();
            }
        }
        for (size_t sb = 0; sb < liB.offsets.size(); ++sb) {
            const Eigen::Vector2i& db = liB.offsets[sb];
            const double vb = liB.values[sb];
            direct += va * vb * shifted_frobenius(P, P, grid, da, db);
            cross += va * vb * shifted_frobenius(D, D, grid, Eigen::Vector2i(0, 0), db);
        }
    }
    const double a2 = grid.site_weight;
    const double a8 = a2 * a2 * a2 * a2;
    return 0.25 * a8 * (2.0 * direct + 2.0 * cross);
}

double quartic_second_moment(const SpectralData& sd, const LatticeInteraction& li, double A,
                             double B, Cutoff cutoff) {
    const Mat C = cross_kernel(sd, A, B, cutoff);
    return quartic_cross_moment_kernel(C, sd.grid, li, li);
}

double l2_distance_exact(const SpectralData& sd, InteractionPair pair,
                         const L2DistanceParams& p) {
    const LatticeGrid& grid = sd.grid;
    switch (pair) {
        case InteractionPair::VN_VM: {
            const LatticeInteraction li = p.epsilon > 0.0
                                              ? discretize_interaction(p.epsilon, grid)
                                              : delta_interaction(grid);
            const double mNN = quartic_second_moment(sd, li, p.N, p.N, p.cutoff);
            const double mMM = quartic_second_moment(sd, li, p.M, p.M, p.cutoff);
            const double mNM = quartic_second_moment(sd, li, p.N, p.M, p.cutoff);
            return std::sqrt(std::max(0.0, mNN + mMM - 2.0 * mNM));
        }
        case InteractionPair::Veps_V: {
            const LatticeInteraction li = discretize_interaction(p.epsilon, grid);
            const LatticeInteraction loc = delta_interaction(grid);
            const double inf = std::numeric_limits<double>::infinity();
            const Mat C = cross_kernel(sd, inf, inf, p.cutoff);
            const double mee = quartic_cross_moment_kernel(C, grid, li, li);
            const double mll = quartic_cross_moment_kernel(C, grid, loc, loc);
            const double mel = quartic_cross_moment_kernel(C, grid, li, loc);
            return std::sqrt(std::max(0.0, mee + mll - 2.0 * mel));
        }
        case InteractionPair::Veps_Weps: {
            // ||W - V||^2 = a^8 (T1 - 2 T2 + T4) over K(x,xt) = v(x-xt) G(x,xt).
            const LatticeInteraction li = discretize_interaction(p.epsilon, grid);
            const double inf = std::numeric_limits<double>::infinity();
            const Mat G = cross_kernel(sd, inf, inf, p.cutoff);
            SpMat K = interaction_pair_matrix(li, grid);
            for (int c = 0; c < K.outerSize(); ++c)
                for (SpMat::InnerIterator it(K, c); it; ++it) it.valueRef() *= G(it.row(), c);

            const Mat Q = K * G;                 // (K G)(y, x)
            const Vec kappa_row = K * Vec::Ones(K.cols());
            double T1 = 0.0, T2 = 0.0;
            for (int c = 0; c < K.outerSize(); ++c)
                for (SpMat::InnerIterator it(K, c); it; ++it) {
                    const int x = it.row(), xt = c;
                    // (G K G)(xt, x) = sum_y G(xt, y) (K G)(y, x)
                    T1 += it.value() * G.col(xt).dot(Q.col(x));
                    // (G diag(kappa) G)(xt, x)
                    T2 += it.value() *
                          (G.col(xt).array() * kappa_row.array() * G.col(x).array()).sum();
                }
            const Mat P = G.array().square();
            const double T4 = kappa_row.dot(P * kappa_row);
            const double a2 = grid.site_weight;
            const double a8 = a2 * a2 * a2 * a2;
            return std::sqrt(std::max(0.0, a8 * (T1 - 2.0 * T2 + T4)));
        }
    }
    throw std::invalid_argument("l2_distance_exact: unknown pair");
}

}  // namespace phi4lab
