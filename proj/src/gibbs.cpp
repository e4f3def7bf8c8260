#include "phi4lab/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace phi4lab {

namespace {

struct Matching {
    double coeff = 1.0;             // (-1)^{matched} * prod G
    std::vector<int> free_x, free_xt;  // unmatched tuple positions
};

// All partial injective matchings between x-positions and xt-positions,
// weighted with (-1)^{|matching|} prod G(x_i, xt_j).
void enumerate_matchings(const Mat& g, int p, int i, std::vector<int>& used_xt, double coeff,
                         std::vector<Matching>& out) {
    if (i == p) {
        Matching m;
        m.coeff = coeff;
        for (int a = 0; a < p; ++a) {
            bool matched = false;
            for (int b = 0; b < p; ++b) matched |= used_xt[b] == a;
            if (!matched) m.free_x.push_back(a);
        }
        for (int b = 0; b < p; ++b)
            if (used_xt[b] < 0) m.free_xt.push_back(b);
        out.push_back(std::move(m));
        return;
    }
    // x_i unmatched
    enumerate_matchings(g, p, i + 1, used_xt, coeff, out);
    // x_i matched with any free xt_j
    for (int j = 0; j < p; ++j) {
        if (used_xt[j] >= 0) continue;
        used_xt[j] = i;
        enumerate_matchings(g, p, i + 1, used_xt, -coeff * g(i, j), out);
        used_xt[j] = -1;
    }
}

Vec block_means(const Vec& v, int blocks) {
    const Eigen::Index B = v.size();
    Vec out(blocks);
    for (int b = 0; b < blocks; ++b) {
        const Eigen::Index lo = B * b / blocks, hi = B * (b + 1) / blocks;
        out(b) = v.segment(lo, hi - lo).mean();
    }
    return out;
}

CVec block_means(const CVec& v, int blocks) {
    const Eigen::Index B = v.size();
    CVec out(blocks);
    for (int b = 0; b < blocks; ++b) {
        const Eigen::Index lo = B * b / blocks, hi = B * (b + 1) / blocks;
        out(b) = v.segment(lo, hi - lo).mean();
    }
    return out;
}

}  // namespace

MeanErr partition_estimate(const Vec& interaction_values, int blocks) {
    if (interaction_values.size() < 1000)
        throw std::invalid_argument("partition_estimate: batch below 10^3");
    if (!interaction_values.allFinite())
        throw std::invalid_argument("partition_estimate: non-finite interaction values");
    const Vec w = (-interaction_values.array()).exp();
    blocks = std::min<int>(blocks, static_cast<int>(w.size()));
    const Vec bm = block_means(w, blocks);

    MeanErr out;
    out.value = w.mean();
    // jackknife over blocks
    double var = 0.0;
    for (int b = 0; b < blocks; ++b) {
        const double loo = (blocks * out.value - bm(b)) / (blocks - 1);
        var += (loo - out.value) * (loo - out.value);
    }
    out.err = std::sqrt(var * (blocks - 1) / blocks);
    return out;
}

Cplx free_corr(const KernelMatrix& G, const std::vector<int>& xs, const std::vector<int>& xts) {
    const int p = static_cast<int>(xs.size());
    if (p != static_cast<int>(xts.size()) || p < 1 || p > 4)
        throw std::invalid_argument("free_corr: need 1 <= p <= 4 with equal tuple sizes");
    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    double sum = 0.0;
    do {
        double prod = 1.0;
        for (int i = 0; i < p; ++i) prod *= G.k(xs[i], xts[perm[i]]);
        sum += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {sum, 0.0};
}

CVec plain_monomial(const FieldBatch& batch, const std::vector<int>& xs,
                    const std::vector<int>& xts) {
    CVec out = CVec::Ones(batch.batch_size);
    for (int x : xs) out = out.cwiseProduct(batch.fields.row(x).transpose());
    for (int xt : xts) out = out.cwiseProduct(batch.fields.row(xt).conjugate().transpose());
    return out;
}

CVec wick_monomial(const FieldBatch& batch, const KernelMatrix& G_N, const std::vector<int>& xs,
                   const std::vector<int>& xts) {
    const int p = static_cast<int>(xs.size());
    if (p != static_cast<int>(xts.size()) || p < 1 || p > 4)
        throw std::invalid_argument("wick_monomial: need 1 <= p <= 4 with equal tuple sizes");
    Mat g(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) g(i, j) = G_N.k(xs[i], xts[j]);

    std::vector<Matching> matchings;
    std::vector<int> used(p, -1);
    enumerate_matchings(g, p, 0, used, 1.0, matchings);

    CVec out = CVec::Zero(batch.batch_size);
    for (const Matching& m : matchings) {
        CVec term = CVec::Constant(batch.batch_size, Cplx(m.coeff, 0.0));
        for (int a : m.free_x) term = term.cwiseProduct(batch.fields.row(xs[a]).transpose());
        for (int b : m.free_xt)
            term = term.cwiseProduct(batch.fields.row(xts[b]).conjugate().transpose());
        out += term;
    }
    return out;
}

CorrelationEstimate ratio_estimate(const CVec& numerator_samples, const Vec& interaction_values,
                                   int blocks) {
    const Eigen::Index B = numerator_samples.size();
    if (interaction_values.size() != B)
        throw std::invalid_argument("ratio_estimate: size mismatch");
    const Vec w = (-interaction_values.array()).exp();
    blocks = std::min<int>(blocks, static_cast<int>(B));
    const CVec num = numerator_samples.cwiseProduct(w.cast<Cplx>());
    const CVec nb = block_means(num, blocks);
    const Vec wb = block_means(w, blocks);

    CorrelationEstimate est;
    est.zeta = w.mean();
    const Cplx full_num = num.mean();
    est.value = full_num / est.zeta;

    double var_re = 0.0, var_im = 0.0, var_z = 0.0;
    for (int b = 0; b < blocks; ++b) {
        const Cplx loo_num = (static_cast<double>(blocks) * full_num - nb(b)) / (blocks - 1.0);
        const double loo_w = (blocks * est.zeta - wb(b)) / (blocks - 1.0);
        const Cplx loo = loo_num / loo_w;
        var_re += std::pow(loo.real() - est.value.real(), 2);
        var_im += std::pow(loo.imag() - est.value.imag(), 2);
        var_z += std::pow(loo_w - est.zeta, 2);
    }
    const double fac = (blocks - 1.0) / blocks;
    est.err = std::sqrt(fac * (var_re + var_im));
    est.zeta_err = std::sqrt(fac * var_z);
    if (est.zeta_err > 0.0 && est.zeta <= 4.0 * est.zeta_err)
        throw std::runtime_error("ratio_estimate: normalizer consistent with zero");
    return est;
}

CorrelationEstimate corr_estimate(const FieldBatch& batch, const Vec& interaction_values,
                                  const KernelMatrix& G_N, const std::vector<int>& xs,
                                  const std::vector<int>& xts, bool wick) {
    const CVec mono = wick ? wick_monomial(batch, G_N, xs, xts) : plain_monomial(batch, xs, xts);
    CorrelationEstimate est = ratio_estimate(mono, interaction_values);
    est.xs = xs;
    est.xts = xts;
    est.p = static_cast<int>(xs.size());
    return est;
}

CorrelationEstimate corr_combination(const FieldBatch& batch, const Vec& interaction_values,
                                     const KernelMatrix& G_N, const std::vector<int>& xs,
                                     const std::vector<int>& xts, int blocks) {
    const int p = static_cast<int>(xs.size());
    if (p < 1 || p > 4 || xts.size() != xs.size())
        throw std::invalid_argument("corr_combination: need 1 <= p <= 4");
    const Eigen::Index B = batch.batch_size;
    blocks = std::min<int>(blocks, static_cast<int>(B));
    const Vec w = (-interaction_values.array()).exp();
    const Vec wb = block_means(w, blocks);
    const double zeta = w.mean();

    // Per-block means of every plain sub-monomial numerator we will need.
    std::map<std::pair<std::vector<int>, std::vector<int>>, CVec> numer_blocks;
    auto numerator = [&](const std::vector<int>& sx,
                         const std::vector<int>& st) -> const CVec& {
        auto key = std::make_pair(sx, st);
        auto it = numer_blocks.find(key);
        if (it == numer_blocks.end()) {
            CVec mono = sx.empty() ? CVec::Ones(B) : plain_monomial(batch, sx, st);
            mono = mono.cwiseProduct(w.cast<Cplx>());
            it = numer_blocks.emplace(key, block_means(mono, blocks)).first;
        }
        return it->second;
    };

    std::vector<int> perm_x(p), perm_t(p);
    std::iota(perm_x.begin(), perm_x.end(), 0);
    auto binom = [](int n, int k) {
        double r = 1;
        for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
        return r;
    };

    // Assemble gamma-hat per leave-one-out block so the shared normalizer is
    // propagated correctly, then jackknife.
    auto assemble = [&](int drop) -> Cplx {
        auto gamma_k = [&](const std::vector<int>& sx, const std::vector<int>& st) -> Cplx {
            double zw = 0.0;
            Cplx nm(0.0, 0.0);
            const CVec& nb = numerator(sx, st);
            for (int b = 0; b < blocks; ++b) {
                if (b == drop) continue;
                zw += wb(b);
                nm += nb(b);
            }
            return nm / zw;
        };
        Cplx total(0.0, 0.0);
        for (int k = 0; k <= p; ++k) {
            const double pref = binom(p, k) * binom(p, k) * ((p - k) % 2 == 0 ? 1.0 : -1.0);
            Cplx sym(0.0, 0.0);
            std::vector<int> px = perm_x;
            do {
                std::vector<int> pt(p);
                std::iota(pt.begin(), pt.end(), 0);
                do {
                    std::vector<int> sx, st, fx, ft;
                    for (int i = 0; i < k; ++i) {
                        sx.push_back(xs[px[i]]);
                        st.push_back(xts[pt[i]]);
                    }
                    for (int i = k; i < p; ++i) {
                        fx.push_back(xs[px[i]]);
                        ft.push_back(xts[pt[i]]);
                    }
                    const Cplx gk = k == 0 ? Cplx(1.0, 0.0) : gamma_k(sx, st);
                    const Cplx g0 = fx.empty() ? Cplx(1.0, 0.0) : free_corr(G_N, fx, ft);
                    sym += gk * g0;
                } while (std::next_permutation(pt.begin(), pt.end()));
            } while (std::next_permutation(px.begin(), px.end()));
            const double nperm = std::tgamma(p + 1) * std::tgamma(p + 1);
            total += pref * sym / nperm;
        }
        return total;
    };

    CorrelationEstimate est;
    est.xs = xs;
    est.xts = xts;
    est.p = p;
    est.zeta = zeta;
    est.value = assemble(-1);
    double var_re = 0.0, var_im = 0.0;
    for (int b = 0; b < blocks; ++b) {
        const Cplx loo = assemble(b);
        var_re += std::pow(loo.real() - est.value.real(), 2);
        var_im += std::pow(loo.imag() - est.value.imag(), 2);
    }
    const double fac = (blocks - 1.0) / blocks;
    est.err = std::sqrt(fac * (var_re + var_im));
    return est;
}

double upsilon(const std::vector<Eigen::Vector2d>& points, double theta) {
    const int m = static_cast<int>(points.size());
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int i) {
        return parent[i] == i ? i : parent[i] = find(parent[i]);
    };
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if ((points[i] - points[j]).norm() <= 1.0) parent[find(i)] = find(j);

    std::map<int, double> rep_norm;  // component root -> min |y|
    for (int i = 0; i < m; ++i) {
        const int r = find(i);
        const double nrm = points[i].norm();
        auto it = rep_norm.find(r);
        if (it == rep_norm.end() || nrm < it->second) rep_norm[r] = nrm;
    }
    double prod = 1.0;
    for (const auto& [root, nrm] : rep_norm) prod /= 1.0 + std::pow(nrm, theta);
    return prod;
}

IbpReport ibp_corr_check(const SpectralData& sd, const KernelMatrix& G_N,
                         const LatticeInteraction& li, double coupling, int x, int xt,
                         int batch_size, uint64_t seed) {
    if (sd.count() > 6)
        throw std::invalid_argument("ibp_corr_check: restricted to K <= 6 modes");
    const FieldBatch batch = sample_free_field(sd, G_N.N, G_N.cutoff, batch_size, seed);
    const InteractionEvaluator ev(G_N, li);
    const Vec V = coupling * ev.evaluate(batch, InteractionKind::V_eps);

    const LatticeGrid& grid = G_N.grid;
    const int n = grid.n;
    const double a2 = grid.site_weight;
    const Mat m = batch.fields.cwiseAbs2().colwise() - G_N.k.diagonal().array().matrix();

    // L_y V = a^4 sum v(u-ut) G(y,u) [phi(u) m(ut) - G(u,ut) phi(ut)]
    auto l_of_v = [&](int y) {
        CVec acc = CVec::Zero(batch.batch_size);
        for (size_t s = 0; s < li.offsets.size(); ++s) {
            const int dx = li.offsets[s].x(), dy = li.offsets[s].y();
            for (int iy = 0; iy < n; ++iy) {
                const int jy = iy + dy;
                if (jy < 0 || jy >= n) continue;
                for (int ix = 0; ix < n; ++ix) {
                    const int jx = ix + dx;
                    if (jx < 0 || jx >= n) continue;
                    const int u = grid.index(ix, iy), ut = grid.index(jx, jy);
                    acc += li.values[s] * G_N.k(y, u) *
                           (batch.fields.row(u).transpose().cwiseProduct(
                                m.row(ut).transpose().cast<Cplx>()) -
                            G_N.k(u, ut) * batch.fields.row(ut).transpose());
                }
            }
        }
        return (coupling * a2 * a2 * acc).eval();
    };
    // Lbar_xt L_x V = a^4 sum v(u-ut) { G(x,u)G(u,xt) m(ut)
    //                                   + G(x,u)G(ut,xt)[phi(u) conj phi(ut) - G(u,ut)] }
    CVec llbar = CVec::Zero(batch.batch_size);
    for (size_t s = 0; s < li.offsets.size(); ++s) {
        const int dx = li.offsets[s].x(), dy = li.offsets[s].y();
        for (int iy = 0; iy < n; ++iy) {
            const int jy = iy + dy;
            if (jy < 0 || jy >= n) continue;
            for (int ix = 0; ix < n; ++ix) {
                const int jx = ix + dx;
                if (jx < 0 || jx >= n) continue;
                const int u = grid.index(ix, iy), ut = grid.index(jx, jy);
                llbar += li.values[s] * G_N.k(x, u) *
                         (G_N.k(u, xt) * m.row(ut).transpose().cast<Cplx>() +
                          G_N.k(ut, xt) * (batch.fields.row(u).transpose().cwiseProduct(
                                               batch.fields.row(ut).conjugate().transpose()) -
                                           CVec::Constant(batch.batch_size, G_N.k(u, ut))));
            }
        }
    }
    llbar *= coupling * a2 * a2;

    const CVec lv = l_of_v(x);
    const CVec lbarv = l_of_v(xt).conjugate();
    const CVec rep = -llbar + lv.cwiseProduct(lbarv);

    IbpReport out;
    const CorrelationEstimate ibp = ratio_estimate(rep, V);
    out.ibp_value = ibp.value;
    out.ibp_err = ibp.err;
    const CorrelationEstimate direct = corr_estimate(batch, V, G_N, {x}, {xt}, true);
    out.direct_value = direct.value;
    out.direct_err = direct.err;
    const double comb = std::sqrt(out.ibp_err * out.ibp_err + out.direct_err * out.direct_err);
    out.sigma_distance = std::abs(out.ibp_value - out.direct_value) / (comb > 0 ? comb : 1.0);
    return out;
}

}  // namespace phi4lab
