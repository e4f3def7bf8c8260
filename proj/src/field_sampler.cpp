#include "phi4lab/field_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phi4lab/rng.hpp"

namespace phi4lab {

FieldBatch sample_free_field(const SpectralData& sd, double N, Cutoff cutoff, int batch_size,
                             uint64_t seed, uint64_t stream) {
    if (batch_size < 1)
        throw std::invalid_argument("sample_free_field: batch_size must be >= 1");
    const int K = sd.count();

    FieldBatch b;
    b.N = N;
    b.cutoff = cutoff;
    b.seed = seed;
    b.stream = stream;
    b.batch_size = batch_size;

    std::mt19937_64 eng = make_engine(seed, stream);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));  // E|X|^2 = 1
    Mat xr(K, batch_size), xi(K, batch_size);
    for (int s = 0; s < batch_size; ++s)
        for (int k = 0; k < K; ++k) {
            xr(k, s) = gauss(eng);
            xi(k, s) = gauss(eng);
        }
    b.coords = xr.cast<std::complex<double>>();
    b.coords.imag() = xi;

    Vec c(K);
    for (int k = 0; k < K; ++k)
        c(k) = std::sqrt(cutoff_factor(cutoff, sd.eigenvalues(k), N) / sd.eigenvalues(k));

    const Mat fr = sd.modes * (c.asDiagonal() * xr);
    const Mat fi = sd.modes * (c.asDiagonal() * xi);
    b.fields = fr.cast<std::complex<double>>();
    b.fields.imag() = fi;
    return b;
}

FieldBatch field_from_coords(const SpectralData& sd, double N, Cutoff cutoff,
                             const CMat& coords) {
    if (coords.rows() != sd.count())
        throw std::invalid_argument("field_from_coords: coordinate rows must match mode count");
    FieldBatch b;
    b.N = N;
    b.cutoff = cutoff;
    b.batch_size = static_cast<int>(coords.cols());
    b.coords = coords;
    Vec c(sd.count());
    for (int k = 0; k < sd.count(); ++k)
        c(k) = std::sqrt(cutoff_factor(cutoff, sd.eigenvalues(k), N) / sd.eigenvalues(k));
    b.fields = sd.modes * (c.asDiagonal() * coords);
    return b;
}

Mat wick_mass(const FieldBatch& batch, const KernelMatrix& G_N) {
    if (batch.N != G_N.N || (G_N.kind == KernelKind::green_truncated && batch.cutoff != G_N.cutoff))
        throw std::invalid_argument("wick_mass: kernel does not match the batch cutoff");
    return batch.fields.cwiseAbs2() - G_N.k.diagonal().replicate(1, batch.batch_size);
}

InteractionEvaluator::InteractionEvaluator(const KernelMatrix& G_N, const LatticeInteraction& li)
    : grid_(G_N.grid), N_(G_N.N), cutoff_(G_N.cutoff), offsets_(li.offsets), values_(li.values) {
    diag_ = G_N.k.diagonal();
    tau_ = Vec::Zero(grid_.sites());

    const int n = grid_.n;
    const bool periodic = grid_.boundary == Boundary::periodic;
    const double a2 = grid_.site_weight;

    double e_acc = 0.0, floor_acc = 0.0;
    green_along_.resize(offsets_.size());
    for (size_t s = 0; s < offsets_.size(); ++s) {
        Vec g = Vec::Zero(grid_.sites());
        const int dx = offsets_[s].x(), dy = offsets_[s].y();
        for (int iy = 0; iy < n; ++iy) {
            int jy = iy + dy;
            if (periodic)
                jy = (jy % n + n) % n;
            else if (jy < 0 || jy >= n)
                continue;
            for (int ix = 0; ix < n; ++ix) {
                int jx = ix + dx;
                if (periodic)
                    jx = (jx % n + n) % n;
                else if (jx < 0 || jx >= n)
                    continue;
                const int i = grid_.index(ix, iy), j = grid_.index(jx, jy);
                g(i) = G_N.k(i, j);
                tau_(i) += a2 * values_[s] * g(i);
                e_acc += values_[s] * g(i) * g(i);
                floor_acc += values_[s] * diag_(i) * diag_(j);
            }
        }
        green_along_[s] = std::move(g);
    }
    E_ = 0.5 * a2 * a2 * e_acc;
    // S = 1 + a^2 sum |v| = 2 for the normalized nonnegative profile.
    const double S = 1.0 + a2 * [&] {
        double t = 0.0;
        for (double v : values_) t += std::abs(v);
        return t;
    }();
    floor_ = 0.5 * (S * S - 1.0) * a2 * a2 * floor_acc;
}

InteractionEvaluator::PairValues InteractionEvaluator::evaluate_pair(
    const FieldBatch& batch) const {
    if (batch.N != N_)
        throw std::invalid_argument("interaction: batch cutoff does not match evaluator kernel");
    const int B = batch.batch_size;
    const int n = grid_.n;
    const bool periodic = grid_.boundary == Boundary::periodic;
    const double a2 = grid_.site_weight;

    const Mat m = batch.fields.cwiseAbs2().colwise() - diag_.array().matrix();

    // quad(sample) = a^4 sum_{x,y} v(x-y) :|phi(x)|^2 |phi(y)|^2:
    //             = a^4 sum_{x,d} v(d) [ m(x)m(x+d)
    //                                    - 2 G(x,x+d) Re(conj phi(x) phi(x+d))
    //                                    + G(x,x+d)^2 ]
    // mass_pair(sample) = a^4 sum_{x,d} v(d) m(x) m(x+d)   (Wick-ordered pair)
    Vec quad = Vec::Zero(B), mass_pair = Vec::Zero(B);
    Eigen::RowVectorXd accum(B);
    for (size_t s = 0; s < offsets_.size(); ++s) {
        const int dx = offsets_[s].x(), dy = offsets_[s].y();
        const double v = values_[s];
        const Vec& g = green_along_[s];
        for (int iy = 0; iy < n; ++iy) {
            int jy = iy + dy;
            if (periodic)
                jy = (jy % n + n) % n;
            else if (jy < 0 || jy >= n)
                continue;
            for (int ix = 0; ix < n; ++ix) {
                int jx = ix + dx;
                if (periodic)
                    jx = (jx % n + n) % n;
                else if (jx < 0 || jx >= n)
                    continue;
                const int i = grid_.index(ix, iy), j = grid_.index(jx, jy);
                accum = m.row(i).cwiseProduct(m.row(j));
                mass_pair += (v * accum).transpose();
                accum.noalias() -= 2.0 * g(i) *
                                   (batch.fields.row(i).conjugate().cwiseProduct(
                                        batch.fields.row(j)))
                                       .real();
                quad += (v * accum).transpose();
                quad.array() += v * g(i) * g(i);
            }
        }
    }
    quad *= a2 * a2;
    mass_pair *= a2 * a2;

    PairValues out;
    out.V = 0.5 * quad;
    // (1/2) int m v m - int tau m - E^eps
    out.W = 0.5 * mass_pair - (a2 * (m.transpose() * tau_)).eval() - Vec::Constant(B, E_);
    return out;
}

Vec InteractionEvaluator::evaluate(const FieldBatch& batch, InteractionKind kind) const {
    const PairValues pv = evaluate_pair(batch);
    switch (kind) {
        case InteractionKind::V_N:
        case InteractionKind::V_eps:
            return pv.V;
        case InteractionKind::W_eps:
            return pv.W;
    }
    return Vec();
}

TailCurve nelson_tail(const Vec& values) {
    TailCurve out;
    const Eigen::Index B = values.size();
    // P(e^{-V} > t) = P(V < -log t); probe t on a log grid above 1.
    Vec sorted = values;
    std::sort(sorted.data(), sorted.data() + B);

    const int n_pts = 40;
    out.log_t.resize(n_pts);
    out.tail_prob.resize(n_pts);
    const double lo = std::log(1.5);
    const double hi = std::max(2.0 * lo, -sorted(0) * 0.98);
    std::vector<double> xs, ys;
    int max_events = 0;
    for (int i = 0; i < n_pts; ++i) {
        const double logt = lo + (hi - lo) * i / (n_pts - 1);
        const double thr = -logt;
        const auto cnt = std::lower_bound(sorted.data(), sorted.data() + B, thr) - sorted.data();
        out.log_t(i) = logt;
        out.tail_prob(i) = static_cast<double>(cnt) / static_cast<double>(B);
        max_events = std::max<int>(max_events, static_cast<int>(cnt));
        if (cnt >= 30 && logt > 0.0) {
            xs.push_back(std::log(logt));
            ys.push_back(std::log(-std::log(out.tail_prob(i))));
        }
    }
    out.conclusive = max_events >= 30 && xs.size() >= 3;
    if (out.conclusive) {
        // least-squares slope of log(-log P) vs log log t
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double np = static_cast<double>(xs.size());
        for (size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        out.fitted_exponent = (np * sxy - sx * sy) / (np * sxx - sx * sx);
    }
    return out;
}

}  // namespace phi4lab
