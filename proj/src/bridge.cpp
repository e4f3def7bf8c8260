#include "phi4lab/bridge.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "phi4lab/rng.hpp"

namespace phi4lab {

BridgePath sample_bridge(const Eigen::Vector2d& x, const Eigen::Vector2d& y, double t, int steps,
                         uint64_t seed, uint64_t stream) {
    if (steps < 8)
        throw std::invalid_argument("sample_bridge: steps must be >= 8");
    std::mt19937_64 eng = make_engine(seed, stream);
    std::normal_distribution<double> gauss(0.0, 1.0);

    BridgePath p;
    p.x = x;
    p.y = y;
    p.t = t;
    p.steps = steps;
    p.samples.resize(steps + 1, 2);

    const double dt = t / steps;
    Eigen::Vector2d B = Eigen::Vector2d::Zero();
    Mat brown(steps + 1, 2);
    brown.row(0).setZero();
    for (int i = 1; i <= steps; ++i) {
        B.x() += std::sqrt(dt) * gauss(eng);
        B.y() += std::sqrt(dt) * gauss(eng);
        brown.row(i) = B.transpose();
    }
    for (int i = 0; i <= steps; ++i) {
        const double s = static_cast<double>(i) / steps;
        p.samples.row(i) =
            brown.row(i) - s * brown.row(steps) + y.transpose() + s * (x - y).transpose();
    }
    // exact pinning regardless of rounding
    p.samples.row(0) = y.transpose();
    p.samples.row(steps) = x.transpose();
    return p;
}

namespace {

// trapezoid of U along one path
double path_action(const BridgePath& p, const PotentialSpec& spec) {
    const double dt = p.t / p.steps;
    double acc = 0.5 * (potential_value(spec, p.samples.row(0).transpose()) +
                        potential_value(spec, p.samples.row(p.steps).transpose()));
    for (int i = 1; i < p.steps; ++i)
        acc += potential_value(spec, p.samples.row(i).transpose());
    return acc * dt;
}

}  // namespace

FKEstimate fk_heat_kernel(const Eigen::Vector2d& x, const Eigen::Vector2d& y, double t,
                          const PotentialSpec& spec, double kappa, long n_paths, int steps,
                          uint64_t seed) {
    if (!(t > 0))
        throw std::invalid_argument("fk_heat_kernel: t must be positive");
    const double pref = free_heat_kernel(x - y, t) * std::exp(-kappa * t);
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < n_paths; ++i) {
        const BridgePath p = sample_bridge(x, y, t, steps, seed, static_cast<uint64_t>(i));
        const double w = std::exp(-path_action(p, spec));
        sum += w;
        sumsq += w * w;
    }
    FKEstimate est;
    est.n_paths = n_paths;
    const double mean = sum / n_paths;
    const double var = std::max(0.0, sumsq / n_paths - mean * mean);
    est.value = pref * mean;
    est.err = pref * std::sqrt(var / n_paths);
    return est;
}

FKDensity fk_rho_nu(const Eigen::Vector2d& x, double nu, int n_terms, const PotentialSpec& spec,
                    double kappa, long n_paths, int steps, uint64_t seed) {
    FKDensity out;
    out.n_terms = n_terms;
    double value = 0.0, var = 0.0;
    for (int n = 1; n <= n_terms; ++n) {
        const double t = nu * n;
        const int m = std::max(steps, static_cast<int>(std::ceil(t / 0.01)));
        const FKEstimate loop =
            fk_heat_kernel(x, x, t, spec, kappa, n_paths, m,
                           splitmix64(seed + 0x517cc1b727220a95ULL * static_cast<uint64_t>(n)));
        value += nu * loop.value;
        var += nu * nu * loop.err * loop.err;
    }
    // positive truncated tail, bounded by the free loop e^{-int U} <= e^{-t}
    // (U >= 1 for every potential kind here)
    double tail = 0.0;
    for (int n = n_terms + 1;; ++n) {
        const double t = nu * n;
        const double term = nu * free_heat_kernel(Eigen::Vector2d::Zero(), t) *
                            std::exp(-(kappa + 1.0) * t);
        tail += term;
        if (term < 1e-18 * (tail + 1e-300) || n > n_terms + 100000) break;
    }
    out.tail_bound = tail;
    out.estimate.value = value;
    out.estimate.err = std::sqrt(var);
    out.estimate.n_paths = n_paths;
    return out;
}

double kernel_interp(const Mat& K, const LatticeGrid& grid, const Eigen::Vector2d& x,
                     const Eigen::Vector2d& y) {
    auto locate = [&](double c, int& i0, double& w) {
        const double f = (c - grid.coord(0)) / grid.spacing;
        i0 = static_cast<int>(std::floor(f));
        w = f - i0;
        i0 = std::max(0, std::min(grid.n - 2, i0));
    };
    int ix, iy, jx, jy;
    double wx, wy, vx, vy;
    locate(x.x(), ix, wx);
    locate(x.y(), iy, wy);
    locate(y.x(), jx, vx);
    locate(y.y(), jy, vy);

    double out = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    const double w = (a ? wx : 1 - wx) * (b ? wy : 1 - wy) * (c ? vx : 1 - vx) *
                                     (d ? vy : 1 - vy);
                    out += w * K(grid.index(ix + a, iy + b), grid.index(jx + c, jy + d));
                }
    return out;
}

BoundFit envelope_check_lemma62(
    const PotentialSpec& spec,
    const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>& pairs,
    const std::vector<double>& times,
    const std::function<double(const Eigen::Vector2d&, const Eigen::Vector2d&, double)>& kernel) {
    std::vector<FitSample> samples;
    int idx = 0;
    for (const auto& [x, xt] : pairs) {
        int jdx = 0;
        for (double t : times) {
            const double v = kernel(x, xt, t);
            if (v > 1e-280) {
                FitSample s;
                s.value = v;
                s.log_pref = std::log(free_heat_kernel(x - xt, t));
                s.xi = lemma62_decay_coordinate(spec, x, xt, t);
                s.i = idx;
                s.j = jdx;
                samples.push_back(s);
            }
            ++jdx;
        }
        ++idx;
    }
    return fit_exponential_envelope(samples, EnvelopeForm::lemma62_heat);
}

}  // namespace phi4lab
