#include "phi4lab/interaction.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace phi4lab {

namespace {

double bump(double x, double y) {
    const double r2 = 4.0 * (x * x + y * y);
    if (r2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - r2));
}

// Gauss-Legendre nodes/weights on [-1/2, 1/2], cached.
struct GaussRule {
    Vec nodes, weights;
};

const GaussRule& gauss_rule() {
    static GaussRule rule = [] {
        constexpr int m = 96;
        GaussRule r;
        r.nodes.resize(m);
        r.weights.resize(m);
        // Newton iteration on Legendre polynomials.
        for (int i = 0; i < m; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= m; ++k) {
                    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = m * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = m * (x * p1 - p0) / (x * x - 1.0);
            r.nodes(i) = 0.5 * x;
            r.weights(i) = 0.5 * 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

double bump_mass() {
    static double mass = [] {
        const GaussRule& g = gauss_rule();
        double s = 0.0;
        for (int i = 0; i < g.nodes.size(); ++i)
            for (int j = 0; j < g.nodes.size(); ++j)
                s += g.weights(i) * g.weights(j) * bump(g.nodes(i), g.nodes(j));
        return s;
    }();
    return mass;
}

}  // namespace

double base_profile(double r) {
    if (r >= 1.0) return 0.0;
    const GaussRule& g = gauss_rule();
    double s = 0.0;
    for (int i = 0; i < g.nodes.size(); ++i) {
        const double y1 = g.nodes(i);
        for (int j = 0; j < g.nodes.size(); ++j) {
            const double y2 = g.nodes(j);
            const double b = bump(y1, y2);
            if (b != 0.0) s += g.weights(i) * g.weights(j) * b * bump(y1 + r, y2);
        }
    }
    const double m = bump_mass();
    return s / (m * m);
}

double LatticeInteraction::value_at_zero() const {
    for (size_t i = 0; i < offsets.size(); ++i)
        if (offsets[i].x() == 0 && offsets[i].y() == 0) return values[i];
    return 0.0;
}

LatticeInteraction discretize_interaction(double epsilon, const LatticeGrid& grid) {
    if (epsilon < 2.0 * grid.spacing)
        throw std::invalid_argument("discretize_interaction: eps < 2a is unresolved");
    LatticeInteraction li;
    li.epsilon = epsilon;
    li.reach = static_cast<int>(std::floor(epsilon / grid.spacing));

    std::map<long long, double> radial_cache;  // keyed by dx^2+dy^2
    double total = 0.0;
    for (int dy = -li.reach; dy <= li.reach; ++dy) {
        for (int dx = -li.reach; dx <= li.reach; ++dx) {
            const long long r2 = static_cast<long long>(dx) * dx + static_cast<long long>(dy) * dy;
            const double r = std::sqrt(static_cast<double>(r2)) * grid.spacing / epsilon;
            if (r >= 1.0) continue;
            auto it = radial_cache.find(r2);
            double v;
            if (it != radial_cache.end()) {
                v = it->second;
            } else {
                v = base_profile(r) / (epsilon * epsilon);
                radial_cache.emplace(r2, v);
            }
            if (v <= 0.0) continue;
            li.offsets.emplace_back(dx, dy);
            li.values.push_back(v);
            total += v;
        }
    }
    // Lattice renormalization: a^2 sum v^eps = 1 exactly.
    const double z = total * grid.site_weight;
    for (double& v : li.values) v /= z;
    return li;
}

LatticeInteraction delta_interaction(const LatticeGrid& grid) {
    LatticeInteraction li;
    li.epsilon = 0.0;
    li.reach = 0;
    li.is_delta = true;
    li.offsets.emplace_back(0, 0);
    li.values.push_back(1.0 / grid.site_weight);
    return li;
}

SpMat interaction_pair_matrix(const LatticeInteraction& li, const LatticeGrid& grid) {
    const int n = grid.n;
    const bool periodic = grid.boundary == Boundary::periodic;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(grid.sites() * li.offsets.size());
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            const int i = grid.index(ix, iy);
            for (size_t s = 0; s < li.offsets.size(); ++s) {
                int jx = ix + li.offsets[s].x(), jy = iy + li.offsets[s].y();
                if (periodic) {
                    jx = (jx % n + n) % n;
                    jy = (jy % n + n) % n;
                } else if (jx < 0 || jx >= n || jy < 0 || jy >= n) {
                    continue;
                }
                trip.emplace_back(i, grid.index(jx, jy), li.values[s]);
            }
        }
    SpMat M(grid.sites(), grid.sites());
    M.setFromTriplets(trip.begin(), trip.end());
    M.makeCompressed();
    return M;
}

Vec convolve(const LatticeInteraction& li, const LatticeGrid& grid, const Vec& f) {
    const int n = grid.n;
    const bool periodic = grid.boundary == Boundary::periodic;
    Vec out = Vec::Zero(grid.sites());
    for (size_t s = 0; s < li.offsets.size(); ++s) {
        const int dx = li.offsets[s].x(), dy = li.offsets[s].y();
        const double w = li.values[s] * grid.site_weight;
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
                out(grid.index(ix, iy)) += w * f(grid.index(jx, jy));
            }
        }
    }
    return out;
}

RenormData tau_and_E(const KernelMatrix& G, const LatticeInteraction& li) {
    if (G.kind != KernelKind::green && G.kind != KernelKind::green_truncated)
        throw std::invalid_argument("tau_and_E: kernel must be a Green function");
    const LatticeGrid& grid = G.grid;
    const int n = grid.n;
    const bool periodic = grid.boundary == Boundary::periodic;
    const double a2 = grid.site_weight;

    RenormData rd;
    rd.tau = Vec::Zero(grid.sites());
    double e_acc = 0.0;
    for (size_t s = 0; s < li.offsets.size(); ++s) {
        const int dx = li.offsets[s].x(), dy = li.offsets[s].y();
        const double v = li.values[s];
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
                const double g = G.k(grid.index(ix, iy), grid.index(jx, jy));
                rd.tau(grid.index(ix, iy)) += a2 * v * g;
                e_acc += v * g * g;
            }
        }
    }
    rd.E_eps = 0.5 * a2 * a2 * e_acc;
    return rd;
}

Vec tau_at_sites(const LatticeInteraction& li, const LatticeGrid& grid,
                 const Eigen::SimplicialLLT<SpMat>& llt, const std::vector<int>& sites) {
    const int n = grid.n;
    Vec out(static_cast<Eigen::Index>(sites.size()));
    Vec rhs = Vec::Zero(grid.sites());
    for (size_t q = 0; q < sites.size(); ++q) {
        const int i = sites[q];
        const int ix = i % n, iy = i / n;
        std::vector<int> touched;
        // [H^{-1}]_{ij} = a^2 G(i,j): the bare v-bump right-hand side yields
        // tau(x) = a^2 sum v G directly
        for (size_t s = 0; s < li.offsets.size(); ++s) {
            const int jx = ix + li.offsets[s].x(), jy = iy + li.offsets[s].y();
            if (jx < 0 || jx >= n || jy < 0 || jy >= n) continue;
            const int j = grid.index(jx, jy);
            rhs(j) = li.values[s];
            touched.push_back(j);
        }
        out(static_cast<Eigen::Index>(q)) = llt.solve(rhs)(i);
        for (int j : touched) rhs(j) = 0.0;
    }
    return out;
}

}  // namespace phi4lab
