#include "phi4lab/homogeneous.hpp"

#include <cmath>

#include "phi4lab/kernels.hpp"

namespace phi4lab {

namespace {

// 1D kinetic levels (1 - cos(2 pi j / n))/a^2 of -lap/2 per direction.
Vec kinetic_levels(const LatticeGrid& g) {
    Vec k(g.n);
    for (int j = 0; j < g.n; ++j)
        k(j) = (1.0 - std::cos(2.0 * M_PI * j / g.n)) / g.site_weight;
    return k;
}

}  // namespace

HomogeneousReference HomogeneousReference::companion(const LatticeGrid& dirichlet_grid,
                                                     double kappa) {
    HomogeneousReference ref;
    ref.grid = build_grid(0.5 * dirichlet_grid.n * dirichlet_grid.spacing, dirichlet_grid.n,
                          Boundary::periodic);
    ref.kappa = kappa;
    return ref;
}

double HomogeneousReference::diagonal(const std::function<double(double)>& weight) const {
    const Vec k = kinetic_levels(grid);
    double sum = 0.0;
    for (int j1 = 0; j1 < grid.n; ++j1)
        for (int j2 = 0; j2 < grid.n; ++j2) sum += weight(kappa + k(j1) + k(j2));
    return sum / (static_cast<double>(grid.sites()) * grid.site_weight);
}

std::vector<double> HomogeneousReference::green_offsets(
    const std::vector<Eigen::Vector2i>& offsets) const {
    const int n = grid.n;
    const Vec k = kinetic_levels(grid);

    // G^0(dx,dy) = (1/(n^2 a^2)) sum_{j1,j2} cos(2pi j1 dx/n) cos(2pi j2 dy/n)
    //              / (kappa + k1 + k2), factored through the inner j2 sum.
    int dy_max = 0;
    for (const auto& d : offsets) dy_max = std::max(dy_max, std::abs(d.y()));
    Mat inner(n, dy_max + 1);
    for (int dy = 0; dy <= dy_max; ++dy)
        for (int j1 = 0; j1 < n; ++j1) {
            double s = 0.0;
            for (int j2 = 0; j2 < n; ++j2)
                s += std::cos(2.0 * M_PI * j2 * dy / n) / (kappa + k(j1) + k(j2));
            inner(j1, dy) = s;
        }

    std::vector<double> out(offsets.size());
    const double norm = 1.0 / (static_cast<double>(grid.sites()) * grid.site_weight);
    for (size_t i = 0; i < offsets.size(); ++i) {
        const int dx = std::abs(offsets[i].x()), dy = std::abs(offsets[i].y());
        double s = 0.0;
        for (int j1 = 0; j1 < n; ++j1) s += std::cos(2.0 * M_PI * j1 * dx / n) * inner(j1, dy);
        out[i] = s * norm;
    }
    return out;
}

double HomogeneousReference::green_diagonal() const {
    return diagonal([](double lam) { return 1.0 / lam; });
}

double HomogeneousReference::density(double nu) const {
    return diagonal([nu](double lam) { return quantum_green_weight(lam, nu, 0.0); });
}

double HomogeneousReference::heat_diagonal(double t) const {
    return diagonal([t](double lam) { return std::exp(-t * lam); });
}

}  // namespace phi4lab
