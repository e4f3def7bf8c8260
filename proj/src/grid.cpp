#include "phi4lab/grid.hpp"

#include <stdexcept>

namespace phi4lab {

LatticeGrid build_grid(double half_width, int n, Boundary boundary) {
    if (half_width <= 0.0)
        throw std::invalid_argument("build_grid: half_width must be positive");
    if (n < 8)
        throw std::invalid_argument("build_grid: n < 8 gives unusable resolution");
    LatticeGrid g;
    g.half_width = half_width;
    g.n = n;
    g.boundary = boundary;
    g.spacing = boundary == Boundary::dirichlet ? 2.0 * half_width / (n + 1)
                                                : 2.0 * half_width / n;
    g.site_weight = g.spacing * g.spacing;
    return g;
}

}  // namespace phi4lab
