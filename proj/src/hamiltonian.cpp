#include "phi4lab/hamiltonian.hpp"

#include <stdexcept>
#include <vector>

namespace phi4lab {

OperatorMatrix assemble_hamiltonian(const LatticeGrid& grid, const Vec& potential, double kappa) {
    if (kappa <= 0.0)
        throw std::invalid_argument("assemble_hamiltonian: kappa must be positive");
    const int n = grid.n;
    const int m = grid.sites();
    if (potential.size() != m)
        throw std::invalid_argument("assemble_hamiltonian: potential size does not match grid");
    if ((potential.array() <= 0.0).any())
        throw std::invalid_argument("assemble_hamiltonian: potential must be positive");

    const double hop = -0.5 / grid.site_weight;  // -1/(2 a^2)
    const bool periodic = grid.boundary == Boundary::periodic;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(5) * m);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const int i = grid.index(ix, iy);
            trip.emplace_back(i, i, kappa + potential(i) - 4.0 * hop);
            auto link = [&](int jx, int jy) {
                if (periodic) {
                    jx = (jx + n) % n;
                    jy = (jy + n) % n;
                } else if (jx < 0 || jx >= n || jy < 0 || jy >= n) {
                    return;  // Dirichlet: neighbour carries zero boundary data
                }
                trip.emplace_back(i, grid.index(jx, jy), hop);
            };
            link(ix + 1, iy);
            link(ix - 1, iy);
            link(ix, iy + 1);
            link(ix, iy - 1);
        }
    }

    OperatorMatrix op;
    op.grid = grid;
    op.kappa = kappa;
    op.H.resize(m, m);
    op.H.setFromTriplets(trip.begin(), trip.end());
    op.H.makeCompressed();
    return op;
}

}  // namespace phi4lab
