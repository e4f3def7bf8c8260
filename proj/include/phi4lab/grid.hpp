#pragma once

#include <Eigen/Dense>

#include <complex>

namespace phi4lab {

using Cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

enum class Boundary { dirichlet, periodic };

/// Uniform square lattice on the box [-L,L]^2.
///
/// Dirichlet: n interior points per side, spacing a = 2L/(n+1), field vanishes
/// on the boundary ring. Periodic: n points per side, spacing a = 2L/n.
/// Sites are indexed i = ix + n*iy, x running fastest.
struct LatticeGrid {
    double half_width = 0.0;
    int n = 0;
    Boundary boundary = Boundary::dirichlet;
    double spacing = 0.0;      // a
    double site_weight = 0.0;  // a^2, the quadrature weight of one site

    int sites() const { return n * n; }
    int index(int ix, int iy) const { return ix + n * iy; }

    double coord(int i1d) const {
        if (boundary == Boundary::dirichlet)
            return -half_width + (i1d + 1) * spacing;
        return -half_width + i1d * spacing;
    }
    Eigen::Vector2d site(int i) const {
        return {coord(i % n), coord(i / n)};
    }
};

LatticeGrid build_grid(double half_width, int n, Boundary boundary);

/// Lattice inner product <f,g> = a^2 sum conj(f) g.
inline double lattice_dot(const LatticeGrid& g, const Vec& f, const Vec& h) {
    return g.site_weight * f.dot(h);
}
inline double lattice_norm(const LatticeGrid& g, const Vec& f) {
    return std::sqrt(g.site_weight) * f.norm();
}

}  // namespace phi4lab
