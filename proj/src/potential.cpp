#include "phi4lab/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace phi4lab {

double potential_value(const PotentialSpec& spec, const Eigen::Vector2d& x) {
    const double r = x.norm();
    switch (spec.kind) {
        case PotentialKind::power:
            return 1.0 + std::pow(r, spec.theta);
        case PotentialKind::step:
            return 1.0 + std::pow(std::floor(r), spec.theta);
        case PotentialKind::rapid:
            return std::exp(std::pow(1.0 + r * r, spec.rapid_exponent));
        case PotentialKind::tabulated:
            throw std::invalid_argument("potential_value: tabulated kind has no closed form");
    }
    return 0.0;
}

double growth_floor(const PotentialSpec& spec, const Eigen::Vector2d& x) {
    if (spec.kind == PotentialKind::rapid)
        return std::exp(std::pow(1.0 + x.squaredNorm(), spec.rapid_exponent));
    return 1.0 + std::pow(x.norm(), spec.theta);
}

Vec eval_potential(const PotentialSpec& spec, const LatticeGrid& grid) {
    const int m = grid.sites();
    if (spec.kind == PotentialKind::tabulated) {
        if (spec.table.size() != m)
            throw std::invalid_argument("eval_potential: tabulated size does not match grid");
        if ((spec.table.array() <= 0.0).any())
            throw std::invalid_argument("eval_potential: tabulated potential must be positive");
        return spec.table;
    }
    Vec U(m);
    for (int i = 0; i < m; ++i) U(i) = potential_value(spec, grid.site(i));
    return U;
}

GrowthReport verify_growth_assumption(const PotentialSpec& spec, const LatticeGrid& grid) {
    GrowthReport rep;
    const int m = grid.sites();
    const bool closed_form = spec.kind != PotentialKind::tabulated;
    const Vec U = eval_potential(spec, grid);

    double cmin = std::numeric_limits<double>::infinity();
    double Cmax = 0.0;
    for (int i = 0; i < m; ++i) {
        const Eigen::Vector2d x = grid.site(i);
        const double g = growth_floor(spec, x);
        const double g32 = std::pow(growth_floor_dilated(spec, x), 1.5);
        cmin = std::min(cmin, U(i) / g);
        Cmax = std::max(Cmax, U(i) / g32);
    }
    rep.lower_c = cmin;
    rep.upper_C = Cmax;
    rep.sandwich_holds = cmin > 0.0 && std::isfinite(Cmax);

    if (!closed_form || spec.kind == PotentialKind::step) {
        // Discontinuous (or opaque) potential: probe whether central differences
        // converge as the step shrinks. For the step kind they diverge like 1/h
        // across integer radii.
        double worst_ratio = 0.0;
        rep.gradient_C = 0.0;
        if (closed_form) {
            const double h1 = grid.spacing / 8.0, h2 = h1 / 2.0;
            for (int i = 0; i < m; ++i) {
                const Eigen::Vector2d x = grid.site(i);
                auto fd = [&](double h) {
                    Eigen::Vector2d gvec;
                    for (int d = 0; d < 2; ++d) {
                        Eigen::Vector2d e = Eigen::Vector2d::Zero();
                        e(d) = h;
                        gvec(d) = (potential_value(spec, x + e) - potential_value(spec, x - e)) / (2 * h);
                    }
                    return gvec.norm();
                };
                const double d1 = fd(h1), d2 = fd(h2);
                if (d1 > 0.0 && d2 / (d1 + 1e-300) > worst_ratio) {
                    worst_ratio = d2 / d1;
                    rep.worst_gradient_radius = x.norm();
                }
                const double g32 = std::pow(growth_floor_dilated(spec, x), 1.5);
                rep.gradient_C = std::max(rep.gradient_C, d2 / g32);
            }
        }
        rep.gradient_holds = closed_form && worst_ratio < 1.5;
        return rep;
    }

    // Differentiable kinds: fit |grad U| <= C g^{3/2}(gamma x) by central differences.
    const double h = grid.spacing / 8.0;
    double Cg = 0.0;
    double worst_r = 0.0;
    for (int i = 0; i < m; ++i) {
        const Eigen::Vector2d x = grid.site(i);
        Eigen::Vector2d gvec;
        for (int d = 0; d < 2; ++d) {
            Eigen::Vector2d e = Eigen::Vector2d::Zero();
            e(d) = h;
            gvec(d) = (potential_value(spec, x + e) - potential_value(spec, x - e)) / (2 * h);
        }
        const double g32 = std::pow(growth_floor_dilated(spec, x), 1.5);
        const double ratio = gvec.norm() / g32;
        if (ratio > Cg) {
            Cg = ratio;
            worst_r = x.norm();
        }
    }
    rep.gradient_C = Cg;
    rep.worst_gradient_radius = worst_r;
    rep.gradient_holds = std::isfinite(Cg);
    return rep;
}

}  // namespace phi4lab
