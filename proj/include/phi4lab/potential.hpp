#pragma once

#include "phi4lab/grid.hpp"

namespace phi4lab {

enum class PotentialKind { power, step, rapid, tabulated };

/// Parametric trap potential.
///
/// power:  U(x) = 1 + |x|^theta        (growth classes P and D)
/// step:   U(x) = 1 + floor(|x|)^theta (P only; discontinuous)
/// rapid:  U(x) = exp((1 + |x|^2)^C)   (D)
/// tabulated: per-site values supplied externally.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::power;
    double theta = 12.0;
    double rapid_exponent = 1.0;  // the C of exp((1+|x|^2)^C)
    double gamma = 0.9;           // dilation of the growth floor, g~(x) = g(gamma x)
    double kappa = 4.0;           // chemical-potential shift
    Vec table;                    // tabulated kind only

    bool differentiable() const { return kind != PotentialKind::step; }
};

double potential_value(const PotentialSpec& spec, const Eigen::Vector2d& x);

/// Radial growth floor g(x) >= 1 with U >= c g; for power/step this is
/// 1 + |x|^theta, for rapid the potential itself.
double growth_floor(const PotentialSpec& spec, const Eigen::Vector2d& x);

/// g~(x) = g(gamma x), the dilated floor entering every decay envelope.
inline double growth_floor_dilated(const PotentialSpec& spec, const Eigen::Vector2d& x) {
    return growth_floor(spec, spec.gamma * x);
}

Vec eval_potential(const PotentialSpec& spec, const LatticeGrid& grid);

/// Fitted constants of the growth sandwich c g <= U <= C g^{3/2}(gamma x) and,
/// for differentiable kinds, of |grad U| <= C g^{3/2}(gamma x).
struct GrowthReport {
    double lower_c = 0.0;       // min over sites of U/g
    double upper_C = 0.0;       // max over sites of U/g^{3/2}(gamma x)
    bool sandwich_holds = false;
    double gradient_C = 0.0;    // max over interior sites of |grad U|/g^{3/2}(gamma x)
    bool gradient_holds = false;
    double worst_gradient_radius = 0.0;
};

GrowthReport verify_growth_assumption(const PotentialSpec& spec, const LatticeGrid& grid);

}  // namespace phi4lab
