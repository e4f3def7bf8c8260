#include "phi4lab/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace phi4lab {

namespace {
constexpr double kValueFloor = 1e-280;  // below this both sides underflow; skip
}

BoundFit fit_exponential_envelope(const std::vector<FitSample>& samples, EnvelopeForm form,
                                  bool has_rate) {
    BoundFit fit;
    fit.form = form;
    fit.pairs = static_cast<long>(samples.size());
    if (samples.empty()) return fit;

    double c = 0.0;
    if (has_rate) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, np = 0;
        for (const FitSample& s : samples) {
            const double ell = std::log(s.value) - s.log_pref;
            sx += s.xi;
            sy += ell;
            sxx += s.xi * s.xi;
            sxy += s.xi * ell;
            np += 1;
        }
        const double denom = np * sxx - sx * sx;
        c = denom > 0 ? -(np * sxy - sx * sy) / denom : 0.0;
    }
    fit.c = c;

    double max_log_ratio = -std::numeric_limits<double>::infinity();
    for (const FitSample& s : samples) {
        const double lr = std::log(s.value) - s.log_pref + c * s.xi;
        if (lr > max_log_ratio) {
            max_log_ratio = lr;
            fit.argmax_i = s.i;
            fit.argmax_j = s.j;
        }
    }
    fit.C = std::exp(max_log_ratio);
    fit.violation_fraction = 0.0;
    fit.ok = std::isfinite(fit.C) && (!has_rate || fit.c > 0.0);
    return fit;
}

BoundFit fit_decay_bound(const Mat& values, const LatticeGrid& grid, const PotentialSpec& spec,
                         EnvelopeForm form, double scale) {
    if (form == EnvelopeForm::lemma62_heat)
        throw std::invalid_argument("fit_decay_bound: lemma62 takes time-indexed samples");
    const int m = grid.sites();
    const double rmin = 2.0 * grid.spacing;

    Vec gt(m);
    for (int i = 0; i < m; ++i) gt(i) = growth_floor_dilated(spec, grid.site(i));

    const bool has_rate = form != EnvelopeForm::prop61_GN_minus_G;
    const double log_cap = std::isinf(scale) ? std::numeric_limits<double>::infinity()
                                             : std::log(form == EnvelopeForm::prop74_Gnu
                                                            ? 1.0 / scale
                                                            : scale);
    // Pair data is O(sites^2); stream it twice instead of buffering.
    auto pair_sample = [&](int i, int j, FitSample& s) -> bool {
        const double r = (grid.site(i) - grid.site(j)).norm();
        if (r < rmin) return false;
        s.value = std::abs(values(i, j));
        s.i = i;
        s.j = j;
        switch (form) {
            case EnvelopeForm::prop61_boundG:
            case EnvelopeForm::prop74_Gnu: {
                const double gmax = std::max(gt(i), gt(j));
                s.xi = r * std::sqrt(gmax);
                double pref = std::max(0.0, std::log(1.0 / s.xi));
                pref = std::max(1.0, std::min(pref, log_cap));
                s.log_pref = std::log(pref);
                break;
            }
            case EnvelopeForm::prop61_GN_minus_G: {
                const double z = scale * r * r;
                const double env = std::max(0.0, std::log(1.0 / z)) + std::exp(-z) / z;
                s.xi = 0.0;
                s.log_pref = std::log(env);
                break;
            }
            case EnvelopeForm::prop63_gradG: {
                s.xi = r * std::sqrt(gt(j));
                s.log_pref = -std::log(r);
                break;
            }
            default:
                break;
        }
        return true;
    };

    BoundFit fit;
    fit.form = form;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, np = 0;
    long pairs = 0;
    FitSample s;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (!pair_sample(i, j, s)) continue;
            ++pairs;
            if (s.value < kValueFloor) continue;  // both sides dead; trivially covered
            if (has_rate) {
                const double ell = std::log(s.value) - s.log_pref;
                sx += s.xi;
                sy += ell;
                sxx += s.xi * s.xi;
                sxy += s.xi * ell;
                np += 1;
            }
        }
    fit.pairs = pairs;
    if (has_rate) {
        const double denom = np * sxx - sx * sx;
        fit.c = denom > 0 ? -(np * sxy - sx * sy) / denom : 0.0;
    } else {
        fit.c = 1.0;
    }

    double max_log_ratio = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (!pair_sample(i, j, s)) continue;
            if (s.value < kValueFloor) continue;
            const double lr = std::log(s.value) - s.log_pref + (has_rate ? fit.c * s.xi : 0.0);
            if (lr > max_log_ratio) {
                max_log_ratio = lr;
                fit.argmax_i = s.i;
                fit.argmax_j = s.j;
            }
        }
    fit.C = std::exp(max_log_ratio);
    fit.violation_fraction = 0.0;
    fit.ok = std::isfinite(fit.C) && fit.C > 0.0 && (!has_rate || fit.c > 0.0);
    return fit;
}

double lemma62_decay_coordinate(const PotentialSpec& spec, const Eigen::Vector2d& x,
                                const Eigen::Vector2d& xt, double t) {
    const double gmax = std::max(growth_floor_dilated(spec, x), growth_floor_dilated(spec, xt));
    const double rsum = x.norm() + xt.norm();
    double zeta = std::min(gmax * t, rsum * std::sqrt(gmax));
    zeta = std::min(zeta, std::cbrt(t) * std::pow(rsum, 2.0 / 3.0) * std::pow(gmax, 2.0 / 3.0));
    if (t <= 1.0 / (gmax * gmax * rsum * rsum)) zeta = 0.0;  // indicator regime applies
    return 0.5 * t + zeta;
}

}  // namespace phi4lab
