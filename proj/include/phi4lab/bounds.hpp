#pragma once

#include "phi4lab/kernels.hpp"
#include "phi4lab/potential.hpp"

namespace phi4lab {

enum class EnvelopeForm {
    prop61_boundG,      // [( [log(1/(r sqrt(gmax)))]_+ ^ log N ) v 1] e^{-c r sqrt(gmax)}
    prop61_GN_minus_G,  // [log(1/(N r^2))]_+ + e^{-N r^2}/(N r^2)   (no decay rate)
    prop63_gradG,       // (1/r) e^{-c r sqrt(g~(y))}
    prop74_Gnu,         // as prop61_boundG with log N -> log(1/nu)
    lemma62_heat        // psi^t e^{-c(t/2 + min applicable regime exponent)}
};

/// Envelope fit: c is the least-squares decay rate of log(K/prefactor)
/// against the decay coordinate, clamped at zero; C is then the max ratio, so
/// violation_fraction is zero by construction. ok fails when c <= 0 where the
/// form carries a rate.
struct BoundFit {
    EnvelopeForm form = EnvelopeForm::prop61_boundG;
    double c = 0.0;
    double C = 0.0;
    double violation_fraction = 0.0;
    long pairs = 0;
    int argmax_i = -1, argmax_j = -1;  // pair attaining the max ratio
    bool ok = false;
};

/// One data point of an exponential-envelope fit:
/// value <= C * exp(log_pref) * exp(-c * xi).
struct FitSample {
    double value = 0.0;
    double log_pref = 0.0;
    double xi = 0.0;
    int i = -1, j = -1;
};

BoundFit fit_exponential_envelope(const std::vector<FitSample>& samples, EnvelopeForm form,
                                  bool has_rate = true);

/// Envelope fit of a kernel-valued matrix over all pairs |x-y| >= 2a.
/// `values` holds K(x,y) (or |grad G|, or |G_N - G|); scale is N for the
/// prop61 forms and nu for prop74.
BoundFit fit_decay_bound(const Mat& values, const LatticeGrid& grid, const PotentialSpec& spec,
                         EnvelopeForm form, double scale);

/// Decay exponent of the Lemma 6.2 heat-kernel envelope at (x, xt, t):
/// t/2 plus the smallest applicable regime exponent. The indicator regime
/// contributes exponent zero inside its time window.
double lemma62_decay_coordinate(const PotentialSpec& spec, const Eigen::Vector2d& x,
                                const Eigen::Vector2d& xt, double t);

}  // namespace phi4lab
