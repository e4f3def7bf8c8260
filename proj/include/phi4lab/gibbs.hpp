#pragma once

#include <complex>
#include <vector>

#include "phi4lab/field_sampler.hpp"

namespace phi4lab {

struct MeanErr {
    double value = 0.0;
    double err = 0.0;
};

/// zeta = E[e^{-V}] with jackknife stderr over `blocks` blocks.
MeanErr partition_estimate(const Vec& interaction_values, int blocks = 50);

/// Free-field 2p-point moment: permanent sum_pi prod_i G(x_i, xt_{pi(i)}).
Cplx free_corr(const KernelMatrix& G, const std::vector<int>& xs, const std::vector<int>& xts);

/// Wick-ordered monomial :prod phi(x_i) prod conj phi(xt_j): per sample,
/// via partial matchings with (-1)^{matched} G factors.
CVec wick_monomial(const FieldBatch& batch, const KernelMatrix& G_N, const std::vector<int>& xs,
                   const std::vector<int>& xts);
CVec plain_monomial(const FieldBatch& batch, const std::vector<int>& xs,
                    const std::vector<int>& xts);

struct CorrelationEstimate {
    std::vector<int> xs, xts;
    int p = 0;
    Cplx value{0.0, 0.0};
    double err = 0.0;   // combined stderr of Re/Im
    double zeta = 0.0;  // shared normalizer
    double zeta_err = 0.0;
};

/// Ratio estimator E[monomial e^{-V}] / E[e^{-V}] with block-jackknife error
/// propagation through the shared denominator.
CorrelationEstimate ratio_estimate(const CVec& numerator_samples, const Vec& interaction_values,
                                   int blocks = 50);

/// gamma_p (wick=false) or gamma-hat_p (wick=true, direct Wick route) from one
/// in-memory batch. The combination route of the Wick-ordered function is
/// corr_combination below.
CorrelationEstimate corr_estimate(const FieldBatch& batch, const Vec& interaction_values,
                                  const KernelMatrix& G_N, const std::vector<int>& xs,
                                  const std::vector<int>& xts, bool wick);

/// gamma-hat_p via the binomial combination of gamma_k with the free
/// gamma^0_{p-k}, symmetrized over S_p on both tuples; errors via jackknife
/// blocks shared with the gamma_k estimators.
CorrelationEstimate corr_combination(const FieldBatch& batch, const Vec& interaction_values,
                                     const KernelMatrix& G_N, const std::vector<int>& xs,
                                     const std::vector<int>& xts, int blocks = 50);

/// Connected-component decay weight: product over components of the
/// |y_i - y_j| <= 1 graph of 1/(1+|rep|^theta), rep = the member of minimal
/// norm.
double upsilon(const std::vector<Eigen::Vector2d>& points, double theta);

/// Derivative-representation check of gamma-hat_1 on a small-mode system:
/// (1/zeta) E[(-LbarLV + (LV)(LbarV)) e^{-V}] against the direct estimate.
struct IbpReport {
    Cplx ibp_value{0.0, 0.0};
    double ibp_err = 0.0;
    Cplx direct_value{0.0, 0.0};
    double direct_err = 0.0;
    double sigma_distance = 0.0;  // |difference| / combined stderr
};
IbpReport ibp_corr_check(const SpectralData& sd, const KernelMatrix& G_N,
                         const LatticeInteraction& li, double coupling, int x, int xt,
                         int batch_size, uint64_t seed);

}  // namespace phi4lab
