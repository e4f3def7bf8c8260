#pragma once

#include "phi4lab/interaction.hpp"
#include "phi4lab/kernels.hpp"

namespace phi4lab {

/// One chunk of regularised free-field samples phi_N = sum_k X_k c_k u_k,
/// c_k = sqrt(theta(lambda_k/N)/lambda_k), X_k standard complex Gaussian.
/// Large runs stream over chunks; chunk c of a master seed uses stream c.
struct FieldBatch {
    CMat coords;  // modes x batch
    CMat fields;  // sites x batch
    double N = std::numeric_limits<double>::infinity();
    Cutoff cutoff = Cutoff::exp;
    uint64_t seed = 0;
    uint64_t stream = 0;
    int batch_size = 0;
};

FieldBatch sample_free_field(const SpectralData& sd, double N, Cutoff cutoff, int batch_size,
                             uint64_t seed, uint64_t stream = 0);

/// Deterministic fields from given mode coordinates (quadrature oracles).
FieldBatch field_from_coords(const SpectralData& sd, double N, Cutoff cutoff, const CMat& coords);

/// Wick-ordered mass :|phi(x)|^2: = |phi(x)|^2 - G_N(x,x), per sample.
Mat wick_mass(const FieldBatch& batch, const KernelMatrix& G_N);

enum class InteractionKind { V_N, V_eps, W_eps };

/// Precomputed geometry for per-sample interaction evaluation on one kernel
/// level: stencil pairs, the Green values along them, tau and E.
class InteractionEvaluator {
  public:
    InteractionEvaluator(const KernelMatrix& G_N, const LatticeInteraction& li);

    /// Per-sample values of the requested Wick-ordered interaction.
    Vec evaluate(const FieldBatch& batch, InteractionKind kind) const;

    /// V^eps and W^eps of the same batch in one pass over the stencil.
    struct PairValues {
        Vec V, W;
    };
    PairValues evaluate_pair(const FieldBatch& batch) const;

    const Vec& tau() const { return tau_; }
    double E_eps() const { return E_; }
    /// Exact deterministic floor: V >= -floor() for every sample
    /// ((S^2-1)/2 a^4 sum v G(x,x)G(y,y), S = 1 + a^2 sum |v|).
    double floor() const { return floor_; }

  private:
    const LatticeGrid grid_;
    double N_;
    Cutoff cutoff_;
    Vec diag_;                             // G_N(x,x)
    std::vector<Eigen::Vector2i> offsets_;
    std::vector<double> values_;           // v^eps per offset
    std::vector<Vec> green_along_;         // G_N(x, x+offset) per offset
    Vec tau_;
    double E_ = 0.0;
    double floor_ = 0.0;
};

/// Empirical tail of P(e^{-V} > t) on a log-t grid with a stretched-exponent
/// fit of log(-log P) against log log t.
struct TailCurve {
    Vec log_t;
    Vec tail_prob;        // P(e^{-V} > t)
    double fitted_exponent = 0.0;
    bool conclusive = false;  // >= 30 tail events behind the fit
};
TailCurve nelson_tail(const Vec& values);

}  // namespace phi4lab
