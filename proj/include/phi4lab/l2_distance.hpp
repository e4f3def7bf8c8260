#pragma once

#include "phi4lab/field_sampler.hpp"

namespace phi4lab {

/// Exact L^2(P) distances between Wick-ordered interactions, from closed-form
/// fourth-moment contractions; no sampling. Coupled cutoffs share the mode
/// coordinates X_k, so mixed moments involve the cross kernel
/// G_AB = sum_k c_k^A c_k^B u_k u_k^T.
enum class InteractionPair { VN_VM, Veps_Weps, Veps_V };

struct L2DistanceParams {
    double N = std::numeric_limits<double>::infinity();
    double M = std::numeric_limits<double>::infinity();
    Cutoff cutoff = Cutoff::exp;
    double epsilon = 0.0;  // 0 selects the local delta interaction
};

double l2_distance_exact(const SpectralData& sd, InteractionPair pair,
                         const L2DistanceParams& params);

/// E[V_A V_B] for quartic interactions smeared with li at field cutoffs A, B.
double quartic_second_moment(const SpectralData& sd, const LatticeInteraction& li, double A,
                             double B, Cutoff cutoff);

/// Same moment over an explicit cross kernel; also serves mixed smearings.
double quartic_cross_moment_kernel(const Mat& C, const LatticeGrid& grid,
                                   const LatticeInteraction& liA, const LatticeInteraction& liB);

}  // namespace phi4lab
