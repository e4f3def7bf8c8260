#pragma once

#include <atomic>
#include <functional>
#include <thread>

#include "phi4lab/counterterm.hpp"
#include "phi4lab/experiments.hpp"
#include "phi4lab/field_sampler.hpp"
#include "phi4lab/gibbs.hpp"
#include "phi4lab/io.hpp"

namespace phi4lab::detail {

/// Spectral data for the configured trap, cached on disk under
/// output_dir/cache keyed by the physics part of the config.
SpectralData configured_spectral(const ExperimentConfig& cfg);

/// Chunked Monte Carlo over `total` samples: fn(stream, count) returns a
/// (count x ncols) block of per-sample values; blocks are concatenated in
/// stream order, so the result is independent of the worker count.
Mat stream_samples(long total, int chunk, int workers, int ncols,
                   const std::function<Mat(uint64_t stream, int count)>& fn);

/// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

double mean_of(const Vec& v);
double stderr_of(const Vec& v);

/// 4-sigma agreement helper: |a - b| <= 4 sqrt(ea^2 + eb^2).
bool within_sigma(double a, double ea, double b, double eb, double n_sigma, double* dist = nullptr);

nlohmann::ordered_json series_table(const std::vector<std::string>& columns,
                                    const std::vector<std::vector<double>>& rows);

ExperimentResult exp_spectrum(const ExperimentConfig& cfg);
ExperimentResult exp_green_bounds(const ExperimentConfig& cfg);
ExperimentResult exp_l2_scaling(const ExperimentConfig& cfg);
ExperimentResult exp_nelson(const ExperimentConfig& cfg);
ExperimentResult exp_correlations(const ExperimentConfig& cfg);
ExperimentResult exp_counterterm(const ExperimentConfig& cfg);
ExperimentResult exp_limiting(const ExperimentConfig& cfg);
ExperimentResult exp_tgap(const ExperimentConfig& cfg);
ExperimentResult exp_fk_validate(const ExperimentConfig& cfg);
ExperimentResult exp_nonsolve(const ExperimentConfig& cfg);

}  // namespace phi4lab::detail
