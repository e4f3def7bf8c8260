#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "phi4lab/potential.hpp"

namespace phi4lab {

struct GridConfig {
    double L = 8.0;
    int n = 64;
    Boundary boundary = Boundary::dirichlet;
};

struct SpectralConfig {
    int k_max = 600;
    double s = 1.5;
    double tol_eig = 1e-9;
};

struct McConfig {
    int batch_size = 100000;
    uint64_t seed = 20240901;
    int workers = 1;
    int chunk = 512;
};

struct SweepConfig {
    std::vector<double> epsilons;
    std::vector<double> nus;
    std::vector<double> Ns;
    std::vector<double> kappas;
};

struct ExperimentConfig {
    std::string experiment = "all";
    GridConfig grid;
    PotentialSpec potential;  // kappa lives here
    SpectralConfig spectral;
    McConfig mc;
    SweepConfig sweep;
    std::string output_dir = "out";
    std::string stamp;  // manifest timestamp; empty = now
};

extern const std::vector<std::string> kExperimentNames;

/// Parse and validate; schema violations raise std::invalid_argument naming
/// the offending key.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig config_from_file(const std::string& path);
nlohmann::ordered_json config_to_json(const ExperimentConfig& c);

/// FNV hash of the canonical dump; part of the determinism contract.
std::string config_hash(const ExperimentConfig& c);

LatticeGrid make_grid(const ExperimentConfig& c);

}  // namespace phi4lab
