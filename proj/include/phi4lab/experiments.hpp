#pragma once

#include <nlohmann/json.hpp>

#include "phi4lab/config.hpp"

namespace phi4lab {

inline constexpr const char* kCodeVersion = "phi4lab 1.0.0";

struct ExperimentResult {
    std::string name;
    bool pass = false;
    nlohmann::ordered_json metrics;
    nlohmann::ordered_json series;  // small plot-ready tables
};

struct RunManifest {
    std::string config_hash;
    std::string code_version = kCodeVersion;
    std::string stamp;
    bool all_pass = true;
    std::vector<ExperimentResult> experiments;

    nlohmann::ordered_json to_json() const;
};

/// Execute the configured experiment (or all of them), write artifacts under
/// config.output_dir, and return the manifest (also written as
/// manifest.json).
RunManifest run(const ExperimentConfig& config);

/// Re-emit the stored plot series of one experiment as long-format CSV files
/// under out_dir. Throws if the manifest lacks the experiment.
void emit_plot_data(const nlohmann::ordered_json& manifest, const std::string& which,
                    const std::string& out_dir);

}  // namespace phi4lab
