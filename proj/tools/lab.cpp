#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <iostream>

#include "phi4lab/experiments.hpp"
#include "phi4lab/io.hpp"

using namespace phi4lab;

int main(int argc, char** argv) {
    CLI::App app{"phi4lab: lattice laboratory for the trapped complex phi^4 gas"};
    app.require_subcommand(1);

    std::string config_path, experiment, seed_str, out_dir, stamp;
    int workers = -1;

    CLI::App* run_cmd = app.add_subcommand("run", "run experiments from a JSON config");
    run_cmd->add_option("--config", config_path, "JSON config file");
    run_cmd->add_option("--experiment", experiment, "override the configured experiment");
    run_cmd->add_option("--seed", seed_str, "override mc.seed");
    run_cmd->add_option("--workers", workers, "override mc.workers");
    run_cmd->add_option("--out", out_dir, "override output_dir");
    run_cmd->add_option("--stamp", stamp, "fixed manifest timestamp (determinism runs)");

    std::string manifest_path, which, plot_out = ".";
    CLI::App* plot_cmd = app.add_subcommand("plot", "emit plot CSVs from a manifest");
    plot_cmd->add_option("--manifest", manifest_path, "manifest.json from a run")->required();
    plot_cmd->add_option("--which", which, "experiment name")->required();
    plot_cmd->add_option("--out", plot_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            ExperimentConfig cfg = config_path.empty()
                                       ? ExperimentConfig{}
                                       : config_from_file(config_path);
            if (!experiment.empty()) {
                cfg.experiment = experiment;
                bool known = false;
                for (const auto& n : kExperimentNames) known |= n == experiment;
                if (!known) throw std::invalid_argument("unknown experiment: " + experiment);
            }
            if (!seed_str.empty()) cfg.mc.seed = std::stoull(seed_str);
            if (workers > 0) cfg.mc.workers = workers;
            if (const char* env = std::getenv("LAB_WORKERS"); env && workers <= 0)
                cfg.mc.workers = std::max(1, std::atoi(env));
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            if (!stamp.empty()) cfg.stamp = stamp;

            const RunManifest man = run(cfg);
            for (const ExperimentResult& e : man.experiments)
                std::cout << (e.pass ? "[PASS] " : "[FAIL] ") << e.name << "\n";
            std::cout << "manifest: " << cfg.output_dir << "/manifest.json\n";
            return man.all_pass ? 0 : 1;
        }
        if (*plot_cmd) {
            const nlohmann::ordered_json man =
                nlohmann::ordered_json::parse(read_text(manifest_path));
            emit_plot_data(man, which, plot_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
