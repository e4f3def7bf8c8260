#include "phi4lab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

#include "experiments_internal.hpp"
#include "phi4lab/bounds.hpp"
#include "phi4lab/bridge.hpp"
#include "phi4lab/l2_distance.hpp"

namespace phi4lab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace detail {

SpectralData configured_spectral(const ExperimentConfig& cfg) {
    const LatticeGrid grid = make_grid(cfg);
    const Vec U = eval_potential(cfg.potential, grid);
    const OperatorMatrix op = assemble_hamiltonian(grid, U, cfg.potential.kappa);

    json key;
    key["grid"] = config_to_json(cfg)["grid"];
    key["potential"] = config_to_json(cfg)["potential"];
    key["kappa"] = cfg.potential.kappa;
    key["spectral"] = config_to_json(cfg)["spectral"];
    const std::string dump = key.dump();
    const std::string tag = hex64(fnv1a64(dump.data(), dump.size()));
    const fs::path dir = fs::path(cfg.output_dir) / "cache";
    const fs::path evals = dir / ("spectral_" + tag + "_values.bin");
    const fs::path modes = dir / ("spectral_" + tag + "_modes.bin");

    if (fs::exists(evals) && fs::exists(modes)) {
        try {
            SpectralData sd;
            sd.grid = grid;
            sd.eigenvalues = read_array(evals).col(0);
            sd.modes = read_array(modes);
            sd.trace_exponent_s = cfg.spectral.s;
            sd.tol_eig = cfg.spectral.tol_eig;
            sd.trace_h_minus_s = sd.eigenvalues.array().pow(-cfg.spectral.s).sum();
            if (sd.count() == cfg.spectral.k_max && sd.modes.rows() == grid.sites()) return sd;
        } catch (const std::exception&) {
            // fall through and recompute
        }
    }
    SpectralData sd =
        spectral_decompose(op, cfg.spectral.k_max, cfg.spectral.tol_eig, cfg.spectral.s);
    write_array(evals, sd.eigenvalues);
    write_array(modes, sd.modes);
    return sd;
}

Mat stream_samples(long total, int chunk, int workers, int ncols,
                   const std::function<Mat(uint64_t stream, int count)>& fn) {
    const long n_chunks = (total + chunk - 1) / chunk;
    std::vector<Mat> blocks(static_cast<size_t>(n_chunks));
    std::atomic<long> next{0};
    auto worker = [&] {
        for (;;) {
            const long c = next.fetch_add(1);
            if (c >= n_chunks) break;
            const int count = static_cast<int>(std::min<long>(chunk, total - c * chunk));
            blocks[static_cast<size_t>(c)] = fn(static_cast<uint64_t>(c), count);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    Mat out(total, ncols);
    long row = 0;
    for (const Mat& b : blocks) {
        out.middleRows(row, b.rows()) = b;
        row += b.rows();
    }
    return out;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double mean_of(const Vec& v) { return v.mean(); }

double stderr_of(const Vec& v) {
    const double m = v.mean();
    const double var = (v.array() - m).square().sum() / (v.size() - 1);
    return std::sqrt(var / v.size());
}

bool within_sigma(double a, double ea, double b, double eb, double n_sigma, double* dist) {
    const double comb = std::sqrt(ea * ea + eb * eb);
    const double d = std::abs(a - b) / (comb > 0 ? comb : 1.0);
    if (dist) *dist = d;
    return d <= n_sigma;
}

json series_table(const std::vector<std::string>& columns,
                  const std::vector<std::vector<double>>& rows) {
    json t;
    t["columns"] = columns;
    t["rows"] = rows;
    return t;
}

}  // namespace detail

json RunManifest::to_json() const {
    json j;
    j["config_hash"] = config_hash;
    j["code_version"] = code_version;
    j["stamp"] = stamp;
    j["all_pass"] = all_pass;
    j["experiments"] = json::object();
    for (const ExperimentResult& e : experiments) {
        json je;
        je["pass"] = e.pass;
        je["metrics"] = e.metrics;
        je["series"] = e.series;
        j["experiments"][e.name] = je;
    }
    return j;
}

RunManifest run(const ExperimentConfig& config) {
    using namespace detail;
    RunManifest man;
    man.config_hash = config_hash(config);
    if (!config.stamp.empty()) {
        man.stamp = config.stamp;
    } else {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        man.stamp = buf;
    }

    using Runner = ExperimentResult (*)(const ExperimentConfig&);
    const std::vector<std::pair<std::string, Runner>> table = {
        {"spectrum", exp_spectrum},       {"green-bounds", exp_green_bounds},
        {"l2-scaling", exp_l2_scaling},   {"nelson", exp_nelson},
        {"correlations", exp_correlations}, {"counterterm", exp_counterterm},
        {"limiting", exp_limiting},       {"t-gap", exp_tgap},
        {"fk-validate", exp_fk_validate}, {"nonsolve-demo", exp_nonsolve},
    };

    for (const auto& [name, fn] : table) {
        if (config.experiment != "all" && config.experiment != name) continue;
        ExperimentResult res;
        try {
            res = fn(config);
        } catch (const std::exception& e) {
            res.name = name;
            res.pass = false;
            res.metrics["error"] = e.what();
        }
        man.all_pass = man.all_pass && res.pass;
        man.experiments.push_back(std::move(res));
    }

    fs::create_directories(config.output_dir);
    write_text(fs::path(config.output_dir) / "manifest.json", man.to_json().dump(2) + "\n");
    return man;
}

void emit_plot_data(const json& manifest, const std::string& which, const std::string& out_dir) {
    if (!manifest.contains("experiments") || !manifest["experiments"].contains(which))
        throw std::invalid_argument("emit_plot_data: manifest has no experiment '" + which + "'");
    const json& series = manifest["experiments"][which]["series"];
    for (auto it = series.begin(); it != series.end(); ++it) {
        const json& table = it.value();
        std::vector<std::string> cols;
        for (const auto& c : table["columns"]) cols.push_back(c.get<std::string>());
        CsvWriter csv(fs::path(out_dir) / (which + "_" + it.key() + ".csv"), cols);
        for (const auto& r : table["rows"]) csv.row(r.get<std::vector<double>>());
    }
}

}  // namespace phi4lab
