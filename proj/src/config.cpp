#include "phi4lab/config.hpp"

#include <fstream>

#include "phi4lab/io.hpp"

namespace phi4lab {

using json = nlohmann::json;

const std::vector<std::string> kExperimentNames = {
    "spectrum",  "green-bounds", "l2-scaling", "nelson",      "correlations", "counterterm",
    "limiting",  "t-gap",        "fk-validate", "nonsolve-demo", "all"};

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config: key '" + key + "' " + why);
}

template <typename T>
T take(const json& j, const std::string& key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        bad_key(key, "has the wrong type");
    }
}

void check_known(const json& j, const std::string& scope,
                 const std::vector<std::string>& known) {
    if (!j.is_object()) bad_key(scope, "must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& k : known) ok |= it.key() == k;
        if (!ok) bad_key(scope.empty() ? it.key() : scope + "." + it.key(), "is not recognized");
    }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    check_known(j, "", {"experiment", "grid", "potential", "kappa", "spectral", "mc", "sweep",
                        "output_dir", "stamp"});
    ExperimentConfig c;
    c.experiment = take<std::string>(j, "experiment", c.experiment);
    bool known_exp = false;
    for (const auto& name : kExperimentNames) known_exp |= name == c.experiment;
    if (!known_exp) bad_key("experiment", "must be one of the documented experiment names");

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_known(g, "grid", {"L", "n", "boundary"});
        c.grid.L = take<double>(g, "L", c.grid.L);
        c.grid.n = take<int>(g, "n", c.grid.n);
        const std::string b = take<std::string>(g, "boundary", "dirichlet");
        if (b == "dirichlet")
            c.grid.boundary = Boundary::dirichlet;
        else if (b == "periodic")
            c.grid.boundary = Boundary::periodic;
        else
            bad_key("grid.boundary", "must be 'dirichlet' or 'periodic'");
        if (c.grid.L <= 0) bad_key("grid.L", "must be positive");
        if (c.grid.n < 8) bad_key("grid.n", "must be at least 8");
    }
    if (j.contains("potential")) {
        const json& p = j.at("potential");
        check_known(p, "potential", {"kind", "theta", "C", "gamma"});
        const std::string kind = take<std::string>(p, "kind", "power");
        if (kind == "power")
            c.potential.kind = PotentialKind::power;
        else if (kind == "step")
            c.potential.kind = PotentialKind::step;
        else if (kind == "rapid")
            c.potential.kind = PotentialKind::rapid;
        else
            bad_key("potential.kind", "must be 'power', 'step' or 'rapid'");
        c.potential.theta = take<double>(p, "theta", c.potential.theta);
        c.potential.rapid_exponent = take<double>(p, "C", c.potential.rapid_exponent);
        c.potential.gamma = take<double>(p, "gamma", c.potential.gamma);
        if (c.potential.theta <= 0) bad_key("potential.theta", "must be positive");
        if (c.potential.gamma <= 0 || c.potential.gamma >= 1)
            bad_key("potential.gamma", "must lie in (0,1)");
    }
    c.potential.kappa = take<double>(j, "kappa", c.potential.kappa);
    if (c.potential.kappa <= 0) bad_key("kappa", "must be positive");

    if (j.contains("spectral")) {
        const json& s = j.at("spectral");
        check_known(s, "spectral", {"k_max", "s", "tol_eig"});
        c.spectral.k_max = take<int>(s, "k_max", c.spectral.k_max);
        c.spectral.s = take<double>(s, "s", c.spectral.s);
        c.spectral.tol_eig = take<double>(s, "tol_eig", c.spectral.tol_eig);
        if (c.spectral.k_max < 1) bad_key("spectral.k_max", "must be positive");
        if (c.spectral.s <= 1.0 || c.spectral.s >= 2.0) bad_key("spectral.s", "must lie in (1,2)");
        if (c.spectral.tol_eig <= 0) bad_key("spectral.tol_eig", "must be positive");
    }
    if (j.contains("mc")) {
        const json& m = j.at("mc");
        check_known(m, "mc", {"batch_size", "seed", "workers", "chunk"});
        c.mc.batch_size = take<int>(m, "batch_size", c.mc.batch_size);
        c.mc.seed = take<uint64_t>(m, "seed", c.mc.seed);
        c.mc.workers = take<int>(m, "workers", c.mc.workers);
        c.mc.chunk = take<int>(m, "chunk", c.mc.chunk);
        if (c.mc.batch_size < 1) bad_key("mc.batch_size", "must be positive");
        if (c.mc.workers < 1) bad_key("mc.workers", "must be positive");
        if (c.mc.chunk < 1) bad_key("mc.chunk", "must be positive");
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        check_known(s, "sweep", {"epsilons", "nus", "Ns", "kappas"});
        c.sweep.epsilons = take<std::vector<double>>(s, "epsilons", {});
        c.sweep.nus = take<std::vector<double>>(s, "nus", {});
        c.sweep.Ns = take<std::vector<double>>(s, "Ns", {});
        c.sweep.kappas = take<std::vector<double>>(s, "kappas", {});
    }
    c.output_dir = take<std::string>(j, "output_dir", c.output_dir);
    c.stamp = take<std::string>(j, "stamp", c.stamp);
    return c;
}

ExperimentConfig config_from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["experiment"] = c.experiment;
    j["grid"] = {{"L", c.grid.L},
                 {"n", c.grid.n},
                 {"boundary", c.grid.boundary == Boundary::dirichlet ? "dirichlet" : "periodic"}};
    const char* kind = c.potential.kind == PotentialKind::power  ? "power"
                       : c.potential.kind == PotentialKind::step ? "step"
                                                                 : "rapid";
    j["potential"] = {{"kind", kind},
                      {"theta", c.potential.theta},
                      {"C", c.potential.rapid_exponent},
                      {"gamma", c.potential.gamma}};
    j["kappa"] = c.potential.kappa;
    j["spectral"] = {{"k_max", c.spectral.k_max}, {"s", c.spectral.s},
                     {"tol_eig", c.spectral.tol_eig}};
    j["mc"] = {{"batch_size", c.mc.batch_size},
               {"seed", c.mc.seed},
               {"workers", c.mc.workers},
               {"chunk", c.mc.chunk}};
    j["sweep"] = {{"epsilons", c.sweep.epsilons},
                  {"nus", c.sweep.nus},
                  {"Ns", c.sweep.Ns},
                  {"kappas", c.sweep.kappas}};
    j["output_dir"] = c.output_dir;
    j["stamp"] = c.stamp;
    return j;
}

std::string config_hash(const ExperimentConfig& c) {
    nlohmann::ordered_json j = config_to_json(c);
    j.erase("output_dir");  // location does not change the computation
    j.erase("stamp");
    j["mc"].erase("workers");  // chunk-ordered reduction: workers cannot either
    const std::string dump = j.dump();
    return hex64(fnv1a64(dump.data(), dump.size()));
}

LatticeGrid make_grid(const ExperimentConfig& c) {
    return build_grid(c.grid.L, c.grid.n, c.grid.boundary);
}

}  // namespace phi4lab
