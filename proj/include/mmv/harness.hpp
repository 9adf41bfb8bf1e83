#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mmv/doa.hpp"
#include "mmv/matrix_io.hpp"
#include "mmv/music.hpp"
#include "mmv/rng.hpp"
#include "mmv/solver.hpp"

namespace mmv {

enum class Method { Sniht, HubSniht, Music };

inline std::string_view method_name(Method m) {
    switch (m) {
        case Method::Sniht: return "SNIHT";
        case Method::HubSniht: return "HUB-SNIHT";
        case Method::Music: return "MUSIC";
    }
    return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
    if (name == "SNIHT") return Method::Sniht;
    if (name == "HUB-SNIHT") return Method::HubSniht;
    if (name == "MUSIC") return Method::Music;
    return std::nullopt;
}

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& message) : std::runtime_error(message) {}
};

// Full description of one Monte Carlo experiment.  Defaults reproduce the
// 20-sensor, 2-degree grid used throughout the source-localization study.
struct ExperimentConfig {
    std::size_t sensors = 20;
    double grid_min_deg = -90.0;
    double grid_step_deg = 2.0;
    double grid_max_deg = 90.0;
    std::vector<double> true_doas_deg;  // required
    std::size_t snapshots = 0;          // required (config key "q")
    double snr_db = 0.0;                // required
    NoiseModel noise;
    std::vector<Method> methods = {Method::Sniht, Method::HubSniht, Method::Music};
    std::size_t trials = 1000;
    std::uint64_t master_seed = 1;
    double q_quantile = 0.8;
    std::size_t max_iter = 500;
    double rel_tol = 1e-6;

    SteeringGrid grid() const {
        try {
            return SteeringGrid::uniform(sensors, grid_min_deg, grid_step_deg, grid_max_deg);
        } catch (const std::invalid_argument& err) {
            throw ConfigError(std::string("grid: ") + err.what());
        }
    }

    Scenario scenario() const {
        const SteeringGrid g = grid();
        std::vector<std::size_t> idx;
        for (double angle : true_doas_deg) {
            const auto found = g.index_of(angle);
            if (!found)
                throw ConfigError("true_doas: " + format_double(angle) + " is not on the grid");
            idx.push_back(*found);
        }
        try {
            Scenario s{g, SupportSet(std::move(idx)), snapshots, snr_db, noise};
            s.validate();
            return s;
        } catch (const std::invalid_argument& err) {
            throw ConfigError(std::string("scenario: ") + err.what());
        }
    }

    void validate() const {
        if (sensors == 0) throw ConfigError("n: sensor count must be positive");
        if (trials == 0) throw ConfigError("trials: must be at least 1");
        if (snapshots == 0) throw ConfigError("q: snapshot count must be positive");
        if (true_doas_deg.empty()) throw ConfigError("true_doas: must not be empty");
        if (!(q_quantile > 0.0) || !(q_quantile < 1.0))
            throw ConfigError("solver.q_quantile: must lie in (0, 1)");
        if (max_iter == 0) throw ConfigError("solver.max_iter: must be at least 1");
        if (!(rel_tol > 0.0)) throw ConfigError("solver.rel_tol: must be positive");
        if (noise.variance < 0.0) throw ConfigError("noise.variance: must be nonnegative");
        if (noise.kind == NoiseKind::InverseGaussianCompound && !(noise.lambda > 0.0))
            throw ConfigError("noise.lambda: must be positive");
        const Scenario s = scenario();  // grid and DOA checks
        for (Method m : methods)
            if (m == Method::Music && s.true_doa_indices.size() >= sensors)
                throw ConfigError("methods: MUSIC requires fewer sources than sensors");
    }
};

namespace detail {

template <typename T>
T json_field(const nlohmann::json& j, const std::string& name, const T& fallback) {
    if (!j.contains(name)) return fallback;
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(name + ": wrong type");
    }
}

inline void reject_unknown_keys(const nlohmann::json& j, const std::string& where,
                                std::initializer_list<std::string_view> known) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (std::string_view k : known)
            if (item.key() == k) ok = true;
        if (!ok) throw ConfigError(where + item.key() + ": unknown field");
    }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    using detail::json_field;
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    detail::reject_unknown_keys(j, "", {"n", "grid", "true_doas", "q", "snr_db", "noise",
                                        "methods", "trials", "master_seed", "solver"});

    ExperimentConfig cfg;
    cfg.sensors = json_field<std::size_t>(j, "n", cfg.sensors);
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        detail::reject_unknown_keys(g, "grid.", {"min", "step", "max"});
        cfg.grid_min_deg = json_field<double>(g, "min", cfg.grid_min_deg);
        cfg.grid_step_deg = json_field<double>(g, "step", cfg.grid_step_deg);
        cfg.grid_max_deg = json_field<double>(g, "max", cfg.grid_max_deg);
    }
    if (!j.contains("true_doas")) throw ConfigError("true_doas: required field missing");
    cfg.true_doas_deg = json_field<std::vector<double>>(j, "true_doas", {});
    if (!j.contains("q")) throw ConfigError("q: required field missing");
    cfg.snapshots = json_field<std::size_t>(j, "q", 0);
    if (!j.contains("snr_db")) throw ConfigError("snr_db: required field missing");
    cfg.snr_db = json_field<double>(j, "snr_db", 0.0);

    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        detail::reject_unknown_keys(n, "noise.", {"kind", "lambda", "variance"});
        const std::string kind = json_field<std::string>(n, "kind", "igcg");
        if (kind == "igcg") cfg.noise.kind = NoiseKind::InverseGaussianCompound;
        else if (kind == "gaussian") cfg.noise.kind = NoiseKind::ComplexGaussian;
        else throw ConfigError("noise.kind: expected 'igcg' or 'gaussian', got '" + kind + "'");
        cfg.noise.lambda = json_field<double>(n, "lambda", cfg.noise.lambda);
        cfg.noise.variance = json_field<double>(n, "variance", cfg.noise.variance);
    }

    if (j.contains("methods")) {
        const auto names = json_field<std::vector<std::string>>(j, "methods", {});
        cfg.methods.clear();
        for (const std::string& name : names) {
            const auto m = parse_method(name);
            if (!m)
                throw ConfigError("methods: unknown method '" + name +
                                  "' (expected SNIHT, HUB-SNIHT or MUSIC)");
            cfg.methods.push_back(*m);
        }
    }

    cfg.trials = json_field<std::size_t>(j, "trials", cfg.trials);
    cfg.master_seed = json_field<std::uint64_t>(j, "master_seed", cfg.master_seed);

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        detail::reject_unknown_keys(s, "solver.", {"q_quantile", "max_iter", "rel_tol"});
        cfg.q_quantile = json_field<double>(s, "q_quantile", cfg.q_quantile);
        cfg.max_iter = json_field<std::size_t>(s, "max_iter", cfg.max_iter);
        cfg.rel_tol = json_field<double>(s, "rel_tol", cfg.rel_tol);
    }

    cfg.validate();
    return cfg;
}

inline ExperimentConfig parse_config(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& err) {
        throw ConfigError(std::string("config: ") + err.what());
    }
    return config_from_json(j);
}

inline ExperimentConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json methods = nlohmann::json::array();
    for (Method m : cfg.methods) methods.push_back(std::string(method_name(m)));
    return nlohmann::json{
        {"n", cfg.sensors},
        {"grid", {{"min", cfg.grid_min_deg}, {"step", cfg.grid_step_deg}, {"max", cfg.grid_max_deg}}},
        {"true_doas", cfg.true_doas_deg},
        {"q", cfg.snapshots},
        {"snr_db", cfg.snr_db},
        {"noise",
         {{"kind", cfg.noise.kind == NoiseKind::ComplexGaussian ? "gaussian" : "igcg"},
          {"lambda", cfg.noise.lambda},
          {"variance", cfg.noise.variance}}},
        {"methods", methods},
        {"trials", cfg.trials},
        {"master_seed", cfg.master_seed},
        {"solver",
         {{"q_quantile", cfg.q_quantile}, {"max_iter", cfg.max_iter}, {"rel_tol", cfg.rel_tol}}}};
}

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<double> grid_angles_deg;
    std::vector<Method> methods;
    std::size_t trials = 0;
    std::vector<std::size_t> exact_counts;            // per method
    std::vector<std::size_t> warning_counts;          // per method
    std::vector<std::vector<double>> histograms;      // per method, relative frequency
    double wall_time_sec = 0.0;

    double per(std::size_t method_index) const {
        return trials == 0 ? 0.0
                           : static_cast<double>(exact_counts[method_index]) /
                                 static_cast<double>(trials);
    }
};

namespace detail {

struct TrialRecord {
    // One support estimate per method, in config order; empty plus warning
    // flag when the solver failed numerically.
    std::vector<std::vector<std::size_t>> estimates;
    std::vector<char> warnings;
};

inline TrialRecord run_trial(const Scenario& scenario, const ComplexMatrix& a,
                             const ExperimentConfig& cfg, std::uint64_t trial) {
    RandomStream rng = RandomStream::for_trial(cfg.master_seed, trial);
    const auto [y, s_true] = simulate_snapshots(scenario, rng);
    const std::size_t k = scenario.true_doa_indices.size();

    SolverConfig solver;
    solver.sparsity = k;
    solver.q_quantile = cfg.q_quantile;
    solver.max_iter = cfg.max_iter;
    solver.rel_tol = cfg.rel_tol;
    solver.init_support_mode = InitSupportMode::Peaks;  // gridded dictionary

    TrialRecord rec;
    rec.estimates.resize(cfg.methods.size());
    rec.warnings.assign(cfg.methods.size(), 0);
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        try {
            switch (cfg.methods[m]) {
                case Method::Sniht:
                    rec.estimates[m] = sniht(y, a, solver).support.indices();
                    break;
                case Method::HubSniht:
                    rec.estimates[m] = hub_sniht(y, a, solver).support.indices();
                    break;
                case Method::Music:
                    rec.estimates[m] = music_estimate(y, scenario.grid, k).indices();
                    break;
            }
        } catch (const NumericFailure&) {
            rec.estimates[m].clear();
            rec.warnings[m] = 1;
        }
    }
    return rec;
}

}  // namespace detail

// Runs `trials` independent draws; every method sees the same Y within a
// trial.  Trial t uses the stream derived from (master_seed, t), so results
// do not depend on the thread count, only on the config.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads = 1) {
    cfg.validate();
    const Scenario scenario = cfg.scenario();
    const ComplexMatrix a = steering_matrix(scenario.grid);
    const std::size_t p = scenario.grid.size();
    const auto t_start = std::chrono::steady_clock::now();

    std::vector<detail::TrialRecord> records(cfg.trials);
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(threads, cfg.trials));
    if (workers == 1) {
        for (std::size_t t = 0; t < cfg.trials; ++t)
            records[t] = detail::run_trial(scenario, a, cfg, t);
    } else {
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            while (true) {
                const std::size_t t = next.fetch_add(1);
                if (t >= cfg.trials) break;
                records[t] = detail::run_trial(scenario, a, cfg, t);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }

    ExperimentResult out;
    out.config = cfg;
    out.grid_angles_deg = scenario.grid.angles_deg;
    out.methods = cfg.methods;
    out.trials = cfg.trials;
    out.exact_counts.assign(cfg.methods.size(), 0);
    out.warning_counts.assign(cfg.methods.size(), 0);
    out.histograms.assign(cfg.methods.size(), std::vector<double>(p, 0.0));

    std::vector<std::vector<std::size_t>> angle_counts(cfg.methods.size(),
                                                       std::vector<std::size_t>(p, 0));
    const std::vector<std::size_t>& truth = scenario.true_doa_indices.indices();
    for (const detail::TrialRecord& rec : records) {
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            if (rec.warnings[m]) {
                ++out.warning_counts[m];
                continue;
            }
            if (rec.estimates[m] == truth) ++out.exact_counts[m];
            for (std::size_t idx : rec.estimates[m]) ++angle_counts[m][idx];
        }
    }
    for (std::size_t m = 0; m < cfg.methods.size(); ++m)
        for (std::size_t g = 0; g < p; ++g)
            out.histograms[m][g] =
                static_cast<double>(angle_counts[m][g]) / static_cast<double>(cfg.trials);

    out.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

inline nlohmann::json result_to_json(const ExperimentResult& result) {
    nlohmann::json per = nlohmann::json::object();
    nlohmann::json warnings = nlohmann::json::object();
    nlohmann::json histograms = nlohmann::json::object();
    for (std::size_t m = 0; m < result.methods.size(); ++m) {
        const std::string name(method_name(result.methods[m]));
        per[name] = result.per(m);
        warnings[name] = result.warning_counts[m];
        histograms[name] = result.histograms[m];
    }
    return nlohmann::json{{"config", config_to_json(result.config)},
                          {"trials", result.trials},
                          {"grid_angles_deg", result.grid_angles_deg},
                          {"per", per},
                          {"warnings", warnings},
                          {"histograms", histograms},
                          {"wall_time_sec", result.wall_time_sec}};
}

// Emits <prefix>per.csv, <prefix>histogram.csv and <prefix>result.json.
inline void write_outputs(const ExperimentResult& result, const std::string& prefix) {
    const auto open = [](const std::string& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open '" + path + "' for writing");
        return out;
    };

    {
        std::ofstream out = open(prefix + "per.csv");
        out << "method,per,trials,warnings\n";
        for (std::size_t m = 0; m < result.methods.size(); ++m)
            out << method_name(result.methods[m]) << ',' << format_double(result.per(m)) << ','
                << result.trials << ',' << result.warning_counts[m] << "\n";
        if (!out) throw IoError("write to '" + prefix + "per.csv' failed");
    }
    {
        std::ofstream out = open(prefix + "histogram.csv");
        out << "angle_deg";
        for (Method m : result.methods) out << ',' << method_name(m);
        out << "\n";
        for (std::size_t g = 0; g < result.grid_angles_deg.size(); ++g) {
            out << format_double(result.grid_angles_deg[g]);
            for (std::size_t m = 0; m < result.methods.size(); ++m)
                out << ',' << format_double(result.histograms[m][g]);
            out << "\n";
        }
        if (!out) throw IoError("write to '" + prefix + "histogram.csv' failed");
    }
    {
        std::ofstream out = open(prefix + "result.json");
        out << result_to_json(result).dump(2) << "\n";
        if (!out) throw IoError("write to '" + prefix + "result.json' failed");
    }
}

}  // namespace mmv
