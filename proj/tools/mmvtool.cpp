#include <cstdio>
#include <exception>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmv/harness.hpp"
#include "mmv/matrix_io.hpp"
#include "mmv/solver.hpp"

namespace {

int run_recover(const std::string& y_path, const std::string& a_path, std::size_t k,
                const std::string& method, double q_quantile, std::size_t max_iter, double tol,
                const std::string& out_path) {
    mmv::ComplexMatrix y;
    mmv::ComplexMatrix a;
    try {
        y = mmv::load_complex_csv(y_path);
        a = mmv::load_complex_csv(a_path);
    } catch (const mmv::ParseError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    } catch (const std::runtime_error& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    }

    mmv::SolverConfig config;
    config.sparsity = k;
    config.q_quantile = q_quantile;
    config.max_iter = max_iter;
    config.rel_tol = tol;

    mmv::RecoveryResult result;
    try {
        result = method == "hub" ? mmv::hub_sniht(y, a, config) : mmv::sniht(y, a, config);
    } catch (const std::invalid_argument& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    } catch (const mmv::NumericFailure& err) {
        std::fprintf(stderr, "error: numeric failure at iteration %zu: %s\n", err.iteration(),
                     err.what());
        return 1;
    }

    nlohmann::json s_rows = nlohmann::json::array();
    for (std::size_t i = 0; i < result.S_hat.rows(); ++i) {
        std::string row;
        for (std::size_t j = 0; j < result.S_hat.cols(); ++j) {
            if (j > 0) row += ',';
            row += mmv::format_complex(result.S_hat(i, j));
        }
        s_rows.push_back(row);
    }
    const nlohmann::json out{{"method", method},
                             {"k", k},
                             {"support", result.support.indices()},
                             {"sigma_hat", result.sigma_hat},
                             {"iterations", result.iterations},
                             {"converged", result.converged},
                             {"S_hat", s_rows}};

    std::ofstream file(out_path);
    if (!file) {
        std::fprintf(stderr, "error: cannot open '%s' for writing\n", out_path.c_str());
        return 2;
    }
    file << out.dump(2) << "\n";
    if (!file) {
        std::fprintf(stderr, "error: write to '%s' failed\n", out_path.c_str());
        return 2;
    }

    std::string support_str;
    for (std::size_t idx : result.support) {
        if (!support_str.empty()) support_str += ' ';
        support_str += std::to_string(idx);
    }
    std::printf("support: {%s}  sigma_hat: %s  iterations: %zu  converged: %s\n",
                support_str.c_str(), mmv::format_double(result.sigma_hat).c_str(),
                result.iterations, result.converged ? "true" : "false");
    return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_prefix, long long trials,
                 long long seed, unsigned threads) {
    std::ifstream in(config_path);
    if (!in) {
        std::fprintf(stderr, "error: cannot open '%s' for reading\n", config_path.c_str());
        return 2;
    }

    mmv::ExperimentConfig config;
    try {
        config = mmv::parse_config(in);
        if (trials >= 0) config.trials = static_cast<std::size_t>(trials);
        if (seed >= 0) config.master_seed = static_cast<std::uint64_t>(seed);
        config.validate();
    } catch (const mmv::ConfigError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }

    const mmv::ExperimentResult result = mmv::run_experiment(config, threads);
    try {
        mmv::write_outputs(result, out_prefix);
    } catch (const mmv::IoError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    }

    for (std::size_t m = 0; m < result.methods.size(); ++m)
        std::printf("%-10s PER %s  (%zu trials, %zu warnings)\n",
                    std::string(mmv::method_name(result.methods[m])).c_str(),
                    mmv::format_double(result.per(m)).c_str(), result.trials,
                    result.warning_counts[m]);
    std::printf("wall time: %.2fs  outputs: %sper.csv %shistogram.csv %sresult.json\n",
                result.wall_time_sec, out_prefix.c_str(), out_prefix.c_str(), out_prefix.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust multichannel sparse recovery (SNIHT / HUB-SNIHT / MUSIC)"};
    app.require_subcommand(1);

    std::string y_path;
    std::string a_path;
    std::size_t k = 1;
    std::string method = "hub";
    double q_quantile = 0.8;
    std::size_t max_iter = 500;
    double tol = 1e-6;
    std::string recover_out;

    CLI::App* recover = app.add_subcommand("recover", "Recover a row-sparse signal from Y = AS + E");
    recover->add_option("--y", y_path, "Measurement matrix CSV")->required();
    recover->add_option("--a", a_path, "Dictionary matrix CSV")->required();
    recover->add_option("--k", k, "Row sparsity")->required();
    recover->add_option("--method", method, "sniht or hub")
        ->check(CLI::IsMember({"sniht", "hub"}));
    recover->add_option("--q", q_quantile, "Huber quantile (hub method)");
    recover->add_option("--max-iter", max_iter, "Iteration cap");
    recover->add_option("--tol", tol, "Relative stopping tolerance");
    recover->add_option("--out", recover_out, "Output JSON path")->required();

    std::string config_path;
    std::string out_prefix;
    long long trials = -1;
    long long seed = -1;
    unsigned threads = 1;

    CLI::App* simulate = app.add_subcommand("simulate", "Run a Monte Carlo DOA experiment");
    simulate->add_option("--config", config_path, "Experiment config JSON")->required();
    simulate->add_option("--out", out_prefix, "Output path prefix")->required();
    simulate->add_option("--trials", trials, "Override the trial count");
    simulate->add_option("--seed", seed, "Override the master seed");
    simulate->add_option("--threads", threads, "Worker thread count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (recover->parsed())
            return run_recover(y_path, a_path, k, method, q_quantile, max_iter, tol, recover_out);
        return run_simulate(config_path, out_prefix, trials, seed, threads);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
}
