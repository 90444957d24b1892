// Command-line front end: run experiments, check the mean-field ODE against
// simulation, and validate matrices or config files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ecb/analysis.hpp"
#include "ecb/csv.hpp"
#include "ecb/error.hpp"
#include "ecb/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ConfigFailure {
    std::string message;
};

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long long> horizon;
    std::optional<std::size_t> iterations;
    std::optional<double> delta;
    std::string policies;
    std::string out;
    std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--horizon", o.horizon, "Steps per replication (T)");
    cmd->add_option("--iterations", o.iterations, "Number of replications");
    cmd->add_option("--delta", o.delta, "Externality step size");
    cmd->add_option("--out", o.out, "Output CSV path");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

ecb::ExperimentConfig build_config(const CommonOptions& o)
{
    try {
        ecb::ExperimentConfig cfg = o.config_path.empty() ? ecb::ExperimentConfig{} : ecb::load_config(o.config_path);
        if (o.seed) cfg.seed = *o.seed;
        if (o.horizon) cfg.horizon = *o.horizon;
        if (o.iterations) cfg.iterations = *o.iterations;
        if (o.delta) cfg.delta = *o.delta;
        if (!o.out.empty()) cfg.output_path = o.out;
        if (o.threads) cfg.threads = *o.threads;
        if (!o.policies.empty()) {
            cfg.policies.clear();
            std::stringstream ss(o.policies);
            for (std::string item; std::getline(ss, item, ',');) {
                if (!item.empty()) cfg.policies.push_back(ecb::parse_policy_kind(item));
            }
        }
        cfg.validate();
        return cfg;
    } catch (const ecb::Error& e) {
        throw ConfigFailure{e.what()};
    }
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ecb::Error(ecb::ErrorCode::IoError, "cannot open " + path + " for writing");
    }
    return out;
}

int run_command(const CommonOptions& o, bool full_log)
{
    auto cfg = build_config(o);
    cfg.full_log = cfg.full_log || full_log;

    auto out = open_output(cfg.output_path);
    std::ofstream steps;
    ecb::RunSink sink;
    if (cfg.full_log) {
        steps = open_output(cfg.output_path + ".steps.csv");
        ecb::write_step_log_header(steps);
        sink = [&](const ecb::RunRecord& run) { ecb::write_step_log_rows(steps, run); };
    }

    ecb::ExperimentResult result;
    try {
        result = ecb::run_experiment(cfg, sink);
    } catch (...) {
        out.close();
        steps.close();
        std::error_code ignored;
        std::filesystem::remove(cfg.output_path, ignored);
        if (cfg.full_log) std::filesystem::remove(cfg.output_path + ".steps.csv", ignored);
        throw;
    }
    ecb::write_aggregate_csv(out, result);
    out.close();
    if (!out) {
        throw ecb::Error(ecb::ErrorCode::IoError, "failed writing " + cfg.output_path);
    }

    std::printf("%-14s %14s %14s %14s\n", "policy", "reward(T)", "regret(T)", "d1(T)");
    for (const auto& p : result.policies) {
        char regret[32] = "-";
        if (!p.regret.empty()) std::snprintf(regret, sizeof(regret), "%.4f", p.regret.back());
        std::printf("%-14s %14.4f %14s %14.6f\n", std::string(ecb::label(p.kind)).c_str(), p.mean_reward.back(),
                    regret, p.mean_d1.back());
    }
    std::printf("wrote %s\n", cfg.output_path.c_str());
    return kExitOk;
}

int odecheck_command(const CommonOptions& o, const std::string& pull, std::optional<double> d1,
                     std::size_t default_runs, int substeps)
{
    auto cfg = build_config(o);
    if (!cfg.matrix || cfg.matrix->contexts() != 2 || cfg.matrix->arms() != 2) {
        throw ConfigFailure{"odecheck needs an explicit 2x2 matrix"};
    }
    ecb::MeanFieldSettings settings;
    settings.delta = cfg.delta;
    settings.horizon = cfg.horizon;
    settings.runs = o.iterations ? *o.iterations : default_runs;
    settings.seed = cfg.seed;
    settings.threads = cfg.threads;
    settings.ode_substeps = substeps;
    settings.d1_0 = d1 ? *d1 : (cfg.initial_distribution ? (*cfg.initial_distribution)[0] : 0.5);
    if (!(settings.d1_0 >= 0.0 && settings.d1_0 <= 1.0)) {
        throw ConfigFailure{"--d1 must be in [0,1]"};
    }

    std::optional<ecb::PullProbabilities> p;
    try {
        if (pull == "uniform") {
            p = ecb::PullProbabilities::uniform();
        } else {
            p = ecb::PullProbabilities::of_policy(ecb::parse_policy_kind(pull), *cfg.matrix);
        }
    } catch (const ecb::Error& e) {
        throw ConfigFailure{e.what()};
    }

    const auto report = ecb::mean_field_comparison(*p, *cfg.matrix, settings);
    const std::string path = o.out.empty() ? "odecheck.csv" : o.out;
    auto out = open_output(path);
    const ecb::NamedSeries series[] = {{"sim:d1", report.simulated}, {"ode:d1", report.ode}};
    ecb::write_series_csv(out, series);

    std::printf("runs=%zu horizon=%lld d1(1)=%.6f\n", settings.runs, settings.horizon, settings.d1_0);
    std::printf("final  sim=%.6f ode=%.6f\n", report.simulated.back(), report.ode.back());
    std::printf("sup-norm gap %.6g\n", report.sup_gap);
    std::printf("wrote %s\n", path.c_str());
    return kExitOk;
}

std::vector<std::vector<double>> parse_matrix_text(const std::string& text)
{
    std::vector<std::vector<double>> rows;
    std::stringstream rows_in(text);
    for (std::string row; std::getline(rows_in, row, ';');) {
        std::vector<double> values;
        std::stringstream cells(row);
        for (std::string cell; std::getline(cells, cell, ',');) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw ConfigFailure{"cannot parse matrix entry '" + cell + "'"};
            }
        }
        rows.push_back(std::move(values));
    }
    return rows;
}

int validate_command(const std::string& config_path, const std::string& matrix_text)
{
    if (config_path.empty() && matrix_text.empty()) {
        throw ConfigFailure{"validate needs --config and/or --matrix"};
    }
    try {
        if (!matrix_text.empty()) {
            const auto M = ecb::RewardMatrix::validate(parse_matrix_text(matrix_text));
            std::printf("matrix ok (%zux%zu)\n", M.contexts(), M.arms());
        }
        if (!config_path.empty()) {
            const auto cfg = ecb::load_config(config_path);
            std::printf("config ok (n=%zu m=%zu T=%lld iterations=%zu policies=%zu)\n", cfg.contexts, cfg.arms,
                        cfg.horizon, cfg.iterations, cfg.policies.size());
        }
    } catch (const ecb::Error& e) {
        throw ConfigFailure{e.what()};
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Contextual bandits with decaying positive externalities"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    bool full_log = false;
    auto* run = app.add_subcommand("run", "Run an experiment and write aggregate CSV");
    add_common(run, run_opts);
    run->add_option("--policies", run_opts.policies, "Comma-separated policy list");
    run->add_flag("--full-log", full_log, "Also write a per-step log to <out>.steps.csv");

    CommonOptions ode_opts;
    std::string pull = "GreedyOracle";
    std::optional<double> d1;
    int substeps = 1;
    auto* ode = app.add_subcommand("odecheck", "Compare simulated mean d1(t) with the mean-field ODE");
    add_common(ode, ode_opts);
    ode->add_option("--pull", pull, "Pull pattern: Oracle, GreedyOracle or uniform");
    ode->add_option("--d1", d1, "Initial d1 (default: from config, else 0.5)");
    ode->add_option("--substeps", substeps, "RK4 steps per unit time")->check(CLI::PositiveNumber);

    std::string validate_config;
    std::string validate_matrix;
    auto* validate = app.add_subcommand("validate", "Check a reward matrix and/or config file");
    validate->add_option("--config", validate_config, "JSON config file");
    validate->add_option("--matrix", validate_matrix, "Matrix as rows separated by ';', e.g. 0.8,0.4;0.2,0.7");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return run_command(run_opts, full_log);
        if (*ode) return odecheck_command(ode_opts, pull, d1, 2000, substeps);
        if (*validate) return validate_command(validate_config, validate_matrix);
    } catch (const ConfigFailure& e) {
        std::fprintf(stderr, "config error: %s\n", e.message.c_str());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitOk;
}
