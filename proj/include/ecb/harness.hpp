#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ecb/environment.hpp"
#include "ecb/metrics.hpp"
#include "ecb/policies.hpp"
#include "ecb/random.hpp"

namespace ecb {

/// Full parameterisation of an experiment. Defaults reproduce the
/// two-context setup: T = 5000, 500 replications, delta = 0.01,
/// M = [[0.8,0.4],[0.2,0.7]], d(1) = [0.5,0.5], all five policies.
struct ExperimentConfig {
    std::size_t contexts = 2;
    std::size_t arms = 2;
    long long horizon = 5000;
    std::size_t iterations = 500;
    double delta = 0.01;
    /// nullopt draws a fresh d(1) per replication.
    std::optional<PopulationDistribution> initial_distribution = PopulationDistribution({0.5, 0.5});
    /// nullopt draws random matrices.
    std::optional<RewardMatrix> matrix = RewardMatrix::validate({{0.8, 0.4}, {0.2, 0.7}});
    /// Replications sharing one random matrix; 0 keeps one matrix for the whole run.
    std::size_t matrix_refresh_every = 0;
    std::vector<PolicyKind> policies{std::begin(kAllPolicies), std::end(kAllPolicies)};
    std::optional<long long> tau;
    double alpha = 3.0;
    double beta = 3.0;
    bool be_per_context_tau = true;
    bool strict_evolution = true;
    std::uint64_t seed = 2019;
    std::string output_path = "experiment.csv";
    bool full_log = false;
    unsigned threads = 0;

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;
    PolicyParams policy_params() const;
};

/// Reads a JSON object of flat keys (see README). Unknown keys are errors.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);

/// Uniform entries, each row's maximum swapped onto its diagonal slot, then
/// rows and the matching leading columns permuted jointly so the diagonal is
/// non-increasing. Always passes RewardMatrix::validate.
RewardMatrix random_matrix(std::size_t contexts, std::size_t arms, RandomStream& rng);

/// Uniform draw from the simplex via spacings of sorted uniforms.
PopulationDistribution random_initial_distribution(std::size_t contexts, RandomStream& rng);

/// One history of `kind` from d(1) = `initial` under matrix `M`.
RunRecord simulate_run(PolicyKind kind, const RewardMatrix& M, const PopulationDistribution& initial,
                       const ExperimentConfig& config, std::size_t replication, bool keep_steps);

/// Per-policy aggregates over all replications.
struct PolicySummary {
    PolicyKind kind;
    std::vector<double> mean_reward;
    std::vector<double> mean_d1;
    std::vector<double> regret;  // empty for the Oracle
};

struct ExperimentResult {
    std::vector<PolicySummary> policies;  // config order
    std::vector<RewardMatrix> matrices;   // one per refresh block
};

/// Receives every run in (replication, policy) order.
using RunSink = std::function<void(const RunRecord&)>;

/// Simulates every configured policy (plus the Oracle baseline when it is
/// not listed) for every replication. Results are identical for any thread
/// count.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunSink& sink = {});

/// Aggregate CSV: for each t, `regret:<policy>` (non-Oracle), then
/// `d1:<policy>`, then `reward:<policy>`.
void write_aggregate_csv(std::ostream& out, const ExperimentResult& result);

/// Per-step log header and rows. Context and arm are written one-based.
void write_step_log_header(std::ostream& out);
void write_step_log_rows(std::ostream& out, const RunRecord& run);

}  // namespace ecb
