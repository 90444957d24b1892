#include "ecb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ecb/csv.hpp"
#include "ecb/error.hpp"
#include "ecb/parallel.hpp"

namespace ecb {

using nlohmann::json;

void ExperimentConfig::validate() const
{
    auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
    if (contexts < 1) fail("n must be at least 1");
    if (arms < contexts) fail("m must be at least n");
    if (horizon < 1) fail("horizon must be at least 1");
    if (iterations < 1) fail("iterations must be at least 1");
    if (!(delta > 0.0) || !std::isfinite(delta)) fail("delta must be a positive number");
    if (policies.empty()) fail("at least one policy is required");
    if (tau && *tau < 0) fail("tau must be non-negative");
    if (!(alpha >= 0.0) || !(beta >= 0.0)) fail("alpha and beta must be non-negative");
    if (matrix && (matrix->contexts() != contexts || matrix->arms() != arms)) {
        fail("matrix is " + std::to_string(matrix->contexts()) + "x" + std::to_string(matrix->arms()) +
             " but n=" + std::to_string(contexts) + ", m=" + std::to_string(arms));
    }
    if (initial_distribution && initial_distribution->size() != contexts) {
        fail("d1_init has " + std::to_string(initial_distribution->size()) + " entries but n=" +
             std::to_string(contexts));
    }
    std::set<PolicyKind> seen;
    for (auto kind : policies) {
        if (!seen.insert(kind).second) fail("policy " + std::string(label(kind)) + " listed twice");
    }
}

PolicyParams ExperimentConfig::policy_params() const
{
    PolicyParams p;
    p.horizon = horizon;
    p.tau = tau;
    p.alpha = alpha;
    p.beta = beta;
    p.be_per_context_tau = be_per_context_tau;
    return p;
}

namespace {

template <typename T>
T get_as(const json& value, const char* key)
{
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::ConfigError, std::string("key '") + key + "' has the wrong type");
    }
}

std::vector<PolicyKind> parse_policy_list(const json& value)
{
    std::vector<std::string> names;
    if (value.is_string()) {
        std::stringstream ss(value.get<std::string>());
        for (std::string item; std::getline(ss, item, ',');) {
            if (!item.empty()) names.push_back(item);
        }
    } else {
        names = get_as<std::vector<std::string>>(value, "policies");
    }
    std::vector<PolicyKind> kinds;
    for (const auto& name : names) kinds.push_back(parse_policy_kind(name));
    return kinds;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw Error(ErrorCode::ConfigError, "config must be a JSON object");
    }

    ExperimentConfig cfg;
    bool explicit_shape = false;
    for (const auto& [key, value] : doc.items()) {
        const char* k = key.c_str();
        if (key == "n") {
            cfg.contexts = get_as<std::size_t>(value, k);
            explicit_shape = true;
        } else if (key == "m") {
            cfg.arms = get_as<std::size_t>(value, k);
            explicit_shape = true;
        } else if (key == "horizon") {
            cfg.horizon = get_as<long long>(value, k);
        } else if (key == "iterations") {
            cfg.iterations = get_as<std::size_t>(value, k);
        } else if (key == "delta") {
            cfg.delta = get_as<double>(value, k);
        } else if (key == "d1_init") {
            if (value.is_string() && value.get<std::string>() == "random") {
                cfg.initial_distribution.reset();
            } else {
                try {
                    cfg.initial_distribution = PopulationDistribution(get_as<std::vector<double>>(value, k));
                } catch (const Error& e) {
                    throw Error(ErrorCode::ConfigError, std::string("d1_init: ") + e.what());
                }
            }
        } else if (key == "matrix") {
            if (value.is_string() && value.get<std::string>() == "random") {
                cfg.matrix.reset();
            } else {
                try {
                    cfg.matrix = RewardMatrix::validate(get_as<std::vector<std::vector<double>>>(value, k));
                } catch (const Error& e) {
                    if (e.code() == ErrorCode::ConfigError) throw;
                    throw Error(ErrorCode::ConfigError, std::string("matrix: ") + e.what());
                }
            }
        } else if (key == "matrix_refresh_every") {
            cfg.matrix_refresh_every = get_as<std::size_t>(value, k);
        } else if (key == "policies") {
            cfg.policies = parse_policy_list(value);
        } else if (key == "tau") {
            cfg.tau = get_as<long long>(value, k);
        } else if (key == "alpha") {
            cfg.alpha = get_as<double>(value, k);
        } else if (key == "beta") {
            cfg.beta = get_as<double>(value, k);
        } else if (key == "be_per_context_tau") {
            cfg.be_per_context_tau = get_as<bool>(value, k);
        } else if (key == "strict_evolution") {
            cfg.strict_evolution = get_as<bool>(value, k);
        } else if (key == "seed") {
            cfg.seed = get_as<std::uint64_t>(value, k);
        } else if (key == "output") {
            cfg.output_path = get_as<std::string>(value, k);
        } else if (key == "full_log") {
            cfg.full_log = get_as<bool>(value, k);
        } else if (key == "threads") {
            cfg.threads = get_as<unsigned>(value, k);
        } else {
            throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
        }
    }
    // An explicit matrix fixes the shape unless the file also states it.
    if (cfg.matrix && !explicit_shape) {
        cfg.contexts = cfg.matrix->contexts();
        cfg.arms = cfg.matrix->arms();
    }
    // Defaults only fit the 2x2 setup; other shapes fall back to a uniform
    // d(1) and random matrices.
    if (!doc.contains("d1_init") && cfg.contexts != 2) {
        cfg.initial_distribution = PopulationDistribution::uniform(cfg.contexts);
    }
    if (!doc.contains("matrix") && (cfg.contexts != 2 || cfg.arms != 2)) {
        cfg.matrix.reset();
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ConfigError, "cannot open config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

RewardMatrix random_matrix(std::size_t contexts, std::size_t arms, RandomStream& rng)
{
    if (contexts < 1 || arms < contexts) {
        throw Error(ErrorCode::ShapeError, "random matrix needs 1 <= n <= m");
    }
    std::vector<std::vector<double>> raw(contexts, std::vector<double>(arms));
    for (auto& row : raw) {
        for (auto& v : row) v = rng.uniform();
    }
    for (std::size_t i = 0; i < contexts; ++i) {
        auto best = std::max_element(raw[i].begin(), raw[i].end());
        std::iter_swap(raw[i].begin() + static_cast<std::ptrdiff_t>(i), best);
    }

    std::vector<std::size_t> order(contexts);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return raw[x][x] > raw[y][y]; });

    // Row r of the result is old row order[r]; its leading columns are
    // relabelled the same way so every row maximum stays on the diagonal.
    std::vector<std::vector<double>> sorted(contexts, std::vector<double>(arms));
    for (std::size_t r = 0; r < contexts; ++r) {
        const auto& src = raw[order[r]];
        for (std::size_t c = 0; c < contexts; ++c) sorted[r][c] = src[order[c]];
        for (std::size_t c = contexts; c < arms; ++c) sorted[r][c] = src[c];
    }
    return RewardMatrix::validate(sorted);
}

PopulationDistribution random_initial_distribution(std::size_t contexts, RandomStream& rng)
{
    if (contexts < 1) {
        throw Error(ErrorCode::InvalidDistribution, "distribution needs at least one context");
    }
    std::vector<double> cuts(contexts - 1);
    for (auto& c : cuts) c = rng.uniform();
    std::sort(cuts.begin(), cuts.end());

    std::vector<double> d(contexts);
    double previous = 0.0;
    for (std::size_t i = 0; i + 1 < contexts; ++i) {
        d[i] = cuts[i] - previous;
        previous = cuts[i];
    }
    d[contexts - 1] = 1.0 - previous;
    return PopulationDistribution(std::move(d));
}

RunRecord simulate_run(PolicyKind kind, const RewardMatrix& M, const PopulationDistribution& initial,
                       const ExperimentConfig& config, std::size_t replication, bool keep_steps)
{
    RandomStream rng(config.seed, StreamDomain::Simulation, {static_cast<std::uint64_t>(kind), replication});
    const EvolutionParams evolution{config.delta, config.strict_evolution};
    auto policy = make_policy(kind, M, config.policy_params());

    RunRecord run;
    run.policy = std::string(label(kind));
    run.replication = replication;
    run.seed = rng.seed();
    const auto horizon = static_cast<std::size_t>(config.horizon);
    run.cumulative_reward.reserve(horizon);
    run.d1.reserve(horizon);
    if (keep_steps) run.steps.reserve(horizon);

    PopulationDistribution d = initial;
    long long total = 0;
    for (long long t = 1; t <= config.horizon; ++t) {
        run.d1.push_back(d[0]);
        const std::size_t context = sample_context(d, rng);
        const std::size_t arm = policy->choose(context, t, rng);
        const int reward = sample_reward(M, context, arm, rng);
        policy->observe(context, arm, reward, t);
        d = evolve(d, arm, reward, t, evolution);
        total += reward;
        run.cumulative_reward.push_back(total);
        if (keep_steps) run.steps.push_back(StepOutcome{t, context, arm, reward, d});
    }
    run.total_pulls = policy->counters().total_pulls();
    return run;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunSink& sink)
{
    config.validate();

    std::vector<PolicyKind> kinds = config.policies;
    const bool oracle_listed = std::find(kinds.begin(), kinds.end(), PolicyKind::Oracle) != kinds.end();
    if (!oracle_listed) kinds.push_back(PolicyKind::Oracle);

    ExperimentResult result;
    const std::size_t blocks = (config.matrix || config.matrix_refresh_every == 0)
                                   ? 1
                                   : (config.iterations + config.matrix_refresh_every - 1) /
                                         config.matrix_refresh_every;
    for (std::size_t b = 0; b < blocks; ++b) {
        if (config.matrix) {
            result.matrices.push_back(*config.matrix);
        } else {
            RandomStream rng(config.seed, StreamDomain::Matrix, {b});
            result.matrices.push_back(random_matrix(config.contexts, config.arms, rng));
        }
    }
    auto matrix_for = [&](std::size_t replication) -> const RewardMatrix& {
        if (blocks == 1) return result.matrices.front();
        return result.matrices[replication / config.matrix_refresh_every];
    };
    auto initial_for = [&](std::size_t replication) {
        if (config.initial_distribution) return *config.initial_distribution;
        RandomStream rng(config.seed, StreamDomain::InitialState, {replication});
        return random_initial_distribution(config.contexts, rng);
    };

    const auto horizon = static_cast<std::size_t>(config.horizon);
    std::vector<SeriesAccumulator> acc(kinds.size(), SeriesAccumulator(horizon));
    const bool keep_steps = config.full_log && sink;

    // Fixed-size blocks, reduced in replication order, so floating-point sums
    // do not depend on how many threads ran the block.
    constexpr std::size_t kBlock = 32;
    for (std::size_t first = 0; first < config.iterations; first += kBlock) {
        const std::size_t reps = std::min(kBlock, config.iterations - first);
        std::vector<RunRecord> runs(reps * kinds.size());
        parallel_for(runs.size(), config.threads, [&](std::size_t k) {
            const std::size_t rep = first + k / kinds.size();
            const PolicyKind kind = kinds[k % kinds.size()];
            runs[k] = simulate_run(kind, matrix_for(rep), initial_for(rep), config, rep, keep_steps);
        });
        for (std::size_t k = 0; k < runs.size(); ++k) {
            acc[k % kinds.size()].add(runs[k]);
            if (sink) sink(runs[k]);
        }
    }

    const std::size_t oracle_index =
        static_cast<std::size_t>(std::find(kinds.begin(), kinds.end(), PolicyKind::Oracle) - kinds.begin());
    const auto oracle_mean = acc[oracle_index].mean_reward();
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
        PolicySummary summary{kinds[p], acc[p].mean_reward(), acc[p].mean_d1(), {}};
        if (kinds[p] != PolicyKind::Oracle) {
            summary.regret = regret_from_means(oracle_mean, summary.mean_reward);
        }
        result.policies.push_back(std::move(summary));
    }
    return result;
}

void write_aggregate_csv(std::ostream& out, const ExperimentResult& result)
{
    std::vector<std::string> labels;
    std::vector<NamedSeries> series;
    for (const auto& p : result.policies) {
        if (!p.regret.empty()) series.push_back({"regret:" + std::string(label(p.kind)), p.regret});
    }
    for (const auto& p : result.policies) {
        series.push_back({"d1:" + std::string(label(p.kind)), p.mean_d1});
    }
    for (const auto& p : result.policies) {
        series.push_back({"reward:" + std::string(label(p.kind)), p.mean_reward});
    }
    write_series_csv(out, series);
}

void write_step_log_header(std::ostream& out)
{
    out << "policy,replication,t,context,arm,reward,d1\n";
}

void write_step_log_rows(std::ostream& out, const RunRecord& run)
{
    for (const auto& s : run.steps) {
        out << run.policy << ',' << run.replication << ',' << s.t << ',' << s.context + 1 << ',' << s.arm + 1 << ','
            << s.reward << ',' << format_value(s.d_after[0]) << '\n';
    }
}

}  // namespace ecb
