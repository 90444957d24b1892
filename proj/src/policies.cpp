#include "ecb/policies.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "ecb/error.hpp"

namespace ecb {

std::string_view label(PolicyKind kind) noexcept
{
    switch (kind) {
    case PolicyKind::Oracle: return "Oracle";
    case PolicyKind::GreedyOracle: return "GreedyOracle";
    case PolicyKind::REC: return "REC";
    case PolicyKind::BE: return "BE";
    case PolicyKind::RBAE: return "RBAE";
    }
    return "?";
}

PolicyKind parse_policy_kind(std::string_view name)
{
    std::string key;
    for (char c : name) {
        if (c != '-' && c != '_' && c != ' ') {
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (key == "oracle") return PolicyKind::Oracle;
    if (key == "greedyoracle" || key == "greedy") return PolicyKind::GreedyOracle;
    if (key == "rec") return PolicyKind::REC;
    if (key == "be") return PolicyKind::BE;
    if (key == "rbae") return PolicyKind::RBAE;
    throw Error(ErrorCode::ConfigError, "unknown policy '" + std::string(name) + "'");
}

PolicyCounters::PolicyCounters(std::size_t contexts, std::size_t arms)
    : contexts_(contexts)
    , arms_(arms)
    , rewards_(contexts * arms, 0)
    , rejections_(contexts * arms, 0)
    , pulls_(contexts * arms, 0)
{
}

void PolicyCounters::record(std::size_t context, std::size_t arm, int reward)
{
    const std::size_t k = context * arms_ + arm;
    if (reward != 0) {
        ++rewards_[k];
    } else {
        ++rejections_[k];
    }
    ++pulls_[k];
}

long long PolicyCounters::total_pulls() const noexcept
{
    return std::accumulate(pulls_.begin(), pulls_.end(), 0LL);
}

namespace {

template <typename T, typename Better>
std::size_t arg_best(std::span<const T> values, Better better)
{
    std::size_t best = 0;
    for (std::size_t j = 1; j < values.size(); ++j) {
        if (better(values[j], values[best])) {
            best = j;
        }
    }
    return best;
}

}  // namespace

std::size_t argmax_lowest(std::span<const double> values)
{
    return arg_best(values, std::greater<>{});
}

std::size_t argmax_lowest(std::span<const long long> values)
{
    return arg_best(values, std::greater<>{});
}

std::size_t argmin_lowest(std::span<const long long> values)
{
    return arg_best(values, std::less<>{});
}

long long default_exploration_horizon(long long horizon)
{
    if (horizon < 1) {
        throw Error(ErrorCode::InvalidParameter, "horizon must be at least 1");
    }
    auto tau = static_cast<long long>(std::sqrt(static_cast<double>(horizon)));
    // Correct for sqrt rounding on perfect squares.
    while (tau * tau > horizon) --tau;
    while ((tau + 1) * (tau + 1) <= horizon) ++tau;
    return tau;
}

long long log_threshold(double coefficient, long long horizon)
{
    if (horizon < 1) {
        throw Error(ErrorCode::InvalidParameter, "horizon must be at least 1");
    }
    if (!(coefficient >= 0.0) || !std::isfinite(coefficient)) {
        throw Error(ErrorCode::InvalidParameter, "threshold coefficient must be finite and non-negative");
    }
    return static_cast<long long>(std::ceil(coefficient * std::log(static_cast<double>(horizon))));
}

std::size_t oracle_choose(const RewardMatrix& M)
{
    std::vector<double> column_max(M.arms(), 0.0);
    for (std::size_t j = 0; j < M.arms(); ++j) {
        for (std::size_t i = 0; i < M.contexts(); ++i) {
            column_max[j] = std::max(column_max[j], M(i, j));
        }
    }
    return argmax_lowest(std::span<const double>(column_max));
}

std::size_t greedy_oracle_choose(const RewardMatrix& M, std::size_t context)
{
    if (context >= M.contexts()) {
        throw Error(ErrorCode::IndexOutOfRange, "context " + std::to_string(context) + " out of range");
    }
    return argmax_lowest(M.row(context));
}

void Policy::observe(std::size_t context, std::size_t arm, int reward, long long /*t*/)
{
    check_indices(context, arm);
    counters_.record(context, arm, reward);
}

void Policy::check_indices(std::size_t context, std::size_t arm) const
{
    if (context >= contexts() || arm >= arms()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "(" + std::to_string(context) + "," + std::to_string(arm) + ") outside policy dimensions");
    }
}

OraclePolicy::OraclePolicy(const RewardMatrix& M) : Policy(M.contexts(), M.arms()), arm_(oracle_choose(M)) {}

std::size_t OraclePolicy::choose(std::size_t, long long, RandomStream&) const
{
    return arm_;
}

GreedyOraclePolicy::GreedyOraclePolicy(const RewardMatrix& M) : Policy(M.contexts(), M.arms())
{
    best_arm_.reserve(M.contexts());
    for (std::size_t i = 0; i < M.contexts(); ++i) {
        best_arm_.push_back(greedy_oracle_choose(M, i));
    }
}

std::size_t GreedyOraclePolicy::choose(std::size_t context, long long, RandomStream&) const
{
    return best_arm_.at(context);
}

RecPolicy::RecPolicy(std::size_t contexts, std::size_t arms, long long tau) : Policy(contexts, arms), tau_(tau)
{
    if (tau_ <= 0) {
        commit();
    }
}

std::optional<std::size_t> RecPolicy::committed_arm(std::size_t context) const
{
    if (committed_.empty()) {
        return std::nullopt;
    }
    return committed_.at(context);
}

std::size_t RecPolicy::choose(std::size_t context, long long t, RandomStream& rng) const
{
    if (t <= tau_) {
        return rng.index(arms());
    }
    if (!committed_.empty()) {
        return committed_[context];
    }
    // Observation at tau was skipped; current counts are the counts at tau.
    return argmax_lowest(counters_.reward_row(context));
}

void RecPolicy::observe(std::size_t context, std::size_t arm, int reward, long long t)
{
    Policy::observe(context, arm, reward, t);
    if (t >= tau_ && committed_.empty()) {
        commit();
    }
}

void RecPolicy::commit()
{
    committed_.resize(contexts());
    for (std::size_t i = 0; i < contexts(); ++i) {
        committed_[i] = argmax_lowest(counters_.reward_row(i));
    }
}

BalancedExplorationPolicy::BalancedExplorationPolicy(std::size_t contexts, std::size_t arms, long long min_reward,
                                                     bool per_context_tau)
    : Policy(contexts, arms)
    , min_reward_(min_reward)
    , per_context_(per_context_tau)
    , tau_(per_context_tau ? contexts : 1, 0)
    , snapshot_(contexts * arms, 0)
{
}

bool BalancedExplorationPolicy::exploring(std::size_t context) const
{
    const auto r = counters_.reward_row(context);
    return std::any_of(r.begin(), r.end(), [&](long long v) { return v < min_reward_; });
}

std::size_t BalancedExplorationPolicy::choose(std::size_t context, long long, RandomStream&) const
{
    if (exploring(context)) {
        return argmin_lowest(counters_.reward_row(context));
    }
    return argmin_lowest(snapshot(context));
}

void BalancedExplorationPolicy::observe(std::size_t context, std::size_t arm, int reward, long long t)
{
    check_indices(context, arm);
    const bool explored = exploring(context);
    Policy::observe(context, arm, reward, t);
    if (!explored) {
        return;
    }
    if (per_context_) {
        tau_[context] = t;
        const auto row = counters_.pull_row(context);
        std::copy(row.begin(), row.end(), snapshot_.begin() + static_cast<std::ptrdiff_t>(context * arms()));
    } else {
        tau_[0] = t;
        for (std::size_t i = 0; i < contexts(); ++i) {
            const auto row = counters_.pull_row(i);
            std::copy(row.begin(), row.end(), snapshot_.begin() + static_cast<std::ptrdiff_t>(i * arms()));
        }
    }
}

RejectionEliminationPolicy::RejectionEliminationPolicy(std::size_t contexts, std::size_t arms,
                                                       long long max_rejections)
    : Policy(contexts, arms), max_rejections_(max_rejections), active_(contexts)
{
    for (auto& set : active_) {
        set.resize(arms);
        std::iota(set.begin(), set.end(), std::size_t{0});
    }
}

std::size_t RejectionEliminationPolicy::choose(std::size_t context, long long, RandomStream& rng) const
{
    const auto& set = active_.at(context);
    if (set.size() == 1) {
        return set.front();
    }
    return set[rng.index(set.size())];
}

void RejectionEliminationPolicy::observe(std::size_t context, std::size_t arm, int reward, long long t)
{
    Policy::observe(context, arm, reward, t);
    auto& set = active_[context];
    if (set.size() <= 1) {
        return;
    }
    const auto s = counters_.rejection_row(context);
    std::vector<std::size_t> survivors;
    survivors.reserve(set.size());
    for (std::size_t j : set) {
        if (s[j] <= max_rejections_) {
            survivors.push_back(j);
        }
    }
    if (survivors.empty()) {
        survivors.push_back(*std::min_element(set.begin(), set.end(),
                                              [&](std::size_t a, std::size_t b) { return s[a] < s[b]; }));
    }
    set = std::move(survivors);
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, const RewardMatrix& M, const PolicyParams& params)
{
    const std::size_t n = M.contexts();
    const std::size_t m = M.arms();
    switch (kind) {
    case PolicyKind::Oracle: return std::make_unique<OraclePolicy>(M);
    case PolicyKind::GreedyOracle: return std::make_unique<GreedyOraclePolicy>(M);
    case PolicyKind::REC:
        return std::make_unique<RecPolicy>(n, m, params.tau.value_or(default_exploration_horizon(params.horizon)));
    case PolicyKind::BE:
        return std::make_unique<BalancedExplorationPolicy>(n, m, log_threshold(params.alpha, params.horizon),
                                                           params.be_per_context_tau);
    case PolicyKind::RBAE:
        return std::make_unique<RejectionEliminationPolicy>(n, m, log_threshold(params.beta, params.horizon));
    }
    throw Error(ErrorCode::ConfigError, "unknown policy kind");
}

}  // namespace ecb
