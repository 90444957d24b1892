#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ecb/environment.hpp"
#include "ecb/random.hpp"

namespace ecb {

enum class PolicyKind { Oracle = 0, GreedyOracle = 1, REC = 2, BE = 3, RBAE = 4 };

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::Oracle, PolicyKind::GreedyOracle, PolicyKind::REC,
                                              PolicyKind::BE, PolicyKind::RBAE};

std::string_view label(PolicyKind kind) noexcept;

/// Accepts the labels above plus a few spellings ("Greedy-Oracle", "R-BAE",
/// any case). Throws ConfigError on anything else.
PolicyKind parse_policy_kind(std::string_view name);

/// Per (context, arm) reward, rejection and pull counts. pulls = rewards +
/// rejections holds entrywise at all times.
class PolicyCounters {
public:
    PolicyCounters(std::size_t contexts, std::size_t arms);

    void record(std::size_t context, std::size_t arm, int reward);

    long long rewards(std::size_t i, std::size_t j) const noexcept { return rewards_[i * arms_ + j]; }
    long long rejections(std::size_t i, std::size_t j) const noexcept { return rejections_[i * arms_ + j]; }
    long long pulls(std::size_t i, std::size_t j) const noexcept { return pulls_[i * arms_ + j]; }

    std::span<const long long> reward_row(std::size_t i) const noexcept { return {rewards_.data() + i * arms_, arms_}; }
    std::span<const long long> rejection_row(std::size_t i) const noexcept
    {
        return {rejections_.data() + i * arms_, arms_};
    }
    std::span<const long long> pull_row(std::size_t i) const noexcept { return {pulls_.data() + i * arms_, arms_}; }

    long long total_pulls() const noexcept;
    std::size_t contexts() const noexcept { return contexts_; }
    std::size_t arms() const noexcept { return arms_; }

private:
    std::size_t contexts_;
    std::size_t arms_;
    std::vector<long long> rewards_;
    std::vector<long long> rejections_;
    std::vector<long long> pulls_;
};

/// Lowest index among the maximisers / minimisers.
std::size_t argmax_lowest(std::span<const double> values);
std::size_t argmax_lowest(std::span<const long long> values);
std::size_t argmin_lowest(std::span<const long long> values);

/// floor(sqrt(T)), the default exploration horizon for REC.
long long default_exploration_horizon(long long horizon);

/// ceil(coefficient * ln T), used for both minR and maxS.
long long log_threshold(double coefficient, long long horizon);

/// Arm maximising the best reward probability over all contexts.
std::size_t oracle_choose(const RewardMatrix& M);

/// Row argmax; equals `context` for any valid matrix without off-diagonal ties.
std::size_t greedy_oracle_choose(const RewardMatrix& M, std::size_t context);

/// Common contract of the recommendation policies: `choose` is read-only,
/// `observe` applies the outcome of the step that `choose` just proposed.
class Policy {
public:
    Policy(std::size_t contexts, std::size_t arms) : counters_(contexts, arms) {}
    virtual ~Policy() = default;

    virtual PolicyKind kind() const noexcept = 0;
    virtual std::size_t choose(std::size_t context, long long t, RandomStream& rng) const = 0;
    virtual void observe(std::size_t context, std::size_t arm, int reward, long long t);

    const PolicyCounters& counters() const noexcept { return counters_; }
    std::size_t contexts() const noexcept { return counters_.contexts(); }
    std::size_t arms() const noexcept { return counters_.arms(); }

protected:
    void check_indices(std::size_t context, std::size_t arm) const;

    PolicyCounters counters_;
};

class OraclePolicy final : public Policy {
public:
    explicit OraclePolicy(const RewardMatrix& M);
    PolicyKind kind() const noexcept override { return PolicyKind::Oracle; }
    std::size_t choose(std::size_t context, long long t, RandomStream& rng) const override;

private:
    std::size_t arm_;
};

class GreedyOraclePolicy final : public Policy {
public:
    explicit GreedyOraclePolicy(const RewardMatrix& M);
    PolicyKind kind() const noexcept override { return PolicyKind::GreedyOracle; }
    std::size_t choose(std::size_t context, long long t, RandomStream& rng) const override;

private:
    std::vector<std::size_t> best_arm_;
};

/// Random explore-then-commit: uniform arms for t <= tau, then per context
/// the arm with the most rewards accrued by time tau.
class RecPolicy final : public Policy {
public:
    RecPolicy(std::size_t contexts, std::size_t arms, long long tau);
    PolicyKind kind() const noexcept override { return PolicyKind::REC; }
    std::size_t choose(std::size_t context, long long t, RandomStream& rng) const override;
    void observe(std::size_t context, std::size_t arm, int reward, long long t) override;

    long long tau() const noexcept { return tau_; }
    std::optional<std::size_t> committed_arm(std::size_t context) const;

private:
    void commit();

    long long tau_;
    std::vector<std::size_t> committed_;
};

/// Balanced exploration. While some arm of the arriving context has fewer
/// than minR rewards, pull the arm with the fewest rewards and mark the step
/// as the latest exploration time tau; otherwise pull the arm with the fewest
/// pulls in the counts recorded at tau.
///
/// By default each context keeps its own tau and pull-count snapshot. With
/// `per_context_tau = false` a single tau is shared: exploration by any
/// context refreshes the snapshot that every other context exploits from,
/// which lets an exploiting context's own pulls flip its choice.
class BalancedExplorationPolicy final : public Policy {
public:
    BalancedExplorationPolicy(std::size_t contexts, std::size_t arms, long long min_reward,
                              bool per_context_tau = true);
    PolicyKind kind() const noexcept override { return PolicyKind::BE; }
    std::size_t choose(std::size_t context, long long t, RandomStream& rng) const override;
    void observe(std::size_t context, std::size_t arm, int reward, long long t) override;

    long long min_reward() const noexcept { return min_reward_; }
    bool exploring(std::size_t context) const;
    /// Last exploration step seen by `context` (0 before any exploration).
    long long tau(std::size_t context) const noexcept { return tau_[per_context_ ? context : 0]; }
    std::span<const long long> snapshot(std::size_t context) const noexcept
    {
        return {snapshot_.data() + context * arms(), arms()};
    }

private:
    long long min_reward_;
    bool per_context_;
    std::vector<long long> tau_;
    std::vector<long long> snapshot_;
};

/// Rejection-based arm elimination. Each context keeps an active arm set;
/// while it holds more than one arm, arms are sampled uniformly from it and
/// an arm leaves the set once its rejection count exceeds maxS.
class RejectionEliminationPolicy final : public Policy {
public:
    RejectionEliminationPolicy(std::size_t contexts, std::size_t arms, long long max_rejections);
    PolicyKind kind() const noexcept override { return PolicyKind::RBAE; }
    std::size_t choose(std::size_t context, long long t, RandomStream& rng) const override;
    void observe(std::size_t context, std::size_t arm, int reward, long long t) override;

    long long max_rejections() const noexcept { return max_rejections_; }
    /// Surviving arms of `context`, in increasing order.
    const std::vector<std::size_t>& active_set(std::size_t context) const { return active_.at(context); }

private:
    long long max_rejections_;
    std::vector<std::vector<std::size_t>> active_;
};

struct PolicyParams {
    long long horizon = 5000;
    /// REC exploration horizon; unset means floor(sqrt(horizon)).
    std::optional<long long> tau;
    double alpha = 3.0;
    double beta = 3.0;
    bool be_per_context_tau = true;
};

std::unique_ptr<Policy> make_policy(PolicyKind kind, const RewardMatrix& M, const PolicyParams& params);

}  // namespace ecb
