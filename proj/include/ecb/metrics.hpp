#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecb/environment.hpp"

namespace ecb {

/// One simulated history of one policy. `steps` is only filled when the
/// per-step log is requested.
struct RunRecord {
    std::string policy;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    std::vector<StepOutcome> steps;
    std::vector<long long> cumulative_reward;  // R_t for t = 1..T
    std::vector<double> d1;                    // d_1(t) for t = 1..T, before the step-t update
    long long total_pulls = 0;                 // sum of the policy's pull counters at the end
};

/// Oracle-relative regret, index k holding t = k + 1.
struct RegretSeries {
    std::string policy;
    std::vector<double> values;
};

/// Prefix sums of binary rewards.
std::vector<long long> cumulative_reward(std::span<const int> rewards);

/// Pointwise sums of reward and d_1 series over replications. Rewards are
/// summed exactly in integers; d_1 is summed in the order runs are added.
class SeriesAccumulator {
public:
    explicit SeriesAccumulator(std::size_t horizon = 0);

    void add(std::span<const long long> cumulative_reward, std::span<const double> d1);
    void add(const RunRecord& run) { add(run.cumulative_reward, run.d1); }

    std::size_t horizon() const noexcept { return reward_sum_.size(); }
    std::size_t count() const noexcept { return count_; }

    std::vector<double> mean_reward() const;
    std::vector<double> mean_d1() const;

private:
    std::size_t count_ = 0;
    std::vector<long long> reward_sum_;
    std::vector<double> d1_sum_;
};

/// regret(t) = mean oracle R_t - mean policy R_t. Throws HorizonMismatch
/// when the two mean series differ in length.
std::vector<double> regret_from_means(std::span<const double> oracle_mean, std::span<const double> policy_mean);

/// Mean regret of `policy_runs` against independent `oracle_runs`. Throws
/// InvalidParameter on an empty set and HorizonMismatch on unequal horizons.
RegretSeries mean_regret(std::span<const RunRecord> policy_runs, std::span<const RunRecord> oracle_runs);

}  // namespace ecb
