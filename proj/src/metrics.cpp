#include "ecb/metrics.hpp"

#include <string>

#include "ecb/error.hpp"

namespace ecb {

std::vector<long long> cumulative_reward(std::span<const int> rewards)
{
    std::vector<long long> out;
    out.reserve(rewards.size());
    long long total = 0;
    for (int r : rewards) {
        if (r != 0 && r != 1) {
            throw Error(ErrorCode::InvalidParameter, "rewards must be 0 or 1");
        }
        total += r;
        out.push_back(total);
    }
    return out;
}

SeriesAccumulator::SeriesAccumulator(std::size_t horizon) : reward_sum_(horizon, 0), d1_sum_(horizon, 0.0) {}

void SeriesAccumulator::add(std::span<const long long> cumulative_reward, std::span<const double> d1)
{
    if (count_ == 0 && reward_sum_.empty()) {
        reward_sum_.assign(cumulative_reward.size(), 0);
        d1_sum_.assign(cumulative_reward.size(), 0.0);
    }
    if (cumulative_reward.size() != horizon() || d1.size() != horizon()) {
        throw Error(ErrorCode::HorizonMismatch, "run of length " + std::to_string(cumulative_reward.size()) +
                                                    " added to accumulator of horizon " + std::to_string(horizon()));
    }
    for (std::size_t k = 0; k < horizon(); ++k) {
        reward_sum_[k] += cumulative_reward[k];
        d1_sum_[k] += d1[k];
    }
    ++count_;
}

std::vector<double> SeriesAccumulator::mean_reward() const
{
    std::vector<double> out(horizon(), 0.0);
    if (count_ == 0) return out;
    const auto n = static_cast<double>(count_);
    for (std::size_t k = 0; k < horizon(); ++k) {
        out[k] = static_cast<double>(reward_sum_[k]) / n;
    }
    return out;
}

std::vector<double> SeriesAccumulator::mean_d1() const
{
    std::vector<double> out(horizon(), 0.0);
    if (count_ == 0) return out;
    const auto n = static_cast<double>(count_);
    for (std::size_t k = 0; k < horizon(); ++k) {
        out[k] = d1_sum_[k] / n;
    }
    return out;
}

std::vector<double> regret_from_means(std::span<const double> oracle_mean, std::span<const double> policy_mean)
{
    if (oracle_mean.size() != policy_mean.size()) {
        throw Error(ErrorCode::HorizonMismatch, "oracle horizon " + std::to_string(oracle_mean.size()) +
                                                    " vs policy horizon " + std::to_string(policy_mean.size()));
    }
    std::vector<double> out(oracle_mean.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = oracle_mean[k] - policy_mean[k];
    }
    return out;
}

RegretSeries mean_regret(std::span<const RunRecord> policy_runs, std::span<const RunRecord> oracle_runs)
{
    if (policy_runs.empty() || oracle_runs.empty()) {
        throw Error(ErrorCode::InvalidParameter, "regret needs at least one policy run and one oracle run");
    }
    auto accumulate = [](std::span<const RunRecord> runs) {
        SeriesAccumulator acc(runs.front().cumulative_reward.size());
        for (const auto& run : runs) {
            acc.add(run);
        }
        return acc.mean_reward();
    };
    RegretSeries out;
    out.policy = policy_runs.front().policy;
    out.values = regret_from_means(accumulate(oracle_runs), accumulate(policy_runs));
    return out;
}

}  // namespace ecb
