#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecb/random.hpp"

namespace ecb {

// Context and arm indices are zero-based throughout the library.

/// n x m Bernoulli success probabilities with each row's maximum on the
/// diagonal and diagonal entries non-increasing down the rows.
class RewardMatrix {
public:
    /// Checks shape, range and structure; throws ecb::Error on violation.
    static RewardMatrix validate(const std::vector<std::vector<double>>& raw);

    std::size_t contexts() const noexcept { return n_; }
    std::size_t arms() const noexcept { return m_; }

    double operator()(std::size_t context, std::size_t arm) const noexcept { return mu_[context * m_ + arm]; }
    double at(std::size_t context, std::size_t arm) const;

    std::span<const double> row(std::size_t context) const noexcept { return {mu_.data() + context * m_, m_}; }
    std::vector<std::vector<double>> rows() const;

    friend bool operator==(const RewardMatrix&, const RewardMatrix&) = default;

private:
    RewardMatrix(std::size_t n, std::size_t m, std::vector<double> mu) : n_(n), m_(m), mu_(std::move(mu)) {}

    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<double> mu_;
};

struct EvolutionParams {
    double delta = 0.01;
    /// Strict: a rewarded pull of an arm with no matching context type throws
    /// ArmHasNoContext. Lenient: such a pull leaves d unchanged.
    bool strict = true;

    /// Throws InvalidParameter if delta is negative or not finite.
    void check() const;
};

/// Arrival distribution over context types; always on the simplex.
class PopulationDistribution {
public:
    static constexpr double kSumTolerance = 1e-9;

    /// Throws InvalidDistribution unless entries are >= 0 and sum to 1.
    explicit PopulationDistribution(std::vector<double> d);

    static PopulationDistribution uniform(std::size_t n);

    std::size_t size() const noexcept { return d_.size(); }
    double operator[](std::size_t i) const noexcept { return d_[i]; }
    std::span<const double> values() const noexcept { return d_; }

    friend bool operator==(const PopulationDistribution&, const PopulationDistribution&) = default;

private:
    struct Unchecked {};
    PopulationDistribution(Unchecked, std::vector<double> d) : d_(std::move(d)) {}

    friend PopulationDistribution evolve(const PopulationDistribution&, std::size_t, int, long long,
                                         const EvolutionParams&);

    std::vector<double> d_;
};

struct StepOutcome {
    long long t = 0;
    std::size_t context = 0;
    std::size_t arm = 0;
    int reward = 0;
    PopulationDistribution d_after = PopulationDistribution::uniform(1);
};

/// Draws a context index with probability d_i. Consumes one variate.
std::size_t sample_context(const PopulationDistribution& d, RandomStream& rng);

/// Bernoulli(mu_ij) draw. Consumes one variate.
int sample_reward(const RewardMatrix& M, std::size_t context, std::size_t arm, RandomStream& rng);

/// Positive-externality update of d after observing `reward` for `arm` at
/// time t (t >= 1). A zero reward returns d unchanged. A unit reward adds
/// delta/sqrt(t) to d_arm and rescales by 1/(1 + delta/sqrt(t)).
PopulationDistribution evolve(const PopulationDistribution& d, std::size_t arm, int reward, long long t,
                              const EvolutionParams& params);

}  // namespace ecb
