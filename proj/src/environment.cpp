#include "ecb/environment.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ecb/error.hpp"

namespace ecb {

RewardMatrix RewardMatrix::validate(const std::vector<std::vector<double>>& raw)
{
    const std::size_t n = raw.size();
    if (n == 0) {
        throw Error(ErrorCode::ShapeError, "reward matrix has no rows");
    }
    const std::size_t m = raw.front().size();
    for (const auto& r : raw) {
        if (r.size() != m) {
            throw Error(ErrorCode::ShapeError, "reward matrix rows have different lengths");
        }
    }
    if (m < n) {
        throw Error(ErrorCode::ShapeError,
                    "reward matrix needs at least as many arms as contexts (n=" + std::to_string(n) +
                        ", m=" + std::to_string(m) + ")");
    }

    std::vector<double> mu;
    mu.reserve(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double v = raw[i][j];
            if (!(v >= 0.0 && v <= 1.0)) {
                throw Error(ErrorCode::EntryOutOfRange,
                            "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is not in [0,1]");
            }
            mu.push_back(v);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (raw[i][j] > raw[i][i]) {
                throw Error(ErrorCode::DiagonalNotMaximal,
                            "row " + std::to_string(i + 1) + " has its maximum off the diagonal");
            }
        }
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (raw[i][i] > raw[i - 1][i - 1]) {
            throw Error(ErrorCode::RowsUnordered,
                        "diagonal entries must be non-increasing (row " + std::to_string(i + 1) + ")");
        }
    }
    return RewardMatrix(n, m, std::move(mu));
}

double RewardMatrix::at(std::size_t context, std::size_t arm) const
{
    if (context >= n_ || arm >= m_) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "(" + std::to_string(context) + "," + std::to_string(arm) + ") outside " + std::to_string(n_) +
                        "x" + std::to_string(m_) + " matrix");
    }
    return (*this)(context, arm);
}

std::vector<std::vector<double>> RewardMatrix::rows() const
{
    std::vector<std::vector<double>> out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        auto r = row(i);
        out[i].assign(r.begin(), r.end());
    }
    return out;
}

PopulationDistribution::PopulationDistribution(std::vector<double> d) : d_(std::move(d))
{
    if (d_.empty()) {
        throw Error(ErrorCode::InvalidDistribution, "distribution is empty");
    }
    double sum = 0.0;
    for (double v : d_) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::InvalidDistribution, "distribution has a negative or non-finite entry");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        throw Error(ErrorCode::InvalidDistribution, "distribution sums to " + std::to_string(sum));
    }
}

PopulationDistribution PopulationDistribution::uniform(std::size_t n)
{
    if (n == 0) {
        throw Error(ErrorCode::InvalidDistribution, "distribution is empty");
    }
    return PopulationDistribution(Unchecked{}, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

void EvolutionParams::check() const
{
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw Error(ErrorCode::InvalidParameter, "delta must be a finite non-negative number");
    }
}

std::size_t sample_context(const PopulationDistribution& d, RandomStream& rng)
{
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] > 0.0) {
            last_positive = i;
        }
        cumulative += d[i];
        if (u < cumulative) {
            return i;
        }
    }
    // Only reachable when rounding leaves the cumulative sum a hair below 1.
    return last_positive;
}

int sample_reward(const RewardMatrix& M, std::size_t context, std::size_t arm, RandomStream& rng)
{
    const double mu = M.at(context, arm);
    return rng.uniform() < mu ? 1 : 0;
}

PopulationDistribution evolve(const PopulationDistribution& d, std::size_t arm, int reward, long long t,
                              const EvolutionParams& params)
{
    if (t < 1) {
        throw Error(ErrorCode::InvalidParameter, "time index starts at 1");
    }
    if (reward == 0) {
        return d;
    }
    if (arm >= d.size()) {
        if (params.strict) {
            throw Error(ErrorCode::ArmHasNoContext,
                        "arm " + std::to_string(arm + 1) + " has no matching context type");
        }
        return d;
    }

    const double step = params.delta / std::sqrt(static_cast<double>(t));
    const double scale = 1.0 / (1.0 + step);
    std::vector<double> next(d.values().begin(), d.values().end());
    for (auto& v : next) {
        v *= scale;
    }
    next[arm] = (d[arm] + step) * scale;
    return PopulationDistribution(PopulationDistribution::Unchecked{}, std::move(next));
}

}  // namespace ecb
