#include "ecb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecb/error.hpp"
#include "ecb/parallel.hpp"

namespace ecb {

namespace {

void require_two_by_two(const RewardMatrix& M)
{
    if (M.contexts() != 2 || M.arms() != 2) {
        throw Error(ErrorCode::DimensionError, "mean-field analysis needs a 2x2 reward matrix, got " +
                                                   std::to_string(M.contexts()) + "x" + std::to_string(M.arms()));
    }
}

constexpr double kRowTolerance = 1e-12;

}  // namespace

PullProbabilities::PullProbabilities(const Grid& p) : p_(p)
{
    for (const auto& row : p_) {
        for (double v : row) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw Error(ErrorCode::InvalidParameter, "pull probability outside [0,1]");
            }
        }
        if (std::abs(row[0] + row[1] - 1.0) > kRowTolerance) {
            throw Error(ErrorCode::InvalidParameter, "pull probabilities of a context must sum to 1");
        }
    }
}

PullProbabilities PullProbabilities::uniform()
{
    return PullProbabilities(Grid{{{0.5, 0.5}, {0.5, 0.5}}});
}

PullProbabilities PullProbabilities::of_policy(PolicyKind kind, const RewardMatrix& M)
{
    require_two_by_two(M);
    Grid p{};
    switch (kind) {
    case PolicyKind::Oracle: {
        const std::size_t arm = oracle_choose(M);
        p[0][arm] = 1.0;
        p[1][arm] = 1.0;
        break;
    }
    case PolicyKind::GreedyOracle:
        p[0][greedy_oracle_choose(M, 0)] = 1.0;
        p[1][greedy_oracle_choose(M, 1)] = 1.0;
        break;
    default:
        throw Error(ErrorCode::InvalidParameter,
                    std::string(label(kind)) + " has no stationary pull probabilities");
    }
    return PullProbabilities(p);
}

OdeCoefficients ode_coefficients(const RewardMatrix& M, const PullProbabilities& p, double delta)
{
    require_two_by_two(M);
    OdeCoefficients k;
    k.a = p(1, 0) * M(1, 0);
    k.b = p(0, 0) * M(0, 0) - p(1, 1) * M(1, 1);
    k.c = p(0, 1) * M(0, 1);
    k.delta = delta;
    return k;
}

double ode_rhs(double d1, double t, const OdeCoefficients& k)
{
    const double d2 = 1.0 - d1;
    const double drift = k.a * d2 * d2 + k.b * d1 * d2 - k.c * d1 * d1;
    return k.delta / (k.delta + std::sqrt(t)) * drift;
}

double expected_increment(double d1, double t, const RewardMatrix& M, const PullProbabilities& p, double delta)
{
    require_two_by_two(M);
    const double step = delta / std::sqrt(t);
    const double d2 = 1.0 - d1;
    const double up = d1 * p(0, 0) * M(0, 0) + d2 * p(1, 0) * M(1, 0);
    const double down = d1 * p(0, 1) * M(0, 1) + d2 * p(1, 1) * M(1, 1);
    return step / (1.0 + step) * (d2 * up - d1 * down);
}

MeanFieldTrajectory integrate_rk4(const std::function<double(double, double)>& rhs, double y0, double t0,
                                  double t_end, double h, double lower, double upper)
{
    if (!(h > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "step size must be positive");
    }
    if (!(t_end >= t0)) {
        throw Error(ErrorCode::InvalidParameter, "integration end precedes start");
    }
    // Tolerate grids where (t_end - t0) / h is an integer up to rounding.
    const auto steps = static_cast<std::size_t>(std::ceil((t_end - t0) / h - 1e-9));

    MeanFieldTrajectory out;
    out.times.reserve(steps + 1);
    out.d1_values.reserve(steps + 1);
    double y = std::clamp(y0, lower, upper);
    out.times.push_back(t0);
    out.d1_values.push_back(y);

    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        const double t_next = (k + 1 == steps) ? t_end : t0 + static_cast<double>(k + 1) * h;
        const double dt = t_next - t;
        const double k1 = rhs(t, y);
        const double k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
        const double k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
        const double k4 = rhs(t_next, y + dt * k3);
        y = std::clamp(y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), lower, upper);
        out.times.push_back(t_next);
        out.d1_values.push_back(y);
    }
    return out;
}

MeanFieldTrajectory integrate(const OdeCoefficients& coeffs, double d1_0, double t0, double t_end, double h)
{
    if (!(d1_0 >= 0.0 && d1_0 <= 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "initial d1 must be in [0,1]");
    }
    if (!(t0 >= 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "integration starts at t >= 1");
    }
    return integrate_rk4([&](double t, double y) { return ode_rhs(y, t, coeffs); }, d1_0, t0, t_end, h);
}

MeanFieldReport mean_field_comparison(const PullProbabilities& p, const RewardMatrix& M,
                                      const MeanFieldSettings& settings)
{
    require_two_by_two(M);
    if (settings.horizon < 1 || settings.runs < 1 || settings.ode_substeps < 1) {
        throw Error(ErrorCode::InvalidParameter, "mean-field comparison needs horizon, runs and substeps >= 1");
    }
    const EvolutionParams evolution{settings.delta, true};
    evolution.check();
    const PopulationDistribution start({settings.d1_0, 1.0 - settings.d1_0});
    const auto horizon = static_cast<std::size_t>(settings.horizon);

    auto simulate = [&](std::size_t run) {
        RandomStream rng(settings.seed, StreamDomain::MeanField, {run});
        std::vector<double> d1(horizon);
        PopulationDistribution d = start;
        for (std::size_t k = 0; k < horizon; ++k) {
            const auto t = static_cast<long long>(k + 1);
            d1[k] = d[0];
            const std::size_t context = sample_context(d, rng);
            const std::size_t arm = rng.uniform() < p(context, 0) ? 0 : 1;
            const int reward = sample_reward(M, context, arm, rng);
            d = evolve(d, arm, reward, t, evolution);
        }
        return d1;
    };

    // Fixed-size blocks keep the summation order independent of thread count.
    constexpr std::size_t kBlock = 64;
    std::vector<double> sum(horizon, 0.0);
    for (std::size_t first = 0; first < settings.runs; first += kBlock) {
        const std::size_t count = std::min(kBlock, settings.runs - first);
        std::vector<std::vector<double>> block(count);
        parallel_for(count, settings.threads, [&](std::size_t k) { block[k] = simulate(first + k); });
        for (const auto& run : block) {
            for (std::size_t k = 0; k < horizon; ++k) sum[k] += run[k];
        }
    }

    MeanFieldReport report;
    report.times.resize(horizon);
    report.simulated.resize(horizon);
    const auto runs = static_cast<double>(settings.runs);
    for (std::size_t k = 0; k < horizon; ++k) {
        report.times[k] = static_cast<double>(k + 1);
        report.simulated[k] = sum[k] / runs;
    }

    const auto coeffs = ode_coefficients(M, p, settings.delta);
    const auto trajectory = integrate(coeffs, settings.d1_0, 1.0, static_cast<double>(settings.horizon),
                                      1.0 / settings.ode_substeps);
    report.ode.resize(horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
        report.ode[k] = trajectory.d1_values[k * static_cast<std::size_t>(settings.ode_substeps)];
        report.sup_gap = std::max(report.sup_gap, std::abs(report.simulated[k] - report.ode[k]));
    }
    return report;
}

}  // namespace ecb
