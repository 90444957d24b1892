#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "ecb/environment.hpp"
#include "ecb/policies.hpp"

namespace ecb {

/// Stationary 2x2 pull probabilities: entry (i, j) is the probability of
/// pulling arm j when context i arrives. Rows sum to one.
class PullProbabilities {
public:
    using Grid = std::array<std::array<double, 2>, 2>;

    /// Throws InvalidParameter unless entries are in [0,1] and rows sum to 1.
    explicit PullProbabilities(const Grid& p);

    static PullProbabilities uniform();
    /// Pull pattern of a stationary oracle policy on a 2x2 matrix. Only the
    /// Oracle and Greedy-Oracle have one; other kinds throw InvalidParameter.
    static PullProbabilities of_policy(PolicyKind kind, const RewardMatrix& M);

    double operator()(std::size_t context, std::size_t arm) const noexcept { return p_[context][arm]; }

private:
    Grid p_;
};

struct OdeCoefficients {
    double a = 0.0;  // p21 * mu21
    double b = 0.0;  // p11 * mu11 - p22 * mu22
    double c = 0.0;  // p12 * mu12
    double delta = 0.0;
};

struct MeanFieldTrajectory {
    std::vector<double> times;
    std::vector<double> d1_values;
};

/// Throws DimensionError unless M is 2x2.
OdeCoefficients ode_coefficients(const RewardMatrix& M, const PullProbabilities& p, double delta);

/// d1' = delta / (delta + sqrt(t)) * [a (1-d1)^2 + b d1 (1-d1) - c d1^2]
double ode_rhs(double d1, double t, const OdeCoefficients& coeffs);

/// Exact one-step expectation E[d1(t+1) - d1(t)] of the stochastic update
/// under stationary pulls. Throws DimensionError unless M is 2x2.
double expected_increment(double d1, double t, const RewardMatrix& M, const PullProbabilities& p, double delta);

/// Classical fourth-order Runge-Kutta on the grid t0, t0 + h, ..., T (the
/// final step is shortened if h does not divide T - t0). State is clamped
/// to [lower, upper] after every step.
MeanFieldTrajectory integrate_rk4(const std::function<double(double t, double y)>& rhs, double y0, double t0,
                                  double t_end, double h, double lower = 0.0, double upper = 1.0);

/// Mean-field d1 trajectory; the result stays in [0, 1].
MeanFieldTrajectory integrate(const OdeCoefficients& coeffs, double d1_0, double t0, double t_end, double h = 1.0);

struct MeanFieldReport {
    double sup_gap = 0.0;
    std::vector<double> times;      // 1..T
    std::vector<double> simulated;  // mean d1(t) over runs
    std::vector<double> ode;        // RK4 solution at the same times
};

struct MeanFieldSettings {
    double delta = 0.01;
    double d1_0 = 0.5;
    long long horizon = 5000;
    std::size_t runs = 2000;
    std::uint64_t seed = 0;
    /// RK4 substeps per unit of time.
    int ode_substeps = 1;
    unsigned threads = 0;
};

/// Simulates `runs` independent 2x2 histories under fixed pull
/// probabilities, averages d1(t) pointwise and compares against the ODE.
MeanFieldReport mean_field_comparison(const PullProbabilities& p, const RewardMatrix& M,
                                      const MeanFieldSettings& settings);

}  // namespace ecb
