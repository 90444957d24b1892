#include <cmath>
#include <numeric>

#include <doctest.h>

#include "ecb/environment.hpp"
#include "ecb/error.hpp"

using namespace ecb;

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected ecb::Error");
    return ErrorCode::IoError;
}

PopulationDistribution random_distribution(std::size_t n, RandomStream& rng)
{
    std::vector<double> w(n);
    for (auto& v : w) v = rng.uniform() + 1e-3;
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) v /= s;
    // Pin the sum exactly by absorbing the rounding into the last entry.
    w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
    return PopulationDistribution(w);
}

}  // namespace

TEST_CASE("validate_matrix accepts the two-context reference matrix")
{
    const auto M = RewardMatrix::validate({{0.8, 0.4}, {0.2, 0.7}});
    CHECK(M.contexts() == 2);
    CHECK(M.arms() == 2);
    CHECK(M(0, 0) == 0.8);
    CHECK(M(1, 0) == 0.2);
}

TEST_CASE("validate_matrix rejects structural violations")
{
    CHECK(code_of([] { RewardMatrix::validate({{0.4, 0.8}, {0.2, 0.7}}); }) == ErrorCode::DiagonalNotMaximal);
    CHECK(code_of([] { RewardMatrix::validate({{0.7, 0.4}, {0.2, 0.8}}); }) == ErrorCode::RowsUnordered);
    CHECK(code_of([] { RewardMatrix::validate({{0.8, 1.2}, {0.2, 0.7}}); }) == ErrorCode::EntryOutOfRange);
    CHECK(code_of([] { RewardMatrix::validate({{0.8, -0.1}, {0.2, 0.7}}); }) == ErrorCode::EntryOutOfRange);
    CHECK(code_of([] { RewardMatrix::validate({{0.8}, {0.2}}); }) == ErrorCode::ShapeError);
    CHECK(code_of([] { RewardMatrix::validate({{0.8, 0.4}, {0.2}}); }) == ErrorCode::ShapeError);
    CHECK(code_of([] { RewardMatrix::validate({}); }) == ErrorCode::ShapeError);
    CHECK(code_of([] { RewardMatrix::validate({{0.8, std::nan("")}, {0.2, 0.7}}); }) == ErrorCode::EntryOutOfRange);
}

TEST_CASE("validate_matrix allows ties and extra arms")
{
    CHECK_NOTHROW(RewardMatrix::validate({{0.5, 0.5}, {0.5, 0.5}}));
    const auto M = RewardMatrix::validate({{0.9, 0.3, 0.9}, {0.1, 0.6, 0.2}});
    CHECK(M.arms() == 3);
    CHECK(M.at(1, 2) == 0.2);
    CHECK(code_of([&] { (void)M.at(2, 0); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("PopulationDistribution enforces the simplex")
{
    CHECK_NOTHROW(PopulationDistribution({0.25, 0.75}));
    CHECK(code_of([] { PopulationDistribution({0.5, 0.6}); }) == ErrorCode::InvalidDistribution);
    CHECK(code_of([] { PopulationDistribution({-0.1, 1.1}); }) == ErrorCode::InvalidDistribution);
    CHECK(code_of([] { PopulationDistribution(std::vector<double>{}); }) == ErrorCode::InvalidDistribution);
}

TEST_CASE("sample_context")
{
    RandomStream rng(11);
    SUBCASE("degenerate distribution")
    {
        const PopulationDistribution d({1.0, 0.0});
        for (int k = 0; k < 10000; ++k) REQUIRE(sample_context(d, rng) == 0);
        const PopulationDistribution e({0.0, 1.0});
        for (int k = 0; k < 10000; ++k) REQUIRE(sample_context(e, rng) == 1);
    }
    SUBCASE("even split within the 3-sigma binomial band")
    {
        const PopulationDistribution d({0.5, 0.5});
        const int draws = 1000000;
        int first = 0;
        for (int k = 0; k < draws; ++k) first += sample_context(d, rng) == 0;
        CHECK(std::abs(first / double(draws) - 0.5) < 0.002);
    }
    SUBCASE("skewed start")
    {
        const PopulationDistribution d({0.1, 0.9});
        const int draws = 1000000;
        int second = 0;
        for (int k = 0; k < draws; ++k) second += sample_context(d, rng) == 1;
        // 3 sigma = 3 * sqrt(0.09 / 1e6) = 0.0009
        CHECK(std::abs(second / double(draws) - 0.9) < 0.0009);
    }
    SUBCASE("consumes exactly one variate")
    {
        RandomStream a(5), b(5);
        const PopulationDistribution d({0.3, 0.3, 0.4});
        (void)sample_context(d, a);
        (void)b.uniform();
        CHECK(a.uniform() == b.uniform());
    }
}

TEST_CASE("sample_reward")
{
    const auto M = RewardMatrix::validate({{1.0, 0.7}, {0.0, 0.0}});
    RandomStream rng(12);
    for (int k = 0; k < 10000; ++k) {
        REQUIRE(sample_reward(M, 0, 0, rng) == 1);
        REQUIRE(sample_reward(M, 1, 1, rng) == 0);
    }
    const int draws = 1000000;
    long hits = 0;
    for (int k = 0; k < draws; ++k) hits += sample_reward(M, 0, 1, rng);
    CHECK(std::abs(hits / double(draws) - 0.7) < 0.0014);

    CHECK(code_of([&] { sample_reward(M, 2, 0, rng); }) == ErrorCode::IndexOutOfRange);
    CHECK(code_of([&] { sample_reward(M, 0, 2, rng); }) == ErrorCode::IndexOutOfRange);

    RandomStream a(9), b(9);
    (void)sample_reward(M, 0, 1, a);
    (void)b.uniform();
    CHECK(a.uniform() == b.uniform());
}

TEST_CASE("evolve direct evaluations")
{
    const EvolutionParams params{0.01, true};
    const PopulationDistribution half({0.5, 0.5});

    CHECK(evolve(half, 0, 0, 1, params) == half);
    CHECK(evolve(half, 1, 0, 77, params) == half);

    const auto up = evolve(half, 0, 1, 1, params);
    CHECK(up[0] == doctest::Approx(0.51 / 1.01).epsilon(1e-15));
    CHECK(up[1] == doctest::Approx(0.50 / 1.01).epsilon(1e-15));
    CHECK(up[0] == doctest::Approx(0.504950495049505).epsilon(1e-14));

    const auto skew = evolve(PopulationDistribution({0.1, 0.9}), 1, 1, 4, params);
    CHECK(skew[0] == doctest::Approx(0.1 / 1.005).epsilon(1e-15));
    CHECK(skew[1] == doctest::Approx(0.905 / 1.005).epsilon(1e-15));

    CHECK(code_of([&] { evolve(half, 0, 1, 0, params); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("evolve on arms without a context type")
{
    const PopulationDistribution half({0.5, 0.5});
    CHECK(code_of([&] { evolve(half, 2, 1, 3, EvolutionParams{0.01, true}); }) == ErrorCode::ArmHasNoContext);
    CHECK(evolve(half, 2, 1, 3, EvolutionParams{0.01, false}) == half);
    // Zero reward never touches d, even for such arms.
    CHECK(evolve(half, 2, 0, 3, EvolutionParams{0.01, true}) == half);
}

TEST_CASE("evolve properties over random inputs")
{
    RandomStream rng(2024);
    for (int trial = 0; trial < 20000; ++trial) {
        const std::size_t n = 1 + rng.index(6);
        const auto d = random_distribution(n, rng);
        const std::size_t j = rng.index(n);
        const long long t = 1 + static_cast<long long>(rng.index(100000));
        const EvolutionParams params{rng.uniform() * 0.5 + 1e-6, true};

        const auto same = evolve(d, j, 0, t, params);
        REQUIRE(same == d);

        const auto out = evolve(d, j, 1, t, params);
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            REQUIRE(out[k] >= 0.0);
            sum += out[k];
        }
        REQUIRE(std::abs(sum - 1.0) < 1e-12);
        if (d[j] < 1.0) REQUIRE(out[j] > d[j]);
        for (std::size_t k = 0; k < n; ++k) {
            if (k != j && d[k] > 0.0) REQUIRE(out[k] < d[k]);
        }

        // The increment shrinks with time.
        const auto later = evolve(d, j, 1, t + 1, params);
        if (d[j] < 1.0) REQUIRE(later[j] - d[j] < out[j] - d[j]);
    }
}

TEST_CASE("evolve keeps the simplex over a long chain")
{
    RandomStream rng(3);
    PopulationDistribution d({0.2, 0.3, 0.5});
    const EvolutionParams params{0.05, true};
    for (long long t = 1; t <= 200000; ++t) {
        d = evolve(d, rng.index(3), rng.uniform() < 0.5 ? 1 : 0, t, params);
    }
    const double sum = d[0] + d[1] + d[2];
    CHECK(std::abs(sum - 1.0) < 1e-12);
}
