#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "ecb/error.hpp"
#include "ecb/harness.hpp"
#include "ecb/policies.hpp"

using namespace ecb;

namespace {

const RewardMatrix kFig1a = RewardMatrix::validate({{0.8, 0.4}, {0.2, 0.7}});
const RewardMatrix kFig1b = RewardMatrix::validate({{0.9, 0.6}, {0.5, 0.8}});

// Drives a policy through a real environment for `steps` steps and calls
// check(context, arm, t) after each choose.
template <typename Check>
void drive(Policy& policy, const RewardMatrix& M, long long steps, RandomStream& rng, Check check)
{
    PopulationDistribution d = PopulationDistribution::uniform(M.contexts());
    const EvolutionParams params{0.01, false};
    for (long long t = 1; t <= steps; ++t) {
        const auto i = sample_context(d, rng);
        const auto j = policy.choose(i, t, rng);
        check(i, j, t);
        const int r = sample_reward(M, i, j, rng);
        policy.observe(i, j, r, t);
        d = evolve(d, j, r, t, params);
    }
}

}  // namespace

TEST_CASE("thresholds and default horizon")
{
    CHECK(default_exploration_horizon(5000) == 70);
    CHECK(default_exploration_horizon(4900) == 70);
    CHECK(default_exploration_horizon(4899) == 69);
    CHECK(default_exploration_horizon(1) == 1);
    CHECK(log_threshold(3.0, 5000) == 26);  // 3 ln 5000 = 25.55
    CHECK(log_threshold(3.0, 1) == 0);
    CHECK(log_threshold(1.0, 3) == 2);
    CHECK_THROWS_AS(log_threshold(-1.0, 10), Error);
}

TEST_CASE("policy labels round-trip")
{
    for (auto kind : kAllPolicies) CHECK(parse_policy_kind(label(kind)) == kind);
    CHECK(parse_policy_kind("Greedy-Oracle") == PolicyKind::GreedyOracle);
    CHECK(parse_policy_kind("r-bae") == PolicyKind::RBAE);
    CHECK_THROWS_AS(parse_policy_kind("UCB"), Error);
}

TEST_CASE("counter bookkeeping")
{
    RejectionEliminationPolicy p(2, 2, 3);
    p.observe(0, 1, 1, 1);
    CHECK(p.counters().rewards(0, 1) == 1);
    CHECK(p.counters().rejections(0, 1) == 0);
    CHECK(p.counters().pulls(0, 1) == 1);
    p.observe(0, 1, 0, 2);
    CHECK(p.counters().rewards(0, 1) == 1);
    CHECK(p.counters().rejections(0, 1) == 1);
    CHECK(p.counters().pulls(0, 1) == 2);
    CHECK(p.counters().total_pulls() == 2);
    CHECK_THROWS_AS(p.observe(2, 0, 1, 3), Error);
}

TEST_CASE("oracle_choose")
{
    CHECK(oracle_choose(kFig1a) == 0);
    CHECK(oracle_choose(kFig1b) == 0);
    CHECK(oracle_choose(RewardMatrix::validate({{0.5, 0.5}, {0.5, 0.5}})) == 0);
    CHECK(oracle_choose(RewardMatrix::validate({{0.9, 0.1, 0.9}, {0.1, 0.5, 0.2}})) == 0);

    // mu11 is the global maximum of any valid matrix, so the lowest-index
    // column maximiser is always the first arm.
    RandomStream rng(31);
    for (int k = 0; k < 2000; ++k) {
        const std::size_t n = 1 + rng.index(4);
        REQUIRE(oracle_choose(random_matrix(n, n + rng.index(3), rng)) == 0);
    }

    OraclePolicy policy(kFig1a);

    CHECK(policy.choose(0, 1, rng) == 0);
    CHECK(policy.choose(1, 1, rng) == 0);
}

TEST_CASE("greedy_oracle_choose")
{
    CHECK(greedy_oracle_choose(kFig1a, 0) == 0);
    CHECK(greedy_oracle_choose(kFig1a, 1) == 1);
    CHECK_THROWS_AS(greedy_oracle_choose(kFig1a, 2), Error);

    RandomStream rng(77);
    for (int k = 0; k < 2000; ++k) {
        const std::size_t n = 1 + rng.index(4);
        const std::size_t m = n + rng.index(3);
        const auto M = random_matrix(n, m, rng);
        for (std::size_t i = 0; i < n; ++i) REQUIRE(greedy_oracle_choose(M, i) == i);
    }
}

TEST_CASE("REC explores uniformly up to tau")
{
    RecPolicy p(2, 2, 1000000);
    RandomStream rng(4);
    const int calls = 100000;
    int first = 0;
    for (int k = 0; k < calls; ++k) first += p.choose(0, 10, rng) == 0;
    CHECK(std::abs(first / double(calls) - 0.5) < 0.005);
}

TEST_CASE("REC commits to the reward argmax at tau")
{
    RandomStream rng(5);
    SUBCASE("clear winner")
    {
        RecPolicy p(1, 2, 19);
        long long t = 1;
        for (int k = 0; k < 12; ++k) p.observe(0, 0, 1, t++);
        for (int k = 0; k < 7; ++k) p.observe(0, 1, 1, t++);
        REQUIRE(p.committed_arm(0).has_value());
        CHECK(*p.committed_arm(0) == 0);
        CHECK(p.choose(0, 20, rng) == 0);
    }
    SUBCASE("second arm wins")
    {
        RecPolicy p(1, 2, 3);
        p.observe(0, 0, 0, 1);
        p.observe(0, 1, 1, 2);
        CHECK_FALSE(p.committed_arm(0).has_value());
        p.observe(0, 0, 1, 3);
        // R = [1, 1] at tau: tie goes to the lower index.
        CHECK(p.choose(0, 4, rng) == 0);
        // Later rewards do not move the commitment.
        for (long long t = 4; t < 40; ++t) p.observe(0, 1, 1, t);
        CHECK(p.choose(0, 40, rng) == 0);
    }
    SUBCASE("no rewards")
    {
        RecPolicy p(2, 2, 2);
        p.observe(1, 1, 0, 1);
        p.observe(1, 0, 0, 2);
        CHECK(p.choose(0, 3, rng) == 0);
        CHECK(p.choose(1, 3, rng) == 0);
    }
}

TEST_CASE("REC choice is constant after tau")
{
    RandomStream rng(6);
    for (int run = 0; run < 50; ++run) {
        RecPolicy p(2, 2, 70);
        std::vector<long long> seen(2, -1);
        drive(p, kFig1b, 3000, rng, [&](std::size_t i, std::size_t j, long long t) {
            if (t <= 70) return;
            if (seen[i] < 0) seen[i] = static_cast<long long>(j);
            REQUIRE(seen[i] == static_cast<long long>(j));
        });
    }
}

TEST_CASE("BE exploration picks the arm with fewest rewards")
{
    BalancedExplorationPolicy p(1, 2, 5);
    RandomStream rng(7);
    CHECK(p.choose(0, 1, rng) == 0);  // fresh: argmin of zeros
    long long t = 1;
    for (int k = 0; k < 5; ++k) p.observe(0, 0, 1, t++);
    for (int k = 0; k < 3; ++k) p.observe(0, 1, 1, t++);
    CHECK(p.exploring(0));
    CHECK(p.choose(0, t, rng) == 1);
    CHECK(p.tau(0) == t - 1);
}

TEST_CASE("BE exploitation uses the pull snapshot at tau")
{
    BalancedExplorationPolicy p(1, 2, 5);
    RandomStream rng(8);
    long long t = 1;
    for (int k = 0; k < 4; ++k) p.observe(0, 0, 0, t++);
    for (int k = 0; k < 9; ++k) p.observe(0, 1, 0, t++);
    for (int k = 0; k < 5; ++k) p.observe(0, 1, 1, t++);
    for (int k = 0; k < 5; ++k) p.observe(0, 0, 1, t++);
    // R = [5, 5], T = [9, 14]; the last step was still exploratory.
    CHECK_FALSE(p.exploring(0));
    CHECK(p.tau(0) == t - 1);
    CHECK(p.snapshot(0)[0] == 9);
    CHECK(p.snapshot(0)[1] == 14);
    CHECK(p.choose(0, t, rng) == 0);

    // Exploitation steps leave tau and the snapshot alone.
    const long long tau = p.tau(0);
    for (int k = 0; k < 20; ++k) p.observe(0, 0, 1, t++);
    CHECK(p.tau(0) == tau);
    CHECK(p.snapshot(0)[0] == 9);
    CHECK(p.choose(0, t, rng) == 0);
}

TEST_CASE("BE tau per context or shared")
{
    for (bool per_context : {false, true}) {
        BalancedExplorationPolicy p(2, 2, 1, per_context);
        p.observe(0, 0, 1, 1);
        p.observe(0, 1, 1, 2);  // context 0 done; snapshot row 0 = [1, 1]
        p.observe(0, 0, 1, 3);  // exploitation
        p.observe(0, 0, 1, 4);
        p.observe(1, 0, 0, 5);  // context 1 explores
        if (per_context) {
            CHECK(p.tau(0) == 2);
            CHECK(p.tau(1) == 5);
            CHECK(p.snapshot(0)[0] == 1);
        } else {
            CHECK(p.tau(0) == 5);
            CHECK(p.tau(1) == 5);
            CHECK(p.snapshot(0)[0] == 3);  // refreshed by context 1's exploration
        }
    }
}

TEST_CASE("BE exploit branch only after minR rewards on every arm")
{
    RandomStream rng(9);
    for (int run = 0; run < 30; ++run) {
        BalancedExplorationPolicy p(2, 2, log_threshold(3.0, 2000));
        drive(p, kFig1a, 2000, rng, [&](std::size_t i, std::size_t j, long long) {
            const auto r = p.counters().reward_row(i);
            const long long min_r = *std::min_element(r.begin(), r.end());
            if (p.exploring(i)) {
                REQUIRE(min_r < p.min_reward());
                REQUIRE(j == argmin_lowest(r));
            } else {
                REQUIRE(min_r >= p.min_reward());
                REQUIRE(j == argmin_lowest(p.snapshot(i)));
            }
        });
    }
}

TEST_CASE("RBAE samples uniformly from the active set")
{
    RejectionEliminationPolicy p(1, 2, 3);
    RandomStream rng(10);
    const int calls = 100000;
    int first = 0;
    for (int k = 0; k < calls; ++k) first += p.choose(0, 1, rng) == 0;
    CHECK(std::abs(first / double(calls) - 0.5) < 0.005);
}

TEST_CASE("RBAE eliminates arms past maxS rejections")
{
    RejectionEliminationPolicy p(2, 2, 3);
    RandomStream rng(11);
    long long t = 1;
    for (int k = 0; k < 2; ++k) p.observe(0, 1, 0, t++);
    for (int k = 0; k < 3; ++k) p.observe(0, 0, 0, t++);
    CHECK(p.active_set(0) == std::vector<std::size_t>{0, 1});  // S = [3, 2]: at the threshold, not past it
    p.observe(0, 0, 0, t++);                                    // S = [4, 2]
    CHECK(p.active_set(0) == std::vector<std::size_t>{1});
    CHECK(p.active_set(1) == std::vector<std::size_t>{0, 1});
    for (int k = 0; k < 1000; ++k) REQUIRE(p.choose(0, t, rng) == 1);
    // The survivor is never dropped, however often it is rejected.
    for (int k = 0; k < 50; ++k) p.observe(0, 1, 0, t++);
    CHECK(p.active_set(0) == std::vector<std::size_t>{1});
}

TEST_CASE("RBAE active sets shrink monotonically and stay non-empty")
{
    RandomStream rng(12);
    for (int run = 0; run < 100; ++run) {
        const std::size_t n = 1 + rng.index(3);
        const std::size_t m = n + rng.index(3);
        const auto M = random_matrix(n, m, rng);
        RejectionEliminationPolicy p(n, m, 1 + static_cast<long long>(rng.index(10)));
        std::vector<std::vector<std::size_t>> previous(n);
        for (std::size_t i = 0; i < n; ++i) previous[i] = p.active_set(i);
        drive(p, M, 1500, rng, [&](std::size_t i, std::size_t j, long long) {
            REQUIRE(std::find(previous[i].begin(), previous[i].end(), j) != previous[i].end());
            for (std::size_t c = 0; c < n; ++c) {
                const auto& now = p.active_set(c);
                REQUIRE_FALSE(now.empty());
                REQUIRE(std::includes(previous[c].begin(), previous[c].end(), now.begin(), now.end()));
                previous[c] = now;
            }
        });
    }
}

TEST_CASE("RBAE commits in every context before the horizon")
{
    // mu <= 0.9 everywhere, maxS = ceil(3 ln 5000) = 26.
    RandomStream rng(13);
    const long long horizon = 5000;
    int finished = 0;
    for (int run = 0; run < 1000; ++run) {
        auto raw = random_matrix(2, 2, rng).rows();
        for (auto& row : raw)
            for (auto& v : row) v *= 0.9;
        const auto M = RewardMatrix::validate(raw);
        RejectionEliminationPolicy p(2, 2, log_threshold(3.0, horizon));
        long long done_at = -1;
        drive(p, M, horizon, rng, [&](std::size_t, std::size_t, long long t) {
            if (done_at < 0 && p.active_set(0).size() == 1 && p.active_set(1).size() == 1) done_at = t;
        });
        finished += done_at > 0;
    }
    CHECK(finished == 1000);
}

TEST_CASE("pulls equal rewards plus rejections for every policy")
{
    RandomStream rng(14);
    for (auto kind : kAllPolicies) {
        for (int run = 0; run < 20; ++run) {
            const std::size_t n = 1 + rng.index(3);
            const std::size_t m = n + rng.index(2);
            const auto M = random_matrix(n, m, rng);
            PolicyParams params;
            params.horizon = 400;
            auto p = make_policy(kind, M, params);
            // Arbitrary interleaving, not tied to what the policy would choose.
            for (long long t = 1; t <= 400; ++t) {
                p->observe(rng.index(n), rng.index(m), rng.uniform() < 0.5, t);
            }
            long long total = 0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    const auto& c = p->counters();
                    REQUIRE(c.pulls(i, j) == c.rewards(i, j) + c.rejections(i, j));
                    REQUIRE(c.rewards(i, j) >= 0);
                    REQUIRE(c.rejections(i, j) >= 0);
                    total += c.pulls(i, j);
                }
            }
            REQUIRE(total == 400);
        }
    }
}

TEST_CASE("choose leaves counters untouched")
{
    RandomStream rng(15);
    for (auto kind : kAllPolicies) {
        auto p = make_policy(kind, kFig1a, PolicyParams{});
        p->observe(0, 1, 1, 1);
        for (int k = 0; k < 100; ++k) (void)p->choose(k % 2, 2 + k, rng);
        CHECK(p->counters().total_pulls() == 1);
    }
}
