#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "kflat/construction.hpp"
#include "kflat/transversal.hpp"
#include "oracles.hpp"

using namespace kflat;

namespace {

Rational R(const char* s) { return Rational::parse(s); }

Box box(std::initializer_list<std::pair<const char*, const char*>> sides) {
    std::vector<Interval> out;
    for (auto [lo, hi] : sides) out.emplace_back(R(lo), R(hi));
    return Box(std::move(out));
}

Family three_boxes() {
    return Family(2, {box({{"0", "1"}, {"0", "1"}}), box({{"5", "6"}, {"0", "1"}}), box({{"0", "1"}, {"5", "6"}})});
}

}  // namespace

TEST(CanonicalFlats, RightEndpoints1D) {
    Family f(1, {box({{"0", "1"}}), box({{"2", "3"}})});
    auto flats = canonical_flats(f, 0);
    ASSERT_EQ(flats.size(), 2u);
    EXPECT_EQ(flats[0], AxisFlat(1, {{1, Rational(1)}}));
    EXPECT_EQ(flats[1], AxisFlat(1, {{1, Rational(3)}}));
}

TEST(CanonicalFlats, HyperplanesOfOneBox) {
    Family f(2, {box({{"0", "1"}, {"0", "1"}})});
    auto flats = canonical_flats(f, 1);
    ASSERT_EQ(flats.size(), 2u);
    EXPECT_EQ(flats[0], AxisFlat(2, {{1, Rational(1)}}));
    EXPECT_EQ(flats[1], AxisFlat(2, {{2, Rational(1)}}));
}

TEST(CanonicalFlats, EndpointGridIsDeduplicated) {
    Family f(2, {box({{"0", "1"}, {"0", "1"}}), box({{"0", "2"}, {"0", "3"}})});
    auto flats = canonical_flats(f, 0);
    std::vector<AxisFlat> want;
    for (int x : {1, 2})
        for (int y : {1, 3}) want.emplace_back(2, std::map<std::size_t, Rational>{{1, Rational(x)}, {2, Rational(y)}});
    EXPECT_EQ(flats, want);
    EXPECT_THROW(canonical_flats(f, 2), std::invalid_argument);
}

TEST(GreedyTransversal, Examples) {
    for (int k : {0, 1, 2}) {
        Family single(3, {box({{"0", "1"}, {"0", "1"}, {"0", "1"}})});
        EXPECT_EQ(greedy_transversal(single, k).size(), 1u);
    }
    Family f(1, {box({{"0", "1"}}), box({{"1/2", "2"}}), box({{"3", "4"}})});
    auto cert = greedy_transversal(f, 0);
    ASSERT_EQ(cert.size(), 2u);
    EXPECT_EQ(cert.flats[0], AxisFlat(1, {{1, Rational(1)}}));
    EXPECT_EQ(cert.flats[1], AxisFlat(1, {{1, Rational(4)}}));
    EXPECT_TRUE(verify_transversal(f, cert));

    for (std::size_t d : {1u, 2u})
        for (int k = 0; k < static_cast<int>(d); ++k)
            EXPECT_EQ(greedy_transversal(counterexample_family(1, d, 4), k).size(), 4u);
}

TEST(MinTransversal, Examples) {
    auto res = min_transversal(three_boxes(), 1);
    ASSERT_EQ(res.status, SolveStatus::optimal);
    EXPECT_EQ(res.cert.size(), 2u);
    EXPECT_TRUE(verify_transversal(three_boxes(), res.cert));

    Family common(2, {box({{"0", "2"}, {"0", "2"}}), box({{"1", "3"}, {"-1", "1"}}), box({{"1", "1"}, {"1", "5"}})});
    EXPECT_EQ(min_transversal(common, 0).cert.size(), 1u);

    auto cex = counterexample_family(1, 2, 4);
    auto r = min_transversal(cex, 0);
    EXPECT_EQ(r.status, SolveStatus::optimal);
    EXPECT_EQ(r.cert.size(), 4u);
}

TEST(MinTransversal, BudgetExhaustionIsReported) {
    std::mt19937_64 rng(7);
    // Find an instance that needs real search, then starve it.
    for (int trial = 0; trial < 200; ++trial) {
        auto f = oracle::random_family(rng, 2, 14, 10);
        auto full = min_transversal(f, 0);
        if (full.nodes < 5) continue;
        SolverLimits tiny;
        tiny.node_budget = 1;
        auto starved = min_transversal(f, 0, tiny);
        EXPECT_EQ(starved.status, SolveStatus::budget_exhausted);
        EXPECT_FALSE(starved.exact());
        EXPECT_TRUE(verify_transversal(f, starved.cert));
        EXPECT_GE(starved.cert.size(), full.cert.size());
        return;
    }
    GTEST_SKIP() << "no instance required search";
}

TEST(MinTransversal, OverCapFallsBackToGreedy) {
    // Greedy meets the packing bound here, so optimality is certified anyway.
    auto tight = counterexample_family(1, 2, 30);
    auto res = min_transversal(tight, 0);
    EXPECT_EQ(res.status, SolveStatus::optimal);
    EXPECT_EQ(res.cert.size(), 30u);

    std::mt19937_64 rng(3);
    std::size_t fallbacks = 0;
    for (int trial = 0; trial < 20; ++trial) {
        auto f = oracle::random_family(rng, 2, 40, 8);
        auto r = min_transversal(f, 0);
        EXPECT_TRUE(verify_transversal(f, r.cert));
        EXPECT_GE(r.cert.size(), r.lower_bound);
        if (r.status == SolveStatus::over_cap) ++fallbacks;
        else EXPECT_EQ(r.cert.size(), r.lower_bound);
    }
    EXPECT_GT(fallbacks, 0u);

    SolverLimits big;
    big.cap = 80;
    EXPECT_THROW(min_transversal(tight, 0, big), std::invalid_argument);
}

TEST(VerifyTransversal, RejectsBrokenCertificates) {
    auto f = three_boxes();
    auto cert = min_transversal(f, 1).cert;
    ASSERT_TRUE(verify_transversal(f, cert));

    auto missing = cert;
    missing.assignment.pop_back();
    auto v = verify_transversal(f, missing);
    EXPECT_FALSE(v);
    EXPECT_NE(v.message.find("box 3"), std::string::npos);

    auto thin = cert;
    thin.k = 0;  // flats now pin one axis fewer than d-k requires
    EXPECT_FALSE(verify_transversal(f, thin));

    auto wrong = cert;
    wrong.assignment[0] = wrong.assignment[1] == 0 ? 1 : 0;
    wrong.flats = {AxisFlat(2, {{1, Rational(100)}}), AxisFlat(2, {{2, Rational(100)}})};
    EXPECT_FALSE(verify_transversal(f, wrong));
}

TEST(IsTHeavy, Examples) {
    Family single(2, {box({{"0", "1"}, {"0", "1"}})});
    for (int k : {0, 1}) {
        auto r0 = is_t_heavy(single, k, 0);
        ASSERT_TRUE(r0.heavy);
        EXPECT_TRUE(*r0.heavy);
        auto r1 = is_t_heavy(single, k, 1);
        ASSERT_TRUE(r1.heavy);
        EXPECT_FALSE(*r1.heavy);
    }
    for (std::size_t d : {1u, 2u, 3u}) {
        auto rep = is_t_heavy(counterexample_family(1, d, 6), static_cast<int>(d) - 1, 5);
        ASSERT_TRUE(rep.heavy);
        EXPECT_TRUE(*rep.heavy);
    }
}

TEST(IsTHeavy, AgreesWithOracle) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 150; ++trial) {
        std::size_t d = 1 + rng() % 3;
        auto f = oracle::random_family(rng, d, 1 + rng() % 8);
        for (int k = 0; k < static_cast<int>(d); ++k) {
            auto tau = oracle::tau(f, k);
            for (std::size_t t = 0; t <= 4; ++t) {
                auto rep = is_t_heavy(f, k, t);
                ASSERT_TRUE(rep.heavy);
                EXPECT_EQ(*rep.heavy, tau > t);
                if (rep.tau) EXPECT_EQ(*rep.tau, tau);
            }
        }
    }
}

// ---------------------------------------------------------------------------

TEST(TransversalProperties, ExactSolverMatchesBruteForce) {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t d = 1 + rng() % 3;
        auto f = oracle::random_family(rng, d, 1 + rng() % 8);
        for (int k = 0; k < static_cast<int>(d); ++k) {
            auto res = min_transversal(f, k);
            ASSERT_EQ(res.status, SolveStatus::optimal);
            ASSERT_EQ(res.cert.size(), oracle::tau(f, k)) << "d=" << d << " k=" << k;
            ASSERT_TRUE(verify_transversal(f, res.cert));
            EXPECT_EQ(res.cert, min_transversal(f, k).cert);
        }
    }
}

TEST(TransversalProperties, GreedyWithinLogFactor) {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t d = 1 + rng() % 3;
        std::size_t n = 1 + rng() % 12;
        auto f = oracle::random_family(rng, d, n);
        for (int k = 0; k < static_cast<int>(d); ++k) {
            auto g = greedy_transversal(f, k);
            auto exact = min_transversal(f, k);
            ASSERT_TRUE(verify_transversal(f, g));
            ASSERT_TRUE(exact.exact());
            EXPECT_GE(g.size(), exact.cert.size());
            EXPECT_LE(static_cast<double>(g.size()),
                      (1.0 + std::log(static_cast<double>(n))) * static_cast<double>(exact.cert.size()));
        }
    }
}
