#include <random>

#include <gtest/gtest.h>

#include "kflat/core.hpp"
#include "oracles.hpp"

using namespace kflat;

namespace {

Rational R(const char* s) { return Rational::parse(s); }

Box box(std::initializer_list<std::pair<const char*, const char*>> sides) {
    std::vector<Interval> out;
    for (auto [lo, hi] : sides) out.emplace_back(R(lo), R(hi));
    return Box(std::move(out));
}

AxisFlat flat(std::size_t d, std::map<std::size_t, Rational> fixed) { return AxisFlat(d, std::move(fixed)); }

}  // namespace

TEST(Rational, ParsesFractionsIntegersAndDecimals) {
    EXPECT_EQ(R("2/4").to_string(), "1/2");
    EXPECT_EQ(R("-6/3").to_string(), "-2");
    EXPECT_EQ(R("0.1"), R("1/10"));
    EXPECT_EQ(R("-0.125"), R("-1/8"));
    EXPECT_EQ(R(".5"), R("1/2"));
    EXPECT_EQ(R("+7"), Rational(7));
    EXPECT_THROW(R("1/0"), ParseError);
    EXPECT_THROW(R("1e3"), ParseError);
    EXPECT_THROW(R("abc"), ParseError);
    EXPECT_THROW(R(""), ParseError);
    EXPECT_THROW(R("1/-2"), ParseError);
}

TEST(Rational, ExactArithmetic) {
    EXPECT_EQ(R("1/3") + R("1/6"), R("1/2"));
    EXPECT_EQ(R("1/3") * R("3"), Rational(1));
    EXPECT_EQ(Rational::pow2(-5), R("1/32"));
    EXPECT_EQ(Rational::pow2(3), Rational(8));
    EXPECT_LT(R("-1/8"), R("-1/16"));
    EXPECT_EQ(R("1/3").to_decimal(4), "0.3333");
    EXPECT_EQ(R("-5/4").to_decimal(2), "-1.25");
    EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
}

TEST(Interval, RejectsReversedBounds) {
    EXPECT_THROW(Interval(Rational(2), Rational(1)), std::invalid_argument);
    EXPECT_NO_THROW(Interval(Rational(1), Rational(1)));
}

TEST(Stabs, Examples) {
    EXPECT_TRUE(stabs(flat(2, {{1, Rational(5)}}), box({{"4", "6"}, {"0", "1"}})));
    EXPECT_TRUE(stabs(flat(2, {{1, Rational(6)}}), box({{"6", "7"}, {"0", "1"}})));
    auto point = flat(2, {{1, Rational(2)}, {2, Rational(3)}});
    EXPECT_TRUE(stabs(point, box({{"1", "2"}, {"3", "4"}})));
    EXPECT_FALSE(stabs(point, box({{"1", "2"}, {"4", "5"}})));
    EXPECT_THROW(stabs(flat(3, {}), box({{"0", "1"}})), DimensionMismatch);
}

TEST(OverlapAxes, Examples) {
    auto unit = box({{"0", "1"}, {"0", "1"}});
    EXPECT_EQ(overlap_axes(unit, box({{"0", "1"}, {"5", "6"}})), (std::vector<std::size_t>{1}));
    EXPECT_EQ(overlap_axes(unit, unit), (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(overlap_axes(unit, box({{"1", "2"}, {"3", "4"}})), (std::vector<std::size_t>{1}));
    EXPECT_THROW(overlap_axes(unit, box({{"0", "1"}})), DimensionMismatch);
}

TEST(CoStabbable, Examples) {
    auto unit = box({{"0", "1"}, {"0", "1"}});
    auto w = co_stabbable(unit, box({{"0", "1"}, {"5", "6"}}), 1);
    ASSERT_TRUE(w);
    EXPECT_EQ(*w, flat(2, {{1, Rational(1)}}));

    EXPECT_FALSE(co_stabbable(unit, box({{"2", "3"}, {"4", "5"}}), 1));

    auto p = co_stabbable(box({{"0", "2"}, {"0", "2"}}), box({{"1", "3"}, {"1", "3"}}), 0);
    ASSERT_TRUE(p);
    EXPECT_EQ(*p, flat(2, {{1, Rational(2)}, {2, Rational(2)}}));

    EXPECT_THROW(co_stabbable(unit, unit, 2), std::invalid_argument);
    EXPECT_THROW(co_stabbable(unit, unit, -1), std::invalid_argument);
}

TEST(Contains, Examples) {
    auto unit = box({{"0", "1"}, {"0", "1"}});
    EXPECT_TRUE(contains(unit, box({{"1/4", "1/2"}, {"1/4", "1/2"}})));
    EXPECT_TRUE(contains(unit, unit));
    EXPECT_FALSE(contains(box({{"0", "1"}}), box({{"0", "2"}})));
}

TEST(Slice, Examples) {
    auto b = box({{"0", "2"}, {"3", "4"}, {"5", "6"}});
    EXPECT_EQ(slice(b, 1, Rational(1)), box({{"3", "4"}, {"5", "6"}}));
    EXPECT_FALSE(slice(b, 1, Rational(7)));
    EXPECT_EQ(slice(b, 2, Rational(3)), box({{"0", "2"}, {"5", "6"}}));
    EXPECT_THROW(slice(b, 4, Rational(0)), std::out_of_range);
    EXPECT_THROW(slice(box({{"0", "1"}}), 1, Rational(0)), std::invalid_argument);
}

TEST(LiftFlat, Examples) {
    EXPECT_EQ(lift_flat(flat(2, {{1, Rational(3)}}), 1, Rational(1)), flat(3, {{1, Rational(1)}, {2, Rational(3)}}));
    EXPECT_EQ(lift_flat(flat(2, {}), 2, Rational(0)), flat(3, {{2, Rational(0)}}));
    EXPECT_EQ(lift_flat(flat(2, {{2, Rational(5)}}), 2, Rational(4)), flat(3, {{2, Rational(4)}, {3, Rational(5)}}));
    EXPECT_THROW(lift_flat(flat(2, {}), 4, Rational(0)), std::out_of_range);
}

TEST(Strip, OrderAndContainment) {
    auto b = box({{"0", "1"}, {"0", "1"}});
    auto s = Strip({Interval(Rational(0), Rational(2)), std::nullopt});
    EXPECT_EQ(s.order(), 1);
    EXPECT_EQ(Strip::from_box(b).order(), 0);
    EXPECT_EQ(Strip::empty(2).order(), -1);
    EXPECT_TRUE(s.contains(b));
    EXPECT_TRUE(Strip::whole_space(2).contains(s));
    EXPECT_FALSE(Strip::empty(2).contains(b));
}

// ---------------------------------------------------------------------------
// Properties over random boxes

class CoreProperties : public ::testing::Test {
protected:
    std::mt19937_64 rng{20240501};
};

TEST_F(CoreProperties, CoStabbabilityMatchesGridOracle) {
    for (int trial = 0; trial < 400; ++trial) {
        std::size_t d = 1 + rng() % 3;
        auto f = oracle::random_family(rng, d, 2, 8);
        for (int k = 0; k < static_cast<int>(d); ++k) {
            auto w = co_stabbable(f[0], f[1], k);
            ASSERT_EQ(w.has_value(), oracle::share_flat(f[0], f[1], k));
            ASSERT_EQ(w.has_value(), co_stabbable(f[1], f[0], k).has_value());
            ASSERT_TRUE(co_stabbable(f[0], f[0], k));
            if (w) {
                EXPECT_TRUE(stabs(*w, f[0]));
                EXPECT_TRUE(stabs(*w, f[1]));
                EXPECT_EQ(w->fixed().size(), d - static_cast<std::size_t>(k));
                for (int k2 = k; k2 < static_cast<int>(d); ++k2) EXPECT_TRUE(co_stabbable(f[0], f[1], k2));
            }
        }
    }
}

TEST_F(CoreProperties, StabbingIsMonotoneUnderContainment) {
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t d = 1 + rng() % 3;
        auto f = oracle::random_family(rng, d, 2, 6);
        if (!contains(f[0], f[1])) continue;
        std::map<std::size_t, Rational> fixed;
        for (std::size_t a = 1; a <= d; ++a)
            if (rng() % 2) fixed.emplace(a, f[1].proj(a).lo());
        AxisFlat g(d, fixed);
        EXPECT_TRUE(!stabs(g, f[1]) || stabs(g, f[0]));
    }
}

TEST_F(CoreProperties, SliceLiftEquivalence) {
    for (int trial = 0; trial < 2000; ++trial) {
        std::size_t d = 2 + rng() % 3;
        auto f = oracle::random_family(rng, d, 1, 8);
        std::size_t axis = 1 + rng() % d;
        const auto& side = f[0].proj(axis);
        Rational value = side.lo() + (side.hi() - side.lo()) * Rational(mpz_class(static_cast<long>(rng() % 5)), mpz_class(4));
        auto sliced = slice(f[0], axis, value);
        ASSERT_TRUE(sliced);
        std::map<std::size_t, Rational> fixed;
        for (std::size_t a = 1; a < d; ++a)
            if (rng() % 2) fixed.emplace(a, Rational(mpz_class(static_cast<long>(rng() % 16)), mpz_class(2)));
        AxisFlat g(d - 1, fixed);
        EXPECT_EQ(stabs(g, *sliced), stabs(lift_flat(g, axis, value), f[0]));
    }
}
