#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sirate/typicality.hpp"
#include "test_support.hpp"

using namespace sirate;

TEST_CASE("constant sequences are typical for point masses") {
    const Sequence s(16, 1);
    const std::vector<double> pmf{0.0, 1.0};
    CHECK(is_typical(s, pmf, 0.0));
    CHECK(is_typical(s, pmf, 0.5));
}

TEST_CASE("exact frequencies pass at zero tolerance") {
    const Sequence s{0, 0, 1, 1};
    const std::vector<double> pmf{0.5, 0.5};
    CHECK(is_typical(s, pmf, 0.0));
}

TEST_CASE("a skewed word misses the band") {
    const Sequence s{0, 0, 0, 1};
    const std::vector<double> pmf{0.5, 0.5};
    // |3/4 - 1/2| = 1/4 > 0.2 * 1/2
    CHECK_FALSE(is_typical(s, pmf, 0.2));
}

TEST_CASE("zero-mass letters forbid any occurrence") {
    const Sequence s{0, 0, 2, 0};
    const std::vector<double> pmf{1.0, 0.0, 0.0};
    CHECK_FALSE(is_typical(s, pmf, 0.9));
}

TEST_CASE("joint typicality counts pairs") {
    JointPmf ref({2, 2}, {0.5, 0.0, 0.0, 0.5});
    const Sequence a{0, 1, 0, 1};
    const Sequence b_same{0, 1, 0, 1};
    const Sequence b_diff{0, 1, 1, 1};
    std::vector<std::span<const std::uint8_t>> same{a, b_same};
    std::vector<std::span<const std::uint8_t>> diff{a, b_diff};
    CHECK(is_jointly_typical(same, ref, 0.05));
    CHECK_FALSE(is_jointly_typical(diff, ref, 0.05));
    const Sequence shorter{0, 1};
    std::vector<std::span<const std::uint8_t>> bad{a, shorter};
    CHECK_THROWS_AS(is_jointly_typical(bad, ref, 0.1), std::invalid_argument);
}

TEST_CASE("smallest positive mass") {
    CHECK(mu_of(JointPmf({2}, {0.5, 0.5})) == 0.5);
    CHECK(mu_of(JointPmf({3}, {0.7, 0.0, 0.3})) == Catch::Approx(0.3));
}

TEST_CASE("source-typicality bound decays with blocklength") {
    JointPmf p({2}, {0.5, 0.5});
    // closed form: 2 |X| exp(-n eps^2 mu)
    CHECK(delta1_bound(10000, 0.1, p) ==
          Catch::Approx(4.0 * std::exp(-10000 * 0.01 * 0.5)).margin(1e-18));
    CHECK(delta1_bound(10000, 0.1, p) < 1e-3);
    CHECK_THROWS_AS(delta1_bound(100, 0.0, p), std::invalid_argument);
}

TEST_CASE("conditional bound is vacuous at equal tolerances") {
    JointPmf p({2, 2}, {0.25, 0.25, 0.25, 0.25});
    CHECK(delta2_bound(500, 0.1, 0.1, p) == Catch::Approx(2.0 * 4.0));
    CHECK(delta2_bound(500, 0.05, 0.1, p) <
          2.0 * 4.0 * std::exp(-500 * 0.0025 * 0.25 / 1.05) + 1e-12);
    CHECK_THROWS_AS(delta2_bound(500, 0.2, 0.1, p), std::invalid_argument);
}

TEST_CASE("default schedules strictly increase and have one entry per stage") {
    for (int t = 1; t <= 3; ++t) {
        const auto s = EpsilonSchedule::defaults(t, 0.05);
        CHECK(s.eps.size() == (std::size_t{1} << t) + 1);
        s.require_monotone();
        CHECK(s.eps.front() == Catch::Approx(0.05));
        CHECK(s.eps.back() == Catch::Approx(0.10));
    }
}

TEST_CASE("broken schedules are rejected") {
    EpsilonSchedule s;
    s.eps = {0.05, 0.05, 0.06};
    CHECK_THROWS_AS(s.require_monotone(), std::invalid_argument);
    s.eps = {0.0, 0.05, 0.06};
    CHECK_THROWS_AS(s.require_monotone(), std::invalid_argument);
}

TEST_CASE("bound validity check compares the last tolerance to mu") {
    EpsilonSchedule s;
    s.eps = {0.05, 0.075, 0.1};
    CHECK(s.within_bound_validity(0.25));
    CHECK_FALSE(s.within_bound_validity(0.05));
}
