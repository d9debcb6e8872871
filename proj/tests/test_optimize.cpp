#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sirate/bounds.hpp"
#include "sirate/format.hpp"
#include "sirate/optimize.hpp"
#include "test_support.hpp"

using namespace sirate;
using testsup::Rng;

namespace {

JointSourcePmf binary_copy_source() { // Y = X
    JointSourcePmf q;
    q.t = 1;
    q.alphabet_sizes = {2, 2};
    q.probs = {0.5, 0.0, 0.0, 0.5};
    return q;
}

JointSourcePmf binary_blind_source() { // |Y| = 1
    JointSourcePmf q;
    q.t = 1;
    q.alphabet_sizes = {2, 1};
    q.probs = {0.5, 0.5};
    return q;
}

JointSourcePmf dsbs(double alpha) {
    JointSourcePmf q;
    q.t = 1;
    q.alphabet_sizes = {2, 2};
    q.probs = {0.5 * (1 - alpha), 0.5 * alpha, 0.5 * alpha, 0.5 * (1 - alpha)};
    return q;
}

SearchConfig quick(Engine engine, std::uint64_t seed = 1) {
    SearchConfig cfg;
    cfg.engine = engine;
    cfg.seed = seed;
    cfg.restarts = 6;
    cfg.max_sweeps = 120;
    cfg.grid_steps = 16;
    return cfg;
}

} // namespace

TEST_CASE("perfect side information needs no rate at zero distortion") {
    const auto q = binary_copy_source();
    const auto measures = testsup::hamming_measures(1, 2);
    const DistortionVector d{{0.0}};
    for (Engine e : {Engine::Grid, Engine::Descent}) {
        auto cfg = quick(e);
        cfg.aux_sizes = {2};
        const auto r = minimize_sum_rate(q, d, measures, canonical_list(1), cfg);
        REQUIRE(r.feasible);
        CHECK(r.value <= 1e-9);
        CHECK(check_P2(r.best, d, measures).pass);
    }
}

TEST_CASE("blind lossless coding of a fair bit costs one bit") {
    const auto q = binary_blind_source();
    const auto measures = testsup::hamming_measures(1, 2);
    const DistortionVector d{{0.0}};
    for (Engine e : {Engine::Grid, Engine::Descent}) {
        auto cfg = quick(e);
        cfg.aux_sizes = {2};
        const auto r = minimize_sum_rate(q, d, measures, canonical_list(1), cfg);
        REQUIRE(r.feasible);
        CHECK(r.value == Catch::Approx(1.0).margin(e == Engine::Grid ? 1e-9 : 1e-3));
    }
}

TEST_CASE("descent tracks the grid oracle on the symmetric binary source") {
    const auto q = dsbs(0.1);
    const auto measures = testsup::hamming_measures(1, 2);
    const SubsetList v = canonical_list(1);
    for (double dval : {0.0, 0.05}) {
        const DistortionVector d{{dval}};
        auto gcfg = quick(Engine::Grid);
        gcfg.aux_sizes = {3};
        gcfg.grid_steps = 16;
        const auto oracle = minimize_sum_rate(q, d, measures, v, gcfg);
        auto dcfg = quick(Engine::Descent);
        dcfg.aux_sizes = {3};
        const auto got = minimize_sum_rate(q, d, measures, v, dcfg);
        REQUIRE(oracle.feasible);
        REQUIRE(got.feasible);
        CHECK(std::abs(got.value - oracle.value) <= 7e-3);
    }
}

TEST_CASE("oracle values are monotone in the distortion target") {
    const auto q = dsbs(0.1);
    const auto measures = testsup::hamming_measures(1, 2);
    const SubsetList v = canonical_list(1);
    auto cfg = quick(Engine::Grid);
    cfg.aux_sizes = {3};
    cfg.grid_steps = 16;
    double prev = 1e18;
    for (double dval : {0.0, 0.05, 0.1, 0.3}) {
        const auto r = minimize_sum_rate(q, DistortionVector{{dval}}, measures, v, cfg);
        REQUIRE(r.feasible);
        CHECK(r.value <= prev + 1e-9);
        prev = r.value;
    }
}

TEST_CASE("an unreachable target with a pinned degenerate auxiliary is reported") {
    const auto q = binary_blind_source();
    const auto measures = testsup::hamming_measures(1, 2);
    auto cfg = quick(Engine::Descent);
    cfg.aux_sizes = {1}; // nothing can be conveyed
    const auto r = minimize_sum_rate(q, DistortionVector{{0.0}}, measures, canonical_list(1), cfg);
    CHECK_FALSE(r.feasible);
    CHECK_FALSE(r.message.empty());
}

TEST_CASE("relaxed targets are carried by the degenerate restart") {
    const auto q = binary_blind_source();
    const auto measures = testsup::hamming_measures(1, 2);
    auto cfg = quick(Engine::Descent);
    cfg.aux_sizes = {2};
    const auto r = minimize_sum_rate(q, DistortionVector{{0.6}}, measures, canonical_list(1), cfg);
    REQUIRE(r.feasible);
    CHECK(r.value <= 1e-9);
}

TEST_CASE("worst-case functional is driven to zero when seeded with the reference channel") {
    const AuxSystem seed_sys = counterexample_instance();
    const auto measures = testsup::hamming_measures(3, 3);
    SearchConfig cfg = quick(Engine::Descent);
    cfg.aux_sizes = seed_sys.aux_sizes;
    cfg.init_channel = seed_sys.channel;
    cfg.restarts = 1;
    cfg.max_sweeps = 2;
    const auto r = minimize_worst_case(seed_sys.source, DistortionVector{{0.0, 0.0, 0.0}},
                                       measures, cfg);
    REQUIRE(r.feasible);
    CHECK(r.value <= 1e-9);
}

TEST_CASE("both functionals share the single-decoder optimum") {
    const auto q = dsbs(0.2);
    const auto measures = testsup::hamming_measures(1, 2);
    const DistortionVector d{{0.05}};
    auto cfg = quick(Engine::Grid);
    cfg.aux_sizes = {3};
    cfg.grid_steps = 12;
    const auto a = minimize_sum_rate(q, d, measures, canonical_list(1), cfg);
    const auto b = minimize_worst_case(q, d, measures, cfg);
    REQUIRE(a.feasible);
    REQUIRE(b.feasible);
    CHECK(a.value == Catch::Approx(b.value).margin(1e-9));
}

TEST_CASE("boundary tracing recovers the first-channel minimum and dominates the oracle") {
    Rng rng(71);
    const auto q = testsup::random_degraded_source(2, {2, 2, 2}, rng);
    const auto measures = testsup::hamming_measures(2, 2);
    const SubsetList v = canonical_list(2);
    const std::vector<int> sizes = testsup::chain_sizes(v, 2);
    const DistortionVector d{{0.3, 0.2}};

    std::vector<std::vector<double>> weights{{1.0, 0.0}, {1.0, 1.0}};
    auto gcfg = quick(Engine::Grid);
    gcfg.aux_sizes = sizes;
    gcfg.grid_steps = 8;
    const auto oracle = trace_inner_boundary(q, d, measures, v, weights, gcfg);
    auto dcfg = quick(Engine::Descent);
    dcfg.aux_sizes = sizes;
    const auto got = trace_inner_boundary(q, d, measures, v, weights, dcfg);
    REQUIRE(oracle.size() == got.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        double wo = 0.0, wg = 0.0;
        for (std::size_t l = 0; l < 2; ++l) {
            wo += weights[i][l] * oracle[i].prefix_bounds[l];
            wg += weights[i][l] * got[i].prefix_bounds[l];
        }
        CHECK(wg <= wo + 5e-3);
        RateRegion region;
        region.t = 2;
        region.prefix_bounds = got[i].prefix_bounds;
        CHECK(region.contains(got[i].rates, 1e-9));
    }
}

TEST_CASE("tracing far beyond the blind distortion returns the origin") {
    const auto q = binary_blind_source();
    const auto measures = testsup::hamming_measures(1, 2);
    auto cfg = quick(Engine::Descent);
    cfg.aux_sizes = {2};
    std::vector<std::vector<double>> weights{{1.0}};
    const auto pts = trace_inner_boundary(q, DistortionVector{{0.9}}, measures, canonical_list(1),
                                          weights, cfg);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].rates[0] <= 1e-9);
}

TEST_CASE("weight validation") {
    const auto q = binary_blind_source();
    const auto measures = testsup::hamming_measures(1, 2);
    auto cfg = quick(Engine::Descent);
    cfg.aux_sizes = {2};
    std::vector<std::vector<double>> zero{{0.0}};
    CHECK_THROWS_AS(trace_inner_boundary(q, DistortionVector{{0.5}}, measures, canonical_list(1),
                                         zero, cfg),
                    std::invalid_argument);
    std::vector<std::vector<double>> negative{{-1.0}};
    CHECK_THROWS_AS(trace_inner_boundary(q, DistortionVector{{0.5}}, measures, canonical_list(1),
                                         negative, cfg),
                    std::invalid_argument);
}

TEST_CASE("identical seeds reproduce identical twelve-digit results") {
    const auto q = dsbs(0.15);
    const auto measures = testsup::hamming_measures(1, 2);
    const DistortionVector d{{0.05}};
    auto cfg = quick(Engine::Descent, 42);
    cfg.aux_sizes = {3};
    const auto a = minimize_sum_rate(q, d, measures, canonical_list(1), cfg);
    const auto b = minimize_sum_rate(q, d, measures, canonical_list(1), cfg);
    REQUIRE(a.feasible);
    REQUIRE(b.feasible);
    CHECK(format_significant(a.value) == format_significant(b.value));
    CHECK(a.best.channel == b.best.channel);
}

TEST_CASE("grid engine refuses oversized grids") {
    const auto q = dsbs(0.1);
    const auto measures = testsup::hamming_measures(1, 2);
    auto cfg = quick(Engine::Grid);
    cfg.aux_sizes = {6};
    cfg.grid_steps = 64;
    cfg.grid_cap = 1000;
    CHECK_THROWS_AS(minimize_sum_rate(q, DistortionVector{{0.1}}, measures, canonical_list(1), cfg),
                    std::invalid_argument);
}

TEST_CASE("default cardinalities follow the per-t rules") {
    CHECK(default_aux_sizes(canonical_list(1), 3) == std::vector<int>{4});
    const auto two = default_aux_sizes(canonical_list(2), 2);
    CHECK(two == std::vector<int>{7, 15, 15});
    const auto three = default_aux_sizes(canonical_list(3), 2);
    for (int s : three) CHECK(s == 2);
    const auto chain = degraded_chain_aux_sizes(canonical_list(2), 2);
    CHECK(chain[0] > 1);
    CHECK(chain[1] == 1);
    CHECK(chain[2] > 1);
}
