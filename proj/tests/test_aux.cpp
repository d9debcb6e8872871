#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sirate/aux_system.hpp"
#include "test_support.hpp"

using namespace sirate;
using testsup::Rng;

namespace {

const double kLog2Three = std::log2(3.0);

AuxSystem degenerate_system(const JointSourcePmf& q) {
    AuxSystem sys;
    sys.v = canonical_list(q.t);
    sys.aux_sizes.assign(sys.v.count(), 1);
    sys.source = q;
    sys.channel.assign(q.x_size(), 1.0);
    return sys;
}

JointSourcePmf binary_copy_source() { // Y = X
    JointSourcePmf q;
    q.t = 1;
    q.alphabet_sizes = {2, 2};
    q.probs = {0.5, 0.0, 0.0, 0.5};
    return q;
}

} // namespace

TEST_CASE("degenerate channel induces the source times a point mass") {
    Rng rng(3);
    const auto q = testsup::random_source(2, {2, 2, 2}, rng);
    const AuxSystem sys = degenerate_system(q);
    REQUIRE(validate_system(sys).empty());
    const JointPmf joint = induce_joint(sys);
    REQUIRE(joint.cell.size() == q.probs.size());
    for (std::size_t i = 0; i < q.probs.size(); ++i)
        CHECK(joint.cell[i] == Catch::Approx(q.probs[i]).margin(1e-15));
}

TEST_CASE("induced joints always satisfy the auxiliary Markov chain") {
    Rng rng(17);
    for (int rep = 0; rep < 40; ++rep) {
        const auto q = testsup::random_source(2, {2, 2, 2}, rng);
        const SubsetList v = canonical_list(2);
        const AuxSystem sys = testsup::random_system(q, v, {2, 2, 2}, rng);
        const JointPmf joint = induce_joint(sys);
        VariableSet us, ys;
        for (int j = 0; j < sys.aux_count(); ++j) us.push_back(sys.aux_axis(j));
        for (int l = 1; l <= 2; ++l) ys.push_back(sys.y_axis(l));
        CHECK(conditional_mutual_information(joint, us, ys, {sys.x_axis()}) <= 1e-12);
    }
}

TEST_CASE("copy channel reveals the whole source") {
    const JointSourcePmf q = binary_copy_source();
    AuxSystem sys = degenerate_system(q);
    sys.aux_sizes[0] = 2; // single subset {1}
    sys.channel = {1.0, 0.0, 0.0, 1.0};
    const JointPmf joint = induce_joint(sys);
    CHECK(mutual_information(joint, {sys.x_axis()}, {sys.aux_axis(0)}) ==
          Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("counterexample instance validates and hits its landmark values") {
    const AuxSystem sys = counterexample_instance();
    REQUIRE(validate_system(sys).empty());
    const JointPmf joint = induce_joint(sys);
    const int x = sys.x_axis();
    const int u12 = *sys.axis_for_subset(0b011u);
    const int u13 = *sys.axis_for_subset(0b101u);
    const int u23 = *sys.axis_for_subset(0b110u);

    CHECK(entropy(joint, {x}) == Catch::Approx(kLog2Three).margin(1e-12));
    CHECK(mutual_information(joint, {x}, {u12}) <= 1e-12);
    CHECK(mutual_information(joint, {x}, {u13}) <= 1e-12);
    CHECK(mutual_information(joint, {x}, {u23}) <= 1e-12);
    CHECK(mutual_information(joint, {x}, {u12, u13}) ==
          Catch::Approx(kLog2Three).margin(1e-12));
}

TEST_CASE("counterexample reconstruction from any pair is lossless") {
    const AuxSystem sys = counterexample_instance();
    for (int l = 1; l <= 3; ++l) {
        const auto r = optimal_reconstruction(sys, l, hamming_measure(l, 3));
        CHECK(r.achieved <= 1e-15);
    }
}

TEST_CASE("identity reconstruction from perfect side information") {
    const JointSourcePmf q = binary_copy_source();
    const AuxSystem sys = degenerate_system(q);
    const auto r = optimal_reconstruction(sys, 1, hamming_measure(1, 2));
    CHECK(r.achieved <= 1e-15);
}

TEST_CASE("blind uniform ternary reconstruction loses two thirds") {
    JointSourcePmf q;
    q.t = 1;
    q.alphabet_sizes = {3, 1};
    q.probs = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    const AuxSystem sys = degenerate_system(q);
    const auto r = optimal_reconstruction(sys, 1, hamming_measure(1, 3));
    // brute force over the three constant reconstructions
    double best = 1e9;
    for (int c = 0; c < 3; ++c) {
        double v = 0.0;
        for (int x = 0; x < 3; ++x) v += q.probs[x] * (x == c ? 0.0 : 1.0);
        best = std::min(best, v);
    }
    CHECK(r.achieved == Catch::Approx(best).margin(1e-15));
    CHECK(best == Catch::Approx(2.0 / 3).margin(1e-15));
}

TEST_CASE("no single-entry perturbation of the argmin table lowers distortion") {
    Rng rng(23);
    for (int rep = 0; rep < 10; ++rep) {
        const auto q = testsup::random_source(1, {3, 2}, rng);
        const SubsetList v = canonical_list(1);
        const AuxSystem sys = testsup::random_system(q, v, {2}, rng);
        const auto measure = hamming_measure(1, 3);
        const JointPmf joint = induce_joint(sys);
        const LatticeSets lat = derive_sets(sys.v);
        const VariableSet domain = decoder_domain_axes(sys, lat, 1);
        auto r = optimal_reconstruction_on(joint, sys.x_axis(), domain, 1, measure);

        VariableSet with_x = r.fn.domain_axes;
        with_x.push_back(sys.x_axis());
        const JointPmf m = marginalize(joint, with_x);
        auto expected = [&](const std::vector<int>& table) {
            double total = 0.0;
            const int nx = sys.source.x_size();
            for (std::size_t tup = 0; tup < table.size(); ++tup)
                for (int x = 0; x < nx; ++x)
                    total += m.cell[tup * nx + x] * measure.at(x, table[tup]);
            return total;
        };
        REQUIRE(expected(r.fn.table) == Catch::Approx(r.achieved).margin(1e-12));
        for (std::size_t tup = 0; tup < r.fn.table.size(); ++tup)
            for (int alt = 0; alt < measure.recon_size; ++alt) {
                auto table = r.fn.table;
                table[tup] = alt;
                CHECK(expected(table) >= r.achieved - 1e-12);
            }
    }
}

TEST_CASE("check_P2 passes the counterexample at zero distortion") {
    const AuxSystem sys = counterexample_instance();
    const auto rep = check_P2(sys, DistortionVector{{0.0, 0.0, 0.0}},
                              testsup::hamming_measures(3, 3));
    CHECK(rep.pass);
    for (double a : rep.achieved) CHECK(a <= 1e-15);
}

TEST_CASE("blind decoders pass exactly above the constant-reconstruction level") {
    JointSourcePmf q;
    q.t = 1;
    q.alphabet_sizes = {2, 1};
    q.probs = {0.5, 0.5};
    const AuxSystem sys = degenerate_system(q);
    const auto measures = testsup::hamming_measures(1, 2);
    CHECK(check_P2(sys, DistortionVector{{0.5}}, measures).pass);
    CHECK_FALSE(check_P2(sys, DistortionVector{{0.0}}, measures).pass);
}

TEST_CASE("check_P2 is monotone in the distortion targets") {
    Rng rng(29);
    for (int rep = 0; rep < 20; ++rep) {
        const auto q = testsup::random_source(2, {2, 2, 2}, rng);
        const SubsetList v = canonical_list(2);
        const AuxSystem sys = testsup::random_system(q, v, {2, 1, 2}, rng);
        const auto measures = testsup::hamming_measures(2, 2);
        const auto d = testsup::achieved_targets(sys, measures);
        CHECK(check_P2(sys, d, measures).pass);
        DistortionVector higher = d;
        for (double& x : higher.d) x += 0.1;
        CHECK(check_P2(sys, higher, measures).pass);
    }
}

TEST_CASE("the counterexample channel violates the extra Markov constraint") {
    const AuxSystem sys = counterexample_instance();
    const int x = sys.x_axis();
    const int u123 = *sys.axis_for_subset(0b111u);
    const int u12 = *sys.axis_for_subset(0b011u);
    const int u13 = *sys.axis_for_subset(0b101u);
    CHECK_FALSE(check_markov_constraint(sys, {u13}, {x, u123}, {u12}, 1e-9));
    const JointPmf joint = induce_joint(sys);
    CHECK(conditional_mutual_information(joint, {u13}, {u12}, {x, u123}) ==
          Catch::Approx(kLog2Three).margin(1e-12));
}

TEST_CASE("degenerate third group always passes the Markov check") {
    const AuxSystem sys = counterexample_instance();
    const int u1 = *sys.axis_for_subset(0b001u);
    const int u13 = *sys.axis_for_subset(0b101u);
    CHECK(check_markov_constraint(sys, {u13}, {sys.x_axis()}, {u1}, 1e-12));
}

TEST_CASE("independent auxiliary components satisfy both extra chains") {
    // p(u12, u13, u23 | x) = p(u12|x) p(u13|x) p(u23|x)
    Rng rng(59);
    AuxSystem sys = counterexample_instance();
    std::vector<std::vector<double>> rows[3];
    for (auto& r : rows) {
        r.resize(3);
        for (int x = 0; x < 3; ++x) r[x] = testsup::random_simplex(3, rng);
    }
    for (int x = 0; x < 3; ++x)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c)
                    sys.channel[x * 27 + (a * 3 + b) * 3 + c] =
                        rows[0][x][a] * rows[1][x][b] * rows[2][x][c];
    REQUIRE(validate_system(sys).empty());
    const int x = sys.x_axis();
    const int u123 = *sys.axis_for_subset(0b111u);
    const int u12 = *sys.axis_for_subset(0b011u);
    const int u13 = *sys.axis_for_subset(0b101u);
    const int u23 = *sys.axis_for_subset(0b110u);
    CHECK(check_markov_constraint(sys, {u13}, {x, u123}, {u12}, 1e-9));
    CHECK(check_markov_constraint(sys, {u23}, {x, u123}, {u12, u13}, 1e-9));
}
