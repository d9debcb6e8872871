#pragma once

//
// Auxiliary-variable systems: a conditional channel p(u_{S_1},...,u_{S_m} | x)
// on top of a source q(x, y*).
//
// The induced joint is q(x, y*) * channel(u* | x), so the chain
// (U*) -o- X -o- (Y*) holds by construction; invalid joints are not
// representable. Degenerate subsets carry size-1 alphabets and vanish from
// every information quantity.
//
// Induced-joint axis order: aux variables in list order first, then X, then
// Y_1 ... Y_t.
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "info.hpp"
#include "lattice.hpp"
#include "pmf.hpp"
#include "source.hpp"

namespace sirate {

struct AuxSystem {
    SubsetList v;
    std::vector<int> aux_sizes;   // |U_{S_j}| per j, size 1 = degenerate
    JointSourcePmf source;
    std::vector<double> channel;  // [x][u_1,...,u_m] row-major within each x slice

    int aux_count() const { return v.count(); }
    std::size_t aux_cells() const {
        std::size_t n = 1;
        for (int s : aux_sizes) n *= static_cast<std::size_t>(s);
        return n;
    }

    int aux_axis(int j) const { return j; }          // 0-based subset index
    int x_axis() const { return aux_count(); }
    int y_axis(int l) const { return aux_count() + l; } // l in 1..t

    std::optional<int> axis_for_subset(std::uint32_t mask) const {
        for (int j = 0; j < aux_count(); ++j)
            if (v.subsets[j] == mask) return aux_axis(j);
        return std::nullopt;
    }
};

inline std::vector<std::string> validate_system(const AuxSystem& sys) {
    std::vector<std::string> bad = validate_list(sys.v);
    for (const std::string& s : validate_source(sys.source)) bad.push_back("source: " + s);
    if (!bad.empty()) return bad;
    if (static_cast<int>(sys.aux_sizes.size()) != sys.v.count())
        bad.push_back("aux_sizes must match the subset list");
    for (int s : sys.aux_sizes)
        if (s < 1) bad.push_back("aux alphabet size < 1");
    if (!bad.empty()) return bad;
    const std::size_t cells = sys.aux_cells();
    if (sys.channel.size() != cells * sys.source.x_size()) {
        bad.push_back("channel has " + std::to_string(sys.channel.size()) + " entries, expected " +
                      std::to_string(cells * sys.source.x_size()));
        return bad;
    }
    for (int x = 0; x < sys.source.x_size(); ++x) {
        double sum = 0.0;
        for (std::size_t u = 0; u < cells; ++u) {
            const double p = sys.channel[x * cells + u];
            if (p < 0.0) bad.push_back("negative channel mass at x=" + std::to_string(x));
            sum += p;
        }
        if (std::abs(sum - 1.0) > kProbTol)
            bad.push_back("channel slice for x=" + std::to_string(x) + " does not sum to 1");
    }
    return bad;
}

/// Joint pmf over (U_{S_1}, ..., U_{S_m}, X, Y_1, ..., Y_t).
inline JointPmf induce_joint(const AuxSystem& sys) {
    const int m = sys.aux_count();
    const int t = sys.source.t;
    std::vector<int> sizes = sys.aux_sizes;
    sizes.insert(sizes.end(), sys.source.alphabet_sizes.begin(), sys.source.alphabet_sizes.end());
    JointPmf joint(sizes);

    const std::size_t ucells = sys.aux_cells();
    std::size_t ycells = 1;
    for (int l = 1; l <= t; ++l) ycells *= static_cast<std::size_t>(sys.source.y_size(l));
    const int nx = sys.source.x_size();

    for (std::size_t u = 0; u < ucells; ++u)
        for (int x = 0; x < nx; ++x) {
            const double pu = sys.channel[static_cast<std::size_t>(x) * ucells + u];
            if (pu == 0.0) continue;
            const std::size_t base = (u * nx + x) * ycells;
            const std::size_t qbase = static_cast<std::size_t>(x) * ycells;
            for (std::size_t y = 0; y < ycells; ++y)
                joint.cell[base + y] = pu * sys.source.probs[qbase + y];
        }
    (void)m;
    return joint;
}

/// Per-letter reconstruction for one decoder: a total function from a tuple
/// of induced-joint axes to a reconstruction symbol.
struct ReconstructionFunction {
    int decoder = 0;
    VariableSet domain_axes;       // ascending axis indices into the induced joint
    std::vector<int> domain_sizes;
    std::vector<int> table;        // row-major over domain tuples -> xhat

    std::size_t tuple_index(std::span<const int> tuple) const {
        std::size_t lin = 0;
        for (std::size_t k = 0; k < domain_sizes.size(); ++k)
            lin = lin * domain_sizes[k] + tuple[k];
        return lin;
    }
};

struct ReconstructionResult {
    ReconstructionFunction fn;
    double achieved = 0.0; // E[delta(X, Xhat)]
};

/// Pointwise-argmin reconstruction on an explicit domain. Ties break to the
/// smallest reconstruction index; zero-probability tuples map to index 0.
inline ReconstructionResult optimal_reconstruction_on(const JointPmf& joint, int x_axis,
                                                      const VariableSet& domain_axes, int decoder,
                                                      const DistortionMeasure& measure) {
    ReconstructionResult out;
    out.fn.decoder = decoder;
    out.fn.domain_axes = domain_axes;
    std::sort(out.fn.domain_axes.begin(), out.fn.domain_axes.end());
    out.fn.domain_axes.erase(std::unique(out.fn.domain_axes.begin(), out.fn.domain_axes.end()),
                             out.fn.domain_axes.end());

    VariableSet with_x = out.fn.domain_axes;
    with_x.push_back(x_axis); // x fastest in the reduced table
    JointPmf m = marginalize(joint, with_x);

    const int nx = joint.sizes[x_axis];
    for (int a : out.fn.domain_axes) out.fn.domain_sizes.push_back(joint.sizes[a]);
    const std::size_t tuples = m.cell.size() / nx;
    out.fn.table.assign(tuples, 0);

    double achieved = 0.0;
    for (std::size_t tup = 0; tup < tuples; ++tup) {
        const double* w = &m.cell[tup * nx];
        int best = 0;
        double best_cost = 0.0;
        for (int r = 0; r < measure.recon_size; ++r) {
            double cost = 0.0;
            for (int x = 0; x < nx; ++x) cost += w[x] * measure.at(x, r);
            if (r == 0 || cost < best_cost) {
                best = r;
                best_cost = cost;
            }
        }
        out.fn.table[tup] = best;
        achieved += best_cost;
    }
    out.achieved = achieved;
    return out;
}

/// Domain axes decoder l is entitled to: (Y_l, U_{{l}}, supersets of {l}).
inline VariableSet decoder_domain_axes(const AuxSystem& sys, const LatticeSets& lat, int l) {
    const std::uint32_t single = 1u << (l - 1);
    auto j = sys.axis_for_subset(single);
    if (!j) throw std::logic_error("subset list is missing a singleton");
    VariableSet axes{sys.y_axis(l), *j};
    for (int i : lat.supersets[*j]) axes.push_back(sys.aux_axis(i));
    return axes;
}

inline ReconstructionResult optimal_reconstruction(const AuxSystem& sys, int l,
                                                   const DistortionMeasure& measure) {
    const LatticeSets lat = derive_sets(sys.v);
    const JointPmf joint = induce_joint(sys);
    return optimal_reconstruction_on(joint, sys.x_axis(), decoder_domain_axes(sys, lat, l), l,
                                     measure);
}

struct DistortionReport {
    std::vector<double> achieved; // per decoder, best attainable on the entitled domain
    bool pass = false;
};

inline constexpr double kDistortionSlack = 1e-12;

/// Aggregates the optimal reconstructions; pass iff achieved_l <= d_l + slack
/// for every decoder.
inline DistortionReport check_P2(const AuxSystem& sys, const DistortionVector& d,
                                 std::span<const DistortionMeasure> measures) {
    const int t = sys.source.t;
    if (static_cast<int>(d.d.size()) != t || static_cast<int>(measures.size()) != t)
        throw std::invalid_argument("check_P2: need one target and one measure per decoder");
    const LatticeSets lat = derive_sets(sys.v);
    const JointPmf joint = induce_joint(sys);
    DistortionReport rep;
    rep.pass = true;
    for (int l = 1; l <= t; ++l) {
        const auto r = optimal_reconstruction_on(joint, sys.x_axis(),
                                                 decoder_domain_axes(sys, lat, l), l,
                                                 measures[l - 1]);
        rep.achieved.push_back(r.achieved);
        if (r.achieved > d.d[l - 1] + kDistortionSlack) rep.pass = false;
    }
    return rep;
}

/// True iff A -o- B -o- C under the induced joint, i.e. I(A;C|B) <= tol.
inline bool check_markov_constraint(const AuxSystem& sys, const VariableSet& a,
                                    const VariableSet& b, const VariableSet& c, double tol) {
    const JointPmf joint = induce_joint(sys);
    return conditional_mutual_information(joint, a, c, b) <= tol;
}

/// The built-in three-decoder instance with modulo-3 coupled pair variables:
/// X and C uniform and independent on {0,1,2}, U_{12} = C, U_{13} = X + C,
/// U_{23} = X + 2C, all other subsets degenerate, no side information.
/// Each decoder recovers X exactly from its two pair variables, yet every
/// pair variable alone is independent of X.
inline AuxSystem counterexample_instance() {
    AuxSystem sys;
    sys.v = canonical_list(3); // {1,2,3},{1,2},{1,3},{2,3},{1},{2},{3}
    sys.aux_sizes = {1, 3, 3, 3, 1, 1, 1};
    sys.source.t = 3;
    sys.source.alphabet_sizes = {3, 1, 1, 1};
    sys.source.probs = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    sys.channel.assign(3 * 27, 0.0); // 27 = |U12||U13||U23|
    for (int x = 0; x < 3; ++x)
        for (int c = 0; c < 3; ++c) {
            const int u13 = (x + c) % 3;
            const int u23 = (x + 2 * c) % 3;
            const std::size_t u = (static_cast<std::size_t>(c) * 3 + u13) * 3 + u23;
            sys.channel[static_cast<std::size_t>(x) * 27 + u] = 1.0 / 3.0;
        }
    return sys;
}

} // namespace sirate
