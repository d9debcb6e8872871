#pragma once

//
// Exact Shannon quantities (base 2) on dense joint pmfs.
//
// Conditional mutual information is assembled from entropies of a single
// reduced table, so the 0 log 0 convention falls out of plain summation and
// no cell is ever divided by a conditional mass.
//

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "pmf.hpp"

namespace sirate {

/// Results whose magnitude is below this are clamped to exactly zero.
inline constexpr double kInfoClampTol = 1e-12;

namespace detail {

inline double entropy_cells(std::span<const double> cells) {
    double h = 0.0;
    for (double c : cells)
        if (c > 0.0) h -= c * std::log2(c);
    return h;
}

// Entropy of a group of axes of `m`, given by positions into m's axes.
inline double entropy_grouped(const JointPmf& m, const VariableSet& positions) {
    if (positions.empty()) return 0.0;
    if (static_cast<int>(positions.size()) == m.axes())
        return entropy_cells(m.cell); // already the full table
    return entropy_cells(marginalize(m, positions).cell);
}

inline double clamp_small(double v) { return std::abs(v) < kInfoClampTol ? 0.0 : v; }

inline VariableSet concat(const VariableSet& a, const VariableSet& b) {
    VariableSet r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

} // namespace detail

/// H(A) in bits.
inline double entropy(const JointPmf& p, const VariableSet& a) {
    validate_vars(p, a);
    if (static_cast<int>(a.size()) == p.axes()) {
        // order does not matter for entropy of the full table
        return detail::entropy_cells(p.cell);
    }
    return detail::entropy_cells(marginalize(p, a).cell);
}

/// I(A;B|C) in bits. C may be empty. A, B, C must be pairwise disjoint.
inline double conditional_mutual_information(const JointPmf& p, const VariableSet& a,
                                             const VariableSet& b, const VariableSet& c = {}) {
    validate_vars(p, a);
    validate_vars(p, b);
    VariableSet all = detail::concat(detail::concat(a, b), c);
    validate_vars(p, all); // rejects any overlap

    std::sort(all.begin(), all.end());
    JointPmf m = marginalize(p, all);

    // positions of each group inside the reduced table
    auto positions = [&all](const VariableSet& g) {
        VariableSet pos;
        pos.reserve(g.size());
        for (int v : g)
            pos.push_back(static_cast<int>(std::lower_bound(all.begin(), all.end(), v) - all.begin()));
        return pos;
    };
    const VariableSet pa = positions(a), pb = positions(b), pc = positions(c);

    const double v = detail::entropy_grouped(m, detail::concat(pa, pc))
                   + detail::entropy_grouped(m, detail::concat(pb, pc))
                   - detail::entropy_cells(m.cell)
                   - detail::entropy_grouped(m, pc);
    return detail::clamp_small(v);
}

inline double mutual_information(const JointPmf& p, const VariableSet& a, const VariableSet& b) {
    return conditional_mutual_information(p, a, b, {});
}

/// H(A|C) in bits. C may be empty.
inline double conditional_entropy(const JointPmf& p, const VariableSet& a, const VariableSet& c) {
    validate_vars(p, a);
    if (c.empty()) return entropy(p, a);
    const double v = entropy(p, detail::concat(a, c)) - entropy(p, c);
    return detail::clamp_small(v);
}

/// Tests G0 -o- G1 -o- ... -o- Gk via the conditional-independence
/// characterization: I(G0..G_{i-1}; G_{i+1}..G_k | G_i) <= tol for all
/// interior i. A chain with fewer than three groups is vacuously true.
inline bool is_markov_chain(const JointPmf& p, std::span<const VariableSet> groups, double tol) {
    const int k = static_cast<int>(groups.size());
    for (int i = 1; i + 1 < k; ++i) {
        VariableSet past, future;
        for (int g = 0; g < i; ++g) past = detail::concat(past, groups[g]);
        for (int g = i + 1; g < k; ++g) future = detail::concat(future, groups[g]);
        if (conditional_mutual_information(p, past, future, groups[i]) > tol) return false;
    }
    return true;
}

/// h(x) = -x log2 x - (1-x) log2(1-x) on [0,1].
inline double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("binary_entropy: argument outside [0,1]");
    double h = 0.0;
    if (x > 0.0) h -= x * std::log2(x);
    if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
    return h;
}

} // namespace sirate
