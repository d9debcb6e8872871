#pragma once

//
// Discrete memoryless sources with t side-informations, per-decoder
// distortion measures, and distortion targets.
//

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "info.hpp"
#include "pmf.hpp"

namespace sirate {

/// Normalization tolerance for probability tables.
inline constexpr double kProbTol = 1e-12;
/// Default tolerance for conditional-independence tests.
inline constexpr double kChainTol = 1e-9;

/// Source pmf q(x, y_1, ..., y_t). Flat row-major storage with x slowest
/// and y_t fastest; this layout is shared bit-exactly by the file format.
struct JointSourcePmf {
    int t = 0;
    std::vector<int> alphabet_sizes; // [|X|, |Y1|, ..., |Yt|]
    std::vector<double> probs;

    int x_size() const { return alphabet_sizes.at(0); }
    int y_size(int l) const { return alphabet_sizes.at(l); } // l in 1..t

    /// Axes: 0 = X, l = Y_l for l in 1..t.
    JointPmf as_pmf() const { return JointPmf(alphabet_sizes, probs); }
};

/// delta_l(x, xhat) >= 0 as an |X| x |Xhat_l| table. Normal: every row has a
/// zero entry.
struct DistortionMeasure {
    int decoder = 0; // l in 1..t
    int recon_size = 0;
    std::vector<double> table; // row-major, x slowest

    double at(int x, int xhat) const { return table[static_cast<std::size_t>(x) * recon_size + xhat]; }
};

struct DistortionVector {
    std::vector<double> d;
};

inline DistortionMeasure hamming_measure(int decoder, int x_size) {
    DistortionMeasure m;
    m.decoder = decoder;
    m.recon_size = x_size;
    m.table.assign(static_cast<std::size_t>(x_size) * x_size, 1.0);
    for (int x = 0; x < x_size; ++x) m.table[static_cast<std::size_t>(x) * x_size + x] = 0.0;
    return m;
}

/// Returns the list of violated invariants; empty means valid.
inline std::vector<std::string> validate_source(const JointSourcePmf& q) {
    std::vector<std::string> bad;
    if (q.t < 1) bad.push_back("t must be >= 1");
    if (static_cast<int>(q.alphabet_sizes.size()) != q.t + 1)
        bad.push_back("alphabets must list |X| and t side-information sizes");
    std::size_t cells = 1;
    for (int s : q.alphabet_sizes) {
        if (s < 1) bad.push_back("alphabet size < 1");
        else cells *= static_cast<std::size_t>(s);
    }
    if (q.probs.size() != cells) {
        bad.push_back("pmf has " + std::to_string(q.probs.size()) + " entries, expected " +
                      std::to_string(cells));
        return bad;
    }
    double sum = 0.0;
    bool negative = false;
    for (double p : q.probs) {
        if (p < 0.0) negative = true;
        sum += p;
    }
    if (negative) bad.push_back("negative mass");
    if (std::abs(sum - 1.0) > kProbTol) bad.push_back("sum != 1");
    return bad;
}

inline std::vector<std::string> validate_measure(const DistortionMeasure& m, int x_size) {
    std::vector<std::string> bad;
    if (m.recon_size < 1) bad.push_back("reconstruction alphabet empty");
    if (m.table.size() != static_cast<std::size_t>(x_size) * m.recon_size) {
        bad.push_back("distortion table shape mismatch");
        return bad;
    }
    for (int x = 0; x < x_size; ++x) {
        double row_min = m.table[static_cast<std::size_t>(x) * m.recon_size];
        for (int r = 0; r < m.recon_size; ++r) {
            const double v = m.at(x, r);
            if (v < 0.0) bad.push_back("negative distortion entry");
            row_min = std::min(row_min, v);
        }
        if (row_min != 0.0) bad.push_back("measure not normal: row " + std::to_string(x));
    }
    return bad;
}

/// Marginal over a subset of {X, Y1..Yt} given as pmf axis indices.
inline JointPmf marginal(const JointSourcePmf& q, const VariableSet& vars) {
    JointPmf p = q.as_pmf();
    validate_vars(p, vars);
    return marginalize(p, vars);
}

/// True iff X -o- Y_t -o- Y_{t-1} -o- ... -o- Y_1 holds under q within tol.
/// Vacuous (true) for t = 1.
inline bool is_degraded(const JointSourcePmf& q, double tol = kChainTol) {
    if (q.t == 1) return true;
    JointPmf p = q.as_pmf();
    std::vector<VariableSet> groups;
    groups.push_back({0});
    for (int l = q.t; l >= 1; --l) groups.push_back({l});
    return is_markov_chain(p, groups, tol);
}

} // namespace sirate
