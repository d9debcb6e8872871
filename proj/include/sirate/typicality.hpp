#pragma once

//
// Letter typicality with relative bands: a tuple of sequences is typical
// when every cell's empirical frequency sits within eps * p(cell) of the
// reference pmf. Cells with zero mass therefore admit no occurrences.
// Conditional typicality is the same joint test with some coordinates fixed.
//

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pmf.hpp"

namespace sirate {

using Sequence = std::vector<std::uint8_t>;

/// Single-sequence test against a pmf over one alphabet.
inline bool is_typical(std::span<const std::uint8_t> seq, std::span<const double> pmf,
                       double eps) {
    std::vector<std::size_t> counts(pmf.size(), 0);
    for (std::uint8_t s : seq) {
        if (s >= pmf.size()) throw std::invalid_argument("is_typical: symbol outside alphabet");
        ++counts[s];
    }
    const double n = static_cast<double>(seq.size());
    for (std::size_t a = 0; a < pmf.size(); ++a)
        if (std::abs(counts[a] / n - pmf[a]) > eps * pmf[a]) return false;
    return true;
}

/// Joint test: one sequence per axis of `ref`, all the same length.
inline bool is_jointly_typical(std::span<const std::span<const std::uint8_t>> seqs,
                               const JointPmf& ref, double eps) {
    if (static_cast<int>(seqs.size()) != ref.axes())
        throw std::invalid_argument("is_jointly_typical: need one sequence per axis");
    const std::size_t n = seqs.empty() ? 0 : seqs[0].size();
    for (const auto& s : seqs)
        if (s.size() != n) throw std::invalid_argument("is_jointly_typical: length mismatch");
    std::vector<std::size_t> counts(ref.cell.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lin = 0;
        for (int a = 0; a < ref.axes(); ++a) {
            const std::uint8_t s = seqs[a][i];
            if (s >= ref.sizes[a])
                throw std::invalid_argument("is_jointly_typical: symbol outside alphabet");
            lin = lin * ref.sizes[a] + s;
        }
        ++counts[lin];
    }
    const double dn = static_cast<double>(n);
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (std::abs(counts[c] / dn - ref.cell[c]) > eps * ref.cell[c]) return false;
    return true;
}

/// Smallest positive mass of a pmf.
inline double mu_of(std::span<const double> cells) {
    double mu = 1.0;
    bool any = false;
    for (double c : cells)
        if (c > 0.0) {
            mu = any ? std::min(mu, c) : c;
            any = true;
        }
    if (!any) throw std::invalid_argument("mu_of: empty support");
    return mu;
}

inline double mu_of(const JointPmf& p) { return mu_of(std::span<const double>(p.cell)); }

/// Source-typicality failure bound: 2 |alphabet| exp(-n eps^2 mu).
/// Valid when 0 < eps <= mu.
inline double delta1_bound(std::size_t n, double eps, const JointPmf& p) {
    if (eps <= 0.0) throw std::invalid_argument("delta1_bound: eps must be positive");
    return 2.0 * static_cast<double>(p.cell.size()) *
           std::exp(-static_cast<double>(n) * eps * eps * mu_of(p));
}

/// Conditional-typicality failure bound for a joint pmf:
/// 2 |cells| exp(-n (eps2 - eps1)^2 mu / (1 + eps1)). Requires eps1 < eps2.
inline double delta2_bound(std::size_t n, double eps1, double eps2, const JointPmf& p) {
    if (!(0.0 < eps1 && eps1 <= eps2))
        throw std::invalid_argument("delta2_bound: need 0 < eps1 <= eps2");
    const double gap = eps2 - eps1;
    return 2.0 * static_cast<double>(p.cell.size()) *
           std::exp(-static_cast<double>(n) * gap * gap * mu_of(p) / (1.0 + eps1));
}

/// Strictly increasing tolerances eps_0 < eps_1 < ... < eps_{2^t}, one per
/// encoding stage plus the source test and the final decoding stage.
struct EpsilonSchedule {
    std::vector<double> eps;

    static EpsilonSchedule defaults(int t, double eps0 = 0.05) {
        if (t < 1 || eps0 <= 0.0) throw std::invalid_argument("EpsilonSchedule: bad parameters");
        EpsilonSchedule s;
        const int stages = 1 << t;
        for (int j = 0; j <= stages; ++j)
            s.eps.push_back(eps0 * (1.0 + static_cast<double>(j) / stages));
        return s;
    }

    void require_monotone() const {
        if (eps.empty() || eps.front() <= 0.0)
            throw std::invalid_argument("EpsilonSchedule: tolerances must be positive");
        for (std::size_t i = 1; i < eps.size(); ++i)
            if (eps[i] <= eps[i - 1])
                throw std::invalid_argument("EpsilonSchedule: tolerances must strictly increase");
    }

    /// Whether the closed-form failure bounds apply to a pmf with the given
    /// smallest mass. At desk-scale blocklengths this often fails; the
    /// simulator still runs and reports the flag.
    bool within_bound_validity(double mu) const { return eps.back() <= mu; }
};

} // namespace sirate
