#pragma once

//
// Every bound and region functional evaluated at a fixed auxiliary system.
// Minimization over systems lives in optimize.hpp.
//
// Regions are kept in prefix-sum halfspace form only:
//     { r >= 0 : sum_{i<=l} r_i >= c_l for all l }.
//

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aux_system.hpp"
#include "info.hpp"
#include "lattice.hpp"
#include "source.hpp"

namespace sirate {

/// Thrown when a distortion target cannot be met (P2 fails, or a search
/// exhausts every restart without a feasible point).
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RateRegion {
    int t = 0;
    std::vector<double> prefix_bounds; // c_1, ..., c_t

    bool contains(std::span<const double> r, double tol = 1e-12) const {
        if (static_cast<int>(r.size()) != t) return false;
        double acc = 0.0;
        for (int l = 0; l < t; ++l) {
            if (r[l] < 0.0) return false;
            acc += r[l];
            if (acc < prefix_bounds[l] - tol) return false;
        }
        return true;
    }

    /// The corner rate tuple whose prefix sums are the running maximum of
    /// the bounds; the cheapest member of the region in every prefix.
    std::vector<double> corner_rates() const {
        std::vector<double> r(t, 0.0);
        double acc = 0.0;
        for (int l = 0; l < t; ++l) {
            const double need = std::max(prefix_bounds[l], 0.0);
            r[l] = std::max(0.0, need - acc);
            acc += r[l];
        }
        return r;
    }
};

/// r_tilde lies in the latent region of r: rate may move to lower-index
/// channels but never the other way.
inline bool latent_region_contains(std::span<const double> r, std::span<const double> r_tilde) {
    if (r.size() != r_tilde.size()) throw std::invalid_argument("rate tuples differ in length");
    double a = 0.0, b = 0.0;
    for (std::size_t l = 0; l < r.size(); ++l) {
        if (r[l] < 0.0 || r_tilde[l] < 0.0) throw std::invalid_argument("rates must be nonnegative");
        a += r[l];
        b += r_tilde[l];
        if (b < a) return false;
    }
    return true;
}

namespace detail {

inline VariableSet aux_axes_of(const AuxSystem& sys, const std::vector<int>& subset_indices) {
    VariableSet axes;
    axes.reserve(subset_indices.size());
    for (int i : subset_indices) axes.push_back(sys.aux_axis(i));
    return axes;
}

} // namespace detail

/// The per-subset rate charge at stage j as seen by the prefix of decoders
/// [l]: encoding cost minus the cheapest resolution gain among the decoders
/// of S_j that listen to channels 1..l. Requires S_j to meet [l].
inline double rate_charge(const JointPmf& joint, const AuxSystem& sys, const LatticeSets& lat,
                          int j, int l) {
    const std::uint32_t prefix = (l >= 32) ? ~0u : ((1u << l) - 1u);
    if ((sys.v.subsets[j] & prefix) == 0)
        throw std::invalid_argument("rate_charge: subset does not meet the decoder prefix");

    VariableSet enc_group{sys.x_axis()};
    for (int ax : detail::aux_axes_of(sys, lat.extra_encoding[j])) enc_group.push_back(ax);
    const VariableSet uj{sys.aux_axis(j)};
    const VariableSet cond = detail::aux_axes_of(sys, lat.supersets[j]);

    const double enc_cost = conditional_mutual_information(joint, enc_group, uj, cond);

    double best_gain = 0.0;
    bool first = true;
    for (int lp : sys.v.members(j)) {
        if (lp > l) break;
        VariableSet gain_group = detail::aux_axes_of(sys, lat.decoder_known[j][lp - 1]);
        gain_group.push_back(sys.y_axis(lp));
        const double gain = conditional_mutual_information(joint, uj, gain_group, cond);
        if (first || gain < best_gain) best_gain = gain;
        first = false;
    }
    return enc_cost - best_gain;
}

inline double rate_charge(const AuxSystem& sys, int j, int l) {
    const LatticeSets lat = derive_sets(sys.v);
    const JointPmf joint = induce_joint(sys);
    return rate_charge(joint, sys, lat, j, l);
}

/// Prefix bounds of the achievable region at a fixed system:
/// c_l = sum of rate charges over subsets meeting [l]. Gated on P2.
inline RateRegion inner_region(const AuxSystem& sys, const DistortionVector& d,
                               std::span<const DistortionMeasure> measures) {
    const auto rep = check_P2(sys, d, measures);
    if (!rep.pass) throw InfeasibleError("inner_region: distortion targets not met");
    const LatticeSets lat = derive_sets(sys.v);
    const JointPmf joint = induce_joint(sys);
    RateRegion region;
    region.t = sys.source.t;
    for (int l = 1; l <= region.t; ++l) {
        double c = 0.0;
        const std::uint32_t prefix = (1u << l) - 1u;
        for (int j = 0; j < sys.v.count(); ++j)
            if (sys.v.subsets[j] & prefix) c += rate_charge(joint, sys, lat, j, l);
        region.prefix_bounds.push_back(c);
    }
    return region;
}

/// Sum over subsets of the worst-decoder conditional information charge.
/// This is the historical single-channel functional; the counterexample
/// instance drives it to zero below the lossless rate.
inline double worst_case_sum_rate(const AuxSystem& sys) {
    const LatticeSets lat = derive_sets(sys.v);
    const JointPmf joint = induce_joint(sys);
    const VariableSet x{sys.x_axis()};
    double total = 0.0;
    for (int j = 0; j < sys.v.count(); ++j) {
        const VariableSet uj{sys.aux_axis(j)};
        double worst = 0.0;
        bool first = true;
        for (int l : sys.v.members(j)) {
            VariableSet cond = detail::aux_axes_of(sys, lat.supersets[j]);
            cond.push_back(sys.y_axis(l));
            const double v = conditional_mutual_information(joint, x, uj, cond);
            if (first || v > worst) worst = v;
            first = false;
        }
        total += worst;
    }
    return total;
}

/// Single-channel upper bound at a fixed system: the total rate charge with
/// every decoder listening, i.e. sum_j rate_charge(S_j, t).
inline double sum_rate_bound(const AuxSystem& sys) {
    const LatticeSets lat = derive_sets(sys.v);
    const JointPmf joint = induce_joint(sys);
    double total = 0.0;
    for (int j = 0; j < sys.v.count(); ++j)
        total += rate_charge(joint, sys, lat, j, sys.source.t);
    return total;
}

namespace detail {

inline std::uint32_t chain_mask(int l, int t) {
    return ((1u << t) - 1u) & ~((1u << (l - 1)) - 1u); // {l, l+1, ..., t}
}

inline void require_chain_only(const AuxSystem& sys) {
    for (int j = 0; j < sys.v.count(); ++j) {
        if (sys.aux_sizes[j] <= 1) continue;
        bool chain = false;
        for (int l = 1; l <= sys.source.t; ++l)
            if (sys.v.subsets[j] == chain_mask(l, sys.source.t)) chain = true;
        if (!chain)
            throw std::invalid_argument(
                "chain evaluator: nondegenerate auxiliary off the nested chain");
    }
}

} // namespace detail

/// Single-channel rate for nested-chain systems:
/// sum_l I(X; U_{[l,t]} | Y_l, U_{[1,t]}, ..., U_{[l-1,t]}).
/// Only subsets of the form {l,...,t} may be nondegenerate.
inline double degraded_chain_rate(const AuxSystem& sys) {
    detail::require_chain_only(sys);
    const JointPmf joint = induce_joint(sys);
    const int t = sys.source.t;
    double total = 0.0;
    for (int l = 1; l <= t; ++l) {
        const auto axis_l = sys.axis_for_subset(detail::chain_mask(l, t));
        if (!axis_l) throw std::logic_error("list is missing a chain subset");
        VariableSet cond{sys.y_axis(l)};
        for (int k = 1; k < l; ++k)
            cond.push_back(*sys.axis_for_subset(detail::chain_mask(k, t)));
        total += conditional_mutual_information(joint, {sys.x_axis()}, {*axis_l}, cond);
    }
    return total;
}

/// Region for nested-chain systems with per-decoder reconstructions
/// Xhat_l(U_{[l,t]}, Y_l): c_l = sum_{k<=l} I(X; U_{[k,t]} | chain prefix, Y_k).
inline RateRegion degraded_region(const AuxSystem& sys, const DistortionVector& d,
                                  std::span<const DistortionMeasure> measures) {
    detail::require_chain_only(sys);
    const int t = sys.source.t;
    if (static_cast<int>(d.d.size()) != t || static_cast<int>(measures.size()) != t)
        throw std::invalid_argument("degraded_region: need one target and measure per decoder");
    const JointPmf joint = induce_joint(sys);
    for (int l = 1; l <= t; ++l) {
        const VariableSet domain{sys.y_axis(l), *sys.axis_for_subset(detail::chain_mask(l, t))};
        const auto r = optimal_reconstruction_on(joint, sys.x_axis(), domain, l, measures[l - 1]);
        if (r.achieved > d.d[l - 1] + kDistortionSlack)
            throw InfeasibleError("degraded_region: distortion target not met at decoder " +
                                  std::to_string(l));
    }
    RateRegion region;
    region.t = t;
    double acc = 0.0;
    for (int l = 1; l <= t; ++l) {
        VariableSet cond{sys.y_axis(l)};
        for (int k = 1; k < l; ++k)
            cond.push_back(*sys.axis_for_subset(detail::chain_mask(k, t)));
        acc += conditional_mutual_information(
            joint, {sys.x_axis()}, {*sys.axis_for_subset(detail::chain_mask(l, t))}, cond);
        region.prefix_bounds.push_back(acc);
    }
    return region;
}

/// Two-decoder region for sources with X -o- Y_1 -o- Y_2:
///   c_1 = I(X; U_1, U_12 | Y_1)
///   c_2 = I(X; U_2, U_12 | Y_2) + I(X; U_1 | Y_1, U_12)
/// with per-decoder reconstructions Xhat_l(U_l, Y_l).
inline RateRegion scalable_region(const AuxSystem& sys, const DistortionVector& d,
                                  std::span<const DistortionMeasure> measures) {
    if (sys.source.t != 2) throw std::invalid_argument("scalable_region: t must be 2");
    const JointPmf joint = induce_joint(sys);
    const int ax12 = *sys.axis_for_subset(0b11u);
    const int ax1 = *sys.axis_for_subset(0b01u);
    const int ax2 = *sys.axis_for_subset(0b10u);
    for (int l = 1; l <= 2; ++l) {
        const VariableSet domain{sys.y_axis(l), l == 1 ? ax1 : ax2};
        const auto r = optimal_reconstruction_on(joint, sys.x_axis(), domain, l, measures[l - 1]);
        if (r.achieved > d.d[l - 1] + kDistortionSlack)
            throw InfeasibleError("scalable_region: distortion target not met at decoder " +
                                  std::to_string(l));
    }
    RateRegion region;
    region.t = 2;
    const VariableSet x{sys.x_axis()};
    region.prefix_bounds.push_back(
        conditional_mutual_information(joint, x, {ax1, ax12}, {sys.y_axis(1)}));
    region.prefix_bounds.push_back(
        conditional_mutual_information(joint, x, {ax2, ax12}, {sys.y_axis(2)}) +
        conditional_mutual_information(joint, x, {ax1}, {sys.y_axis(1), ax12}));
    return region;
}

/// Source for per-decoder lossless messages: pmf over (W_1..W_t, Y_1..Y_t).
struct PrivateMessageSource {
    int t = 0;
    std::vector<int> w_sizes;
    std::vector<int> y_sizes;
    std::vector<double> probs; // row-major, w_1 slowest, y_t fastest

    JointPmf as_pmf() const {
        std::vector<int> sizes = w_sizes;
        sizes.insert(sizes.end(), y_sizes.begin(), y_sizes.end());
        return JointPmf(sizes, probs);
    }
    int w_axis(int l) const { return l - 1; }
    int y_axis(int l) const { return t + l - 1; }
};

/// True iff (W_1..W_t) -o- Y_t -o- ... -o- Y_1 within tol.
inline bool messages_degraded(const PrivateMessageSource& src, double tol = kChainTol) {
    const JointPmf p = src.as_pmf();
    std::vector<VariableSet> groups;
    VariableSet ws;
    for (int l = 1; l <= src.t; ++l) ws.push_back(src.w_axis(l));
    groups.push_back(ws);
    for (int l = src.t; l >= 1; --l) groups.push_back({src.y_axis(l)});
    return is_markov_chain(p, groups, tol);
}

/// Exact region for lossless private messages under degraded side-information:
/// c_l = sum_{k<=l} H(W_k | W_1..W_{k-1}, Y_k). When the chain fails the same
/// formula is still returned as an inner bound and *degraded_ok is cleared.
inline RateRegion lossless_region(const PrivateMessageSource& src, bool* degraded_ok = nullptr) {
    const JointPmf p = src.as_pmf();
    const bool ok = messages_degraded(src);
    if (degraded_ok) *degraded_ok = ok;
    RateRegion region;
    region.t = src.t;
    double acc = 0.0;
    for (int l = 1; l <= src.t; ++l) {
        VariableSet cond{src.y_axis(l)};
        for (int k = 1; k < l; ++k) cond.push_back(src.w_axis(k));
        acc += conditional_entropy(p, {src.w_axis(l)}, cond);
        region.prefix_bounds.push_back(acc);
    }
    return region;
}

/// Single-channel lossless rate: sum_l H(W_l | W_1..W_{l-1}, Y_l).
inline double lossless_sum_rate(const PrivateMessageSource& src, bool* degraded_ok = nullptr) {
    return lossless_region(src, degraded_ok).prefix_bounds.back();
}

/// Zero-distortion rate max_l H(X | Y_l). Requires every measure to be an
/// error indicator (zero on the diagonal, positive off it, |Xhat| = |X|).
inline double slepian_wolf_rate(const JointSourcePmf& q,
                                std::span<const DistortionMeasure> measures) {
    if (static_cast<int>(measures.size()) != q.t)
        throw std::invalid_argument("slepian_wolf_rate: need one measure per decoder");
    for (const auto& m : measures) {
        if (m.recon_size != q.x_size())
            throw std::invalid_argument("slepian_wolf_rate: measure is not an error indicator");
        for (int x = 0; x < q.x_size(); ++x)
            for (int r = 0; r < m.recon_size; ++r) {
                const double v = m.at(x, r);
                if ((x == r && v != 0.0) || (x != r && v <= 0.0))
                    throw std::invalid_argument(
                        "slepian_wolf_rate: measure is not an error indicator");
            }
    }
    const JointPmf p = q.as_pmf();
    double worst = 0.0;
    for (int l = 1; l <= q.t; ++l)
        worst = std::max(worst, conditional_entropy(p, {0}, {l}));
    return worst;
}

} // namespace sirate
