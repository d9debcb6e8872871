#pragma once

//
// Shared helpers for the test suites: deterministic random instances and
// independent oracle implementations that deliberately avoid the library's
// computation paths (per-cell divisions instead of entropy combinations).
//

#include <cmath>
#include <cstdint>
#include <vector>

#include "sirate/aux_system.hpp"
#include "sirate/detail/rng.hpp"
#include "sirate/lattice.hpp"
#include "sirate/pmf.hpp"
#include "sirate/source.hpp"

namespace testsup {

using sirate::AuxSystem;
using sirate::JointPmf;
using sirate::JointSourcePmf;
using sirate::SubsetList;
using sirate::VariableSet;
using Rng = sirate::detail::Rng;

inline std::vector<double> random_simplex(std::size_t cells, Rng& rng) {
    std::vector<double> v(cells);
    double sum = 0.0;
    for (double& x : v) {
        x = rng.expo();
        sum += x;
    }
    for (double& x : v) x /= sum;
    return v;
}

inline JointPmf random_pmf(std::vector<int> sizes, Rng& rng) {
    JointPmf p(std::move(sizes));
    p.cell = random_simplex(p.cell.size(), rng);
    return p;
}

inline JointSourcePmf random_source(int t, const std::vector<int>& sizes, Rng& rng) {
    JointSourcePmf q;
    q.t = t;
    q.alphabet_sizes = sizes;
    q.probs = random_simplex(sirate::total_cells(sizes), rng);
    return q;
}

// q(x) k_t(y_t|x) k_{t-1}(y_{t-1}|y_t) ... k_1(y_1|y_2): degraded by
// construction.
inline JointSourcePmf random_degraded_source(int t, const std::vector<int>& sizes, Rng& rng) {
    JointSourcePmf q;
    q.t = t;
    q.alphabet_sizes = sizes;
    const int nx = sizes[0];
    std::vector<double> px = random_simplex(nx, rng);
    // kernels[l]: from y_{l+1} (or x for l = t) to y_l
    std::vector<std::vector<double>> kernels(t + 1);
    for (int l = t; l >= 1; --l) {
        const int from = (l == t) ? nx : sizes[l + 1];
        const int to = sizes[l];
        kernels[l].resize(static_cast<std::size_t>(from) * to);
        for (int a = 0; a < from; ++a) {
            const auto row = random_simplex(to, rng);
            for (int b = 0; b < to; ++b) kernels[l][static_cast<std::size_t>(a) * to + b] = row[b];
        }
    }
    q.probs.assign(sirate::total_cells(sizes), 0.0);
    std::vector<int> idx(t + 1, 0);
    for (std::size_t lin = 0; lin < q.probs.size(); ++lin) {
        std::size_t rem = lin;
        for (int a = t; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % sizes[a]);
            rem /= sizes[a];
        }
        double p = px[idx[0]];
        for (int l = t; l >= 1; --l) {
            const int from = (l == t) ? idx[0] : idx[l + 1];
            p *= kernels[l][static_cast<std::size_t>(from) * sizes[l] + idx[l]];
        }
        q.probs[lin] = p;
    }
    return q;
}

// q(x) k1(y1|x) k2(y2|y1): X -o- Y1 -o- Y2 by construction (t = 2).
inline JointSourcePmf random_scalable_source(const std::vector<int>& sizes, Rng& rng) {
    JointSourcePmf q;
    q.t = 2;
    q.alphabet_sizes = sizes;
    const int nx = sizes[0], n1 = sizes[1], n2 = sizes[2];
    const auto px = random_simplex(nx, rng);
    std::vector<std::vector<double>> k1(nx), k2(n1);
    for (int x = 0; x < nx; ++x) k1[x] = random_simplex(n1, rng);
    for (int y = 0; y < n1; ++y) k2[y] = random_simplex(n2, rng);
    q.probs.assign(static_cast<std::size_t>(nx) * n1 * n2, 0.0);
    for (int x = 0; x < nx; ++x)
        for (int y1 = 0; y1 < n1; ++y1)
            for (int y2 = 0; y2 < n2; ++y2)
                q.probs[(static_cast<std::size_t>(x) * n1 + y1) * n2 + y2] =
                    px[x] * k1[x][y1] * k2[y1][y2];
    return q;
}

inline std::vector<double> random_channel(int x_size, std::size_t aux_cells, Rng& rng) {
    std::vector<double> ch(static_cast<std::size_t>(x_size) * aux_cells);
    for (int x = 0; x < x_size; ++x) {
        const auto row = random_simplex(aux_cells, rng);
        for (std::size_t u = 0; u < aux_cells; ++u)
            ch[static_cast<std::size_t>(x) * aux_cells + u] = row[u];
    }
    return ch;
}

inline AuxSystem random_system(const JointSourcePmf& q, const SubsetList& v,
                               const std::vector<int>& aux_sizes, Rng& rng) {
    AuxSystem sys;
    sys.v = v;
    sys.aux_sizes = aux_sizes;
    sys.source = q;
    sys.channel = random_channel(q.x_size(), sys.aux_cells(), rng);
    return sys;
}

// Chain sizes on the nested subsets {l..t}, everything else degenerate.
inline std::vector<int> chain_sizes(const SubsetList& v, int size) {
    std::vector<int> s(v.count(), 1);
    for (int j = 0; j < v.count(); ++j)
        for (int l = 1; l <= v.t; ++l)
            if (v.subsets[j] == (((1u << v.t) - 1u) & ~((1u << (l - 1)) - 1u))) s[j] = size;
    return s;
}

// ---------------------------------------------------------------------------
// Independent oracles: straight pmf sums with per-cell divisions.
// ---------------------------------------------------------------------------

inline double oracle_cmi(const JointPmf& p, const VariableSet& a, const VariableSet& b,
                         const VariableSet& c) {
    VariableSet all = a;
    all.insert(all.end(), b.begin(), b.end());
    all.insert(all.end(), c.begin(), c.end());
    const JointPmf m = marginalize(p, all);

    const std::size_t na = a.size(), nb = b.size();
    VariableSet pos_ac, pos_bc, pos_c;
    for (std::size_t k = 0; k < all.size(); ++k) {
        if (k < na) pos_ac.push_back(static_cast<int>(k));
        else if (k < na + nb) pos_bc.push_back(static_cast<int>(k));
        else {
            pos_ac.push_back(static_cast<int>(k));
            pos_bc.push_back(static_cast<int>(k));
            pos_c.push_back(static_cast<int>(k));
        }
    }
    const JointPmf mac = marginalize(m, pos_ac);
    const JointPmf mbc = marginalize(m, pos_bc);
    const JointPmf mc = pos_c.empty() ? JointPmf{} : marginalize(m, pos_c);

    double total = 0.0;
    std::vector<std::size_t> stride(m.axes(), 1);
    for (int ax = m.axes() - 2; ax >= 0; --ax)
        stride[ax] = stride[ax + 1] * static_cast<std::size_t>(m.sizes[ax + 1]);
    for (std::size_t lin = 0; lin < m.cell.size(); ++lin) {
        const double pabc = m.cell[lin];
        if (pabc <= 0.0) continue;
        auto project = [&](const VariableSet& pos, const JointPmf& target) {
            std::size_t o = 0;
            for (std::size_t k = 0; k < pos.size(); ++k)
                o = o * target.sizes[k] +
                    (lin / stride[pos[k]]) % static_cast<std::size_t>(m.sizes[pos[k]]);
            return o;
        };
        const double pac = mac.cell[project(pos_ac, mac)];
        const double pbc = mbc.cell[project(pos_bc, mbc)];
        const double pc = pos_c.empty() ? 1.0 : mc.cell[project(pos_c, mc)];
        total += pabc * std::log2(pabc * pc / (pac * pbc));
    }
    return total;
}

// The two information terms of the rate charge, straight from the induced
// joint, using the division-based oracle above.
inline double oracle_rate_charge(const AuxSystem& sys, int j, int l) {
    const sirate::LatticeSets lat = sirate::derive_sets(sys.v);
    const JointPmf joint = sirate::induce_joint(sys);

    VariableSet enc{sys.x_axis()};
    for (int i : lat.extra_encoding[j]) enc.push_back(sys.aux_axis(i));
    VariableSet cond;
    for (int i : lat.supersets[j]) cond.push_back(sys.aux_axis(i));
    const double enc_cost = oracle_cmi(joint, enc, {sys.aux_axis(j)}, cond);

    double best = 0.0;
    bool first = true;
    for (int lp : sys.v.members(j)) {
        if (lp > l) break;
        VariableSet gain;
        for (int i : lat.decoder_known[j][lp - 1]) gain.push_back(sys.aux_axis(i));
        gain.push_back(sys.y_axis(lp));
        const double g = oracle_cmi(joint, {sys.aux_axis(j)}, gain, cond);
        if (first || g < best) best = g;
        first = false;
    }
    return enc_cost - best;
}

inline std::vector<sirate::DistortionMeasure> hamming_measures(int t, int x_size) {
    std::vector<sirate::DistortionMeasure> m;
    for (int l = 1; l <= t; ++l) m.push_back(sirate::hamming_measure(l, x_size));
    return m;
}

// Distortion targets the system meets exactly (its own achieved values).
inline sirate::DistortionVector achieved_targets(
    const AuxSystem& sys, std::span<const sirate::DistortionMeasure> measures) {
    sirate::DistortionVector d;
    d.d.assign(sys.source.t, 1e9);
    const auto rep = sirate::check_P2(sys, d, measures);
    d.d = rep.achieved;
    return d;
}

} // namespace testsup
