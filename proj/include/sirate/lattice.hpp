#pragma once

//
// Ordered subset lists and the derived index sets that drive both the rate
// functionals and the staged coding scheme.
//
// Subsets of decoders [t] are bitmasks: bit (l-1) set means decoder l is a
// member. A valid list covers every nonempty subset exactly once with
// non-increasing cardinality.
//

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sirate {

inline constexpr int kMaxDecodersForSets = 5;   // 31 subsets
inline constexpr int kMaxDecodersForEnum = 3;   // class-factorial blowup beyond this

struct SubsetList {
    int t = 0;
    std::vector<std::uint32_t> subsets; // S_1, ..., S_{2^t - 1}

    int count() const { return static_cast<int>(subsets.size()); }
    std::uint32_t full_mask() const { return (1u << t) - 1u; }

    /// Elements of S_j in ascending order (1-based decoder labels).
    std::vector<int> members(int j) const {
        std::vector<int> out;
        for (int l = 1; l <= t; ++l)
            if (subsets[j] & (1u << (l - 1))) out.push_back(l);
        return out;
    }
};

inline std::vector<std::string> validate_list(const SubsetList& v) {
    std::vector<std::string> bad;
    if (v.t < 1 || v.t > kMaxDecodersForSets) {
        bad.push_back("t out of range");
        return bad;
    }
    const std::size_t want = (std::size_t{1} << v.t) - 1;
    if (v.subsets.size() != want) bad.push_back("list must hold every nonempty subset exactly once");
    std::vector<char> seen(std::size_t{1} << v.t, 0);
    int prev_card = v.t + 1;
    for (std::uint32_t s : v.subsets) {
        if (s == 0 || s > v.full_mask()) {
            bad.push_back("subset out of range");
            continue;
        }
        if (seen[s]) bad.push_back("duplicate subset");
        seen[s] = 1;
        const int card = std::popcount(s);
        if (card > prev_card) bad.push_back("cardinality must be non-increasing");
        prev_card = card;
    }
    return bad;
}

namespace detail {
// lexicographic order on the sorted element sequences, e.g. {1,2} < {1,3} < {2,3}
inline bool lex_less(std::uint32_t a, std::uint32_t b) {
    while (a && b) {
        const int la = std::countr_zero(a), lb = std::countr_zero(b);
        if (la != lb) return la < lb;
        a &= a - 1;
        b &= b - 1;
    }
    return a == 0 && b != 0;
}
} // namespace detail

/// The canonical list: cardinality classes in decreasing order, lexicographic
/// within each class.
inline SubsetList canonical_list(int t) {
    if (t < 1 || t > kMaxDecodersForSets)
        throw std::invalid_argument("canonical_list: t must be in [1, " +
                                    std::to_string(kMaxDecodersForSets) + "]");
    SubsetList v;
    v.t = t;
    for (std::uint32_t s = 1; s < (1u << t); ++s) v.subsets.push_back(s);
    std::stable_sort(v.subsets.begin(), v.subsets.end(), [](std::uint32_t a, std::uint32_t b) {
        const int ca = std::popcount(a), cb = std::popcount(b);
        if (ca != cb) return ca > cb;
        return detail::lex_less(a, b);
    });
    return v;
}

/// Per-subset index sets derived from the list order. All entries are
/// 0-based positions into v.subsets.
struct LatticeSets {
    /// strict supersets of S_j (always earlier in a valid list)
    std::vector<std::vector<int>> supersets;
    /// earlier subsets that are not supersets of S_j
    std::vector<std::vector<int>> earlier_nonsupersets;
    /// later subsets intersecting S_j
    std::vector<std::vector<int>> later_intersecting;
    /// earlier non-supersets linked forward: the extra codewords the encoder
    /// must stay jointly typical with at stage j
    std::vector<std::vector<int>> extra_encoding;
    /// decoder_known[j][l-1] (for l in S_j): members of extra_encoding[j]
    /// whose subset contains l, i.e. codewords decoder l already holds
    std::vector<std::vector<std::vector<int>>> decoder_known;
};

inline LatticeSets derive_sets(const SubsetList& v) {
    {
        auto bad = validate_list(v);
        if (!bad.empty()) throw std::invalid_argument("derive_sets: " + bad.front());
    }
    const int m = v.count();
    LatticeSets out;
    out.supersets.resize(m);
    out.earlier_nonsupersets.resize(m);
    out.later_intersecting.resize(m);
    out.extra_encoding.resize(m);
    out.decoder_known.assign(m, std::vector<std::vector<int>>(v.t));

    for (int j = 0; j < m; ++j) {
        const std::uint32_t sj = v.subsets[j];
        for (int i = 0; i < m; ++i) {
            const std::uint32_t si = v.subsets[i];
            if (si != sj && (si & sj) == sj) out.supersets[j].push_back(i);
            if (i < j && (si & sj) != sj) out.earlier_nonsupersets[j].push_back(i);
            if (i > j && (si & sj) != 0) out.later_intersecting[j].push_back(i);
        }
        for (int i : out.earlier_nonsupersets[j]) {
            const std::uint32_t si = v.subsets[i];
            bool linked = false;
            for (int k : out.later_intersecting[j])
                if (si & v.subsets[k]) {
                    linked = true;
                    break;
                }
            if (linked) out.extra_encoding[j].push_back(i);
        }
        for (int l = 1; l <= v.t; ++l) {
            if (!(sj & (1u << (l - 1)))) continue;
            for (int i : out.extra_encoding[j])
                if (v.subsets[i] & (1u << (l - 1))) out.decoder_known[j][l - 1].push_back(i);
        }
    }
    return out;
}

/// Every valid list for a given t. Count is the product of factorials of the
/// cardinality-class sizes, so this is capped at t <= 3.
inline std::vector<SubsetList> enumerate_lists(int t) {
    if (t < 1) throw std::invalid_argument("enumerate_lists: t must be >= 1");
    if (t > kMaxDecodersForEnum)
        throw std::invalid_argument("enumerate_lists: too large for exhaustive enumeration (t > " +
                                    std::to_string(kMaxDecodersForEnum) + ")");
    // one sorted class per cardinality, largest first
    std::vector<std::vector<std::uint32_t>> classes(t);
    for (std::uint32_t s = 1; s < (1u << t); ++s)
        classes[t - std::popcount(s)].push_back(s);
    for (auto& c : classes) std::sort(c.begin(), c.end(), detail::lex_less);

    std::vector<SubsetList> out;
    std::vector<std::vector<std::uint32_t>> perms_per_class;
    for (auto& c : classes) {
        std::vector<std::uint32_t> flat; // permutations concatenated
        std::vector<std::uint32_t> p = c;
        do {
            flat.insert(flat.end(), p.begin(), p.end());
        } while (std::next_permutation(p.begin(), p.end(), detail::lex_less));
        perms_per_class.push_back(std::move(flat));
    }
    std::vector<std::size_t> pick(classes.size(), 0);
    while (true) {
        SubsetList v;
        v.t = t;
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const std::size_t w = classes[c].size();
            const auto* base = perms_per_class[c].data() + pick[c] * w;
            v.subsets.insert(v.subsets.end(), base, base + w);
        }
        out.push_back(std::move(v));
        std::size_t c = classes.size();
        while (c > 0) {
            --c;
            if (++pick[c] * classes[c].size() < perms_per_class[c].size()) break;
            pick[c] = 0;
            if (c == 0) return out;
        }
    }
}

} // namespace sirate
