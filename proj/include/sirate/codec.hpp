#pragma once

//
// Monte-Carlo implementation of the staged nested-codebook scheme.
//
// One codebook per nonempty decoder subset, generated iid from the marginal
// of that subset's auxiliary variable. Encoding walks the subset list in
// order; at stage j it picks the lowest-index codeword that is jointly
// typical with the source word, the codewords of strict supersets, and the
// forward-linked extra codewords. Bin index i of stage j travels on channel
// S_j[i]. Decoder l resolves each stage containing l by scanning the bin
// consistent with the indices it heard on channels 1..l, testing joint
// typicality against its side information and everything it has already
// decoded. Failures are data, not errors: the encoder falls back to index 1,
// the decoder records whether the bin held no typical codeword or several.
//
// All randomness is derived from a single seed; repeated runs are identical.
//

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aux_system.hpp"
#include "bounds.hpp"
#include "detail/rng.hpp"
#include "info.hpp"
#include "lattice.hpp"
#include "typicality.hpp"

namespace sirate {

inline constexpr double kRateFloor = 1e-12; // rates below this count as zero

struct SubsetRates {
    std::vector<double> layer; // R_{S_j,1..|S_j|}, bits per symbol
    double unbinned = 0.0;     // R'_{S_j}
};

struct RateAllocation {
    std::vector<SubsetRates> per_subset;

    /// r_l = sum over subsets of the layer rate whose bin travels on channel l.
    std::vector<double> channel_rates(const SubsetList& v) const {
        std::vector<double> r(v.t, 0.0);
        for (int j = 0; j < v.count(); ++j) {
            const auto members = v.members(j);
            for (std::size_t i = 0; i < members.size(); ++i)
                r[members[i] - 1] += per_subset[j].layer[i];
        }
        return r;
    }
};

/// Raw information charges behind the allocation constraints.
struct AllocationInfo {
    /// I(supersets, extras, X ; U_j), the codebook-size floor per subset
    std::vector<double> encode_cost;
    /// decode_gain[j][i]: I(U_j ; supersets, already-known, Y_l) for the
    /// decoder l = S_j[i+1], the bin-size ceiling once i+1 indices are known
    std::vector<std::vector<double>> decode_gain;
};

inline AllocationInfo allocation_info(const AuxSystem& sys, const LatticeSets& lat) {
    const JointPmf joint = induce_joint(sys);
    AllocationInfo info;
    for (int j = 0; j < sys.v.count(); ++j) {
        VariableSet enc{sys.x_axis()};
        for (int i : lat.supersets[j]) enc.push_back(sys.aux_axis(i));
        for (int i : lat.extra_encoding[j]) enc.push_back(sys.aux_axis(i));
        info.encode_cost.push_back(
            std::max(0.0, conditional_mutual_information(joint, enc, {sys.aux_axis(j)})));

        std::vector<double> gains;
        for (int l : sys.v.members(j)) {
            VariableSet known{sys.y_axis(l)};
            for (int i : lat.supersets[j]) known.push_back(sys.aux_axis(i));
            for (int i : lat.decoder_known[j][l - 1]) known.push_back(sys.aux_axis(i));
            gains.push_back(
                std::max(0.0, conditional_mutual_information(joint, {sys.aux_axis(j)}, known)));
        }
        info.decode_gain.push_back(std::move(gains));
    }
    return info;
}

struct AllocationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Margin > 0 provisions the codebook above the encoding floor and the bins
/// below each decoding ceiling, both multiplicatively. A negative margin
/// keeps the encoder provisioned but deliberately overfills the bins past
/// the decoding constraint.
inline RateAllocation allocate_rates_from(const AllocationInfo& info, const SubsetList& v,
                                          double margin) {
    RateAllocation alloc;
    for (int j = 0; j < v.count(); ++j) {
        const auto members = v.members(j);
        const std::size_t s = members.size();
        const double total = (1.0 + std::abs(margin)) * info.encode_cost[j];

        // unresolved rate after i indices are known; non-increasing by taking
        // the running minimum over the decoders seen so far
        std::vector<double> unresolved(s + 1, total);
        double running = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i <= s; ++i) {
            running = std::min(running, info.decode_gain[j][i - 1]);
            unresolved[i] = std::max(0.0, (1.0 - margin) * running);
            if (unresolved[i] > unresolved[i - 1] + 1e-9)
                throw AllocationError("allocate_rates: empty feasible interval at subset " +
                                      std::to_string(j + 1) + ", decoder " +
                                      std::to_string(members[i - 1]));
            unresolved[i] = std::min(unresolved[i], unresolved[i - 1]);
        }

        SubsetRates rates;
        for (std::size_t i = 1; i <= s; ++i) {
            double r = unresolved[i - 1] - unresolved[i];
            rates.layer.push_back(r < kRateFloor ? 0.0 : r);
        }
        rates.unbinned = unresolved[s] < kRateFloor ? 0.0 : unresolved[s];
        alloc.per_subset.push_back(std::move(rates));
    }
    return alloc;
}

inline RateAllocation allocate_rates(const AuxSystem& sys, const LatticeSets& lat, double margin) {
    return allocate_rates_from(allocation_info(sys, lat), sys.v, margin);
}

struct NestedCodebook {
    struct Book {
        std::vector<std::size_t> dims; // K_1, ..., K_s, K'
        int alphabet = 1;
        std::size_t n = 0;
        std::vector<std::uint8_t> symbols;   // count x n, row-major
        std::vector<std::uint64_t> packed;   // count x words when alphabet <= 2
        std::size_t words = 0;

        std::size_t count() const {
            std::size_t c = 1;
            for (std::size_t d : dims) c *= d;
            return c;
        }
        std::span<const std::uint8_t> codeword(std::size_t k) const {
            return {symbols.data() + k * n, n};
        }
        const std::uint64_t* packed_codeword(std::size_t k) const {
            return packed.data() + k * words;
        }
    };
    std::size_t n = 0;
    std::vector<Book> books; // one per subset
};

inline std::size_t codeword_dim(std::size_t n, double rate) {
    if (rate <= kRateFloor) return 1;
    const double k = std::exp2(static_cast<double>(n) * rate);
    if (k > 1e15) throw std::invalid_argument("codeword count overflow");
    return static_cast<std::size_t>(std::max(1.0, std::ceil(k - 1e-9)));
}

inline std::vector<std::uint64_t> pack_binary(std::span<const std::uint8_t> seq,
                                              std::size_t words) {
    std::vector<std::uint64_t> out(words, 0);
    for (std::size_t i = 0; i < seq.size(); ++i)
        if (seq[i]) out[i >> 6] |= (std::uint64_t{1} << (i & 63));
    return out;
}

/// Generates every codebook iid from the per-subset marginals. Refuses
/// configurations whose total stored symbols exceed `storage_budget`.
inline NestedCodebook build_codebooks(const AuxSystem& sys, const RateAllocation& alloc,
                                      std::size_t n, std::uint64_t seed,
                                      std::size_t storage_budget) {
    const JointPmf joint = induce_joint(sys);
    NestedCodebook cb;
    cb.n = n;

    std::size_t total_symbols = 0;
    std::vector<std::size_t> counts;
    for (int j = 0; j < sys.v.count(); ++j) {
        std::size_t c = 1;
        for (double r : alloc.per_subset[j].layer) c *= codeword_dim(n, r);
        c *= codeword_dim(n, alloc.per_subset[j].unbinned);
        counts.push_back(c);
        total_symbols += c * n;
    }
    if (total_symbols > storage_budget)
        throw std::invalid_argument("codebook storage " + std::to_string(total_symbols) +
                                    " symbols exceeds the budget of " +
                                    std::to_string(storage_budget));

    for (int j = 0; j < sys.v.count(); ++j) {
        NestedCodebook::Book book;
        book.n = n;
        book.alphabet = sys.aux_sizes[j];
        for (double r : alloc.per_subset[j].layer) book.dims.push_back(codeword_dim(n, r));
        book.dims.push_back(codeword_dim(n, alloc.per_subset[j].unbinned));

        const JointPmf marg = marginalize(joint, {sys.aux_axis(j)});
        std::vector<double> cdf(marg.cell.size());
        double acc = 0.0;
        for (std::size_t a = 0; a < marg.cell.size(); ++a) {
            acc += marg.cell[a];
            cdf[a] = acc;
        }
        detail::Rng rng(detail::mix_seed(detail::mix_seed(seed, 0xC0DEB00Cull), j));
        book.symbols.resize(counts[j] * n);
        for (std::uint8_t& s : book.symbols) {
            const double u = rng.unit();
            std::size_t a = 0;
            while (a + 1 < cdf.size() && u >= cdf[a]) ++a;
            s = static_cast<std::uint8_t>(a);
        }
        if (book.alphabet <= 2) {
            book.words = (n + 63) / 64;
            book.packed.reserve(counts[j] * book.words);
            for (std::size_t k = 0; k < counts[j]; ++k) {
                const auto w = pack_binary(book.codeword(k), book.words);
                book.packed.insert(book.packed.end(), w.begin(), w.end());
            }
        }
        cb.books.push_back(std::move(book));
    }
    return cb;
}

struct StageRecord {
    bool success = false;
    std::vector<std::size_t> index; // 0-based (k_1..k_s, k'); all zero on failure
};

struct Transcript {
    std::vector<StageRecord> stages;
    /// channel_bins[l-1]: bin indices sent on channel l, in stage order
    std::vector<std::vector<std::size_t>> channel_bins;
};

enum class DecodeStatus { Ok, NoneTypical, Ambiguous };

struct DecodeStage {
    bool attempted = false;
    DecodeStatus status = DecodeStatus::Ok;
    std::vector<std::size_t> index;
    bool agrees = false; // index matches the encoder's choice
};

struct DecodeResult {
    std::vector<DecodeStage> stages; // indexed by subset j
    Sequence xhat;
};

namespace codec_detail {

struct StageTest {
    VariableSet axes;          // sorted induced-joint axes entering the test
    std::vector<double> ref;   // marginal pmf cells over those axes
    std::vector<int> sizes;
    int cand_pos = 0;          // position of the stage's own axis
    std::vector<double> lo, hi; // count bands scaled by n (filled per n)
    bool fast2 = false;        // two binary axes, candidate first
};

inline StageTest make_test(const JointPmf& joint, const AuxSystem& sys, VariableSet axes,
                           int cand_axis) {
    StageTest t;
    axes.push_back(cand_axis);
    std::sort(axes.begin(), axes.end());
    axes.erase(std::unique(axes.begin(), axes.end()), axes.end());
    // degenerate axes never move a count cell; keep only the candidate
    std::erase_if(axes, [&](int a) { return joint.sizes[a] == 1 && a != cand_axis; });
    t.axes = axes;
    const JointPmf m = marginalize(joint, axes);
    t.ref = m.cell;
    t.sizes = m.sizes;
    t.cand_pos =
        static_cast<int>(std::lower_bound(axes.begin(), axes.end(), cand_axis) - axes.begin());
    t.fast2 = (axes.size() == 2 && t.sizes[0] == 2 && t.sizes[1] == 2 && t.cand_pos == 0);
    (void)sys;
    return t;
}

inline void fill_bands(StageTest& t, std::size_t n, double eps) {
    t.lo.resize(t.ref.size());
    t.hi.resize(t.ref.size());
    for (std::size_t c = 0; c < t.ref.size(); ++c) {
        t.lo[c] = static_cast<double>(n) * t.ref[c] * (1.0 - eps) - 1e-9;
        t.hi[c] = static_cast<double>(n) * t.ref[c] * (1.0 + eps) + 1e-9;
    }
}

// Counting test against explicit sequences; candidate supplied separately.
inline bool passes(const StageTest& t, std::span<const std::uint8_t* const> fixed,
                   const std::uint8_t* cand, std::size_t n, std::vector<std::size_t>& counts) {
    counts.assign(t.ref.size(), 0);
    const int na = static_cast<int>(t.axes.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lin = 0;
        int f = 0;
        for (int a = 0; a < na; ++a) {
            const std::uint8_t sym = (a == t.cand_pos) ? cand[i] : fixed[f++][i];
            lin = lin * t.sizes[a] + sym;
        }
        ++counts[lin];
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
        const double k = static_cast<double>(counts[c]);
        if (k < t.lo[c] || k > t.hi[c]) return false;
    }
    return true;
}

// Fast path: candidate and one fixed sequence, both binary.
inline bool passes_fast2(const StageTest& t, const std::uint64_t* cand_words,
                         const std::uint64_t* fixed_words, std::size_t words, std::size_t n,
                         std::size_t fixed_ones) {
    std::size_t n11 = 0, n1x = 0;
    for (std::size_t w = 0; w < words; ++w) {
        n11 += std::popcount(cand_words[w] & fixed_words[w]);
        n1x += std::popcount(cand_words[w]);
    }
    const std::size_t n10 = n1x - n11;
    const std::size_t n01 = fixed_ones - n11;
    const std::size_t n00 = n - n11 - n10 - n01;
    // cells ordered (cand, fixed): 00, 01, 10, 11
    const double c0 = static_cast<double>(n00), c1 = static_cast<double>(n01);
    const double c2 = static_cast<double>(n10), c3 = static_cast<double>(n11);
    return c0 >= t.lo[0] && c0 <= t.hi[0] && c1 >= t.lo[1] && c1 <= t.hi[1] && c2 >= t.lo[2] &&
           c2 <= t.hi[2] && c3 >= t.lo[3] && c3 <= t.hi[3];
}

} // namespace codec_detail

/// Everything encode/decode need that does not change across trials.
class CodecContext {
public:
    CodecContext(const AuxSystem& sys, std::span<const DistortionMeasure> measures,
                 EpsilonSchedule schedule)
        : sys_(sys), lat_(derive_sets(sys.v)), joint_(induce_joint(sys)),
          schedule_(std::move(schedule)) {
        schedule_.require_monotone();
        const int stages = 1 << sys.source.t;
        if (static_cast<int>(schedule_.eps.size()) != stages + 1)
            throw std::invalid_argument("epsilon schedule must have 2^t + 1 entries");

        for (int j = 0; j < sys_.v.count(); ++j) {
            VariableSet axes{sys_.x_axis()};
            for (int i : lat_.supersets[j]) axes.push_back(sys_.aux_axis(i));
            for (int i : lat_.extra_encoding[j]) axes.push_back(sys_.aux_axis(i));
            enc_.push_back(codec_detail::make_test(joint_, sys_, axes, sys_.aux_axis(j)));
        }
        dec_.assign(sys_.v.count(), {});
        for (int j = 0; j < sys_.v.count(); ++j) {
            dec_[j].resize(sys_.source.t);
            for (int l : sys_.v.members(j)) {
                VariableSet axes{sys_.y_axis(l)};
                for (int i : lat_.supersets[j]) axes.push_back(sys_.aux_axis(i));
                for (int i : lat_.decoder_known[j][l - 1]) axes.push_back(sys_.aux_axis(i));
                dec_[j][l - 1] = codec_detail::make_test(joint_, sys_, axes, sys_.aux_axis(j));
            }
        }
        for (int l = 1; l <= sys_.source.t; ++l) {
            auto r = optimal_reconstruction_on(joint_, sys_.x_axis(),
                                               decoder_domain_axes(sys_, lat_, l), l,
                                               measures[l - 1]);
            expected_distortion_.push_back(r.achieved);
            recon_.push_back(std::move(r.fn));
        }
        source_pmf_ = sys_.source.as_pmf();
    }

    void set_blocklength(std::size_t n) {
        n_ = n;
        for (int j = 0; j < sys_.v.count(); ++j) {
            codec_detail::fill_bands(enc_[j], n, schedule_.eps[j + 1]);
            for (int l : sys_.v.members(j))
                codec_detail::fill_bands(dec_[j][l - 1], n, schedule_.eps[j + 2]);
        }
    }

    const AuxSystem& system() const { return sys_; }
    const LatticeSets& lattice() const { return lat_; }
    const JointPmf& joint() const { return joint_; }
    const JointPmf& source_pmf() const { return source_pmf_; }
    const EpsilonSchedule& schedule() const { return schedule_; }
    std::size_t blocklength() const { return n_; }
    double expected_distortion(int l) const { return expected_distortion_[l - 1]; }
    const ReconstructionFunction& reconstruction(int l) const { return recon_[l - 1]; }
    const codec_detail::StageTest& encoder_test(int j) const { return enc_[j]; }
    const codec_detail::StageTest& decoder_test(int j, int l) const { return dec_[j][l - 1]; }

private:
    AuxSystem sys_;
    LatticeSets lat_;
    JointPmf joint_;
    EpsilonSchedule schedule_;
    JointPmf source_pmf_;
    std::size_t n_ = 0;
    std::vector<codec_detail::StageTest> enc_;
    std::vector<std::vector<codec_detail::StageTest>> dec_;
    std::vector<ReconstructionFunction> recon_;
    std::vector<double> expected_distortion_;
};

namespace codec_detail {

inline std::vector<std::size_t> unflatten(std::size_t lin, std::span<const std::size_t> dims) {
    std::vector<std::size_t> idx(dims.size());
    for (std::size_t a = dims.size(); a-- > 0;) {
        idx[a] = lin % dims[a];
        lin /= dims[a];
    }
    return idx;
}

inline std::size_t flatten(std::span<const std::size_t> idx, std::span<const std::size_t> dims) {
    std::size_t lin = 0;
    for (std::size_t a = 0; a < dims.size(); ++a) lin = lin * dims[a] + idx[a];
    return lin;
}

} // namespace codec_detail

/// Stage-by-stage typical-set encoding. Ties resolve to the lowest index;
/// a failed stage records index 1 (stored 0-based as zeros).
inline Transcript encode(std::span<const std::uint8_t> x, const NestedCodebook& cb,
                         const CodecContext& ctx) {
    const AuxSystem& sys = ctx.system();
    const std::size_t n = ctx.blocklength();
    if (x.size() != n) throw std::invalid_argument("encode: blocklength mismatch");

    Transcript tr;
    tr.channel_bins.assign(sys.source.t, {});
    std::vector<const std::uint8_t*> chosen(sys.v.count(), nullptr);
    std::vector<std::size_t> counts;

    // fast-path scratch
    const std::size_t words = (n + 63) / 64;
    std::vector<std::uint64_t> xw;
    std::size_t x_ones = 0;

    for (int j = 0; j < sys.v.count(); ++j) {
        const auto& test = ctx.encoder_test(j);
        const auto& book = cb.books[j];

        // fixed sequences in sorted-axis order, skipping the candidate axis
        std::vector<const std::uint8_t*> fixed;
        for (int a : test.axes) {
            if (a == sys.aux_axis(j)) continue;
            fixed.push_back(a == sys.x_axis() ? x.data() : chosen[a]);
        }

        const std::size_t count = book.count();
        std::size_t found = count;
        if (test.fast2 && book.alphabet <= 2 && test.axes[1] == sys.x_axis()) {
            if (xw.empty()) {
                xw = pack_binary(x, words);
                for (std::size_t w = 0; w < words; ++w) x_ones += std::popcount(xw[w]);
            }
            for (std::size_t k = 0; k < count; ++k)
                if (codec_detail::passes_fast2(test, book.packed_codeword(k), xw.data(), words, n,
                                               x_ones)) {
                    found = k;
                    break;
                }
        } else {
            for (std::size_t k = 0; k < count; ++k)
                if (codec_detail::passes(test, fixed, book.codeword(k).data(), n, counts)) {
                    found = k;
                    break;
                }
        }

        StageRecord rec;
        if (found < count) {
            rec.success = true;
            rec.index = codec_detail::unflatten(found, book.dims);
            chosen[j] = book.codeword(found).data();
        } else {
            rec.success = false;
            rec.index.assign(book.dims.size(), 0);
            chosen[j] = book.codeword(0).data();
        }
        const auto members = sys.v.members(j);
        for (std::size_t i = 0; i < members.size(); ++i)
            tr.channel_bins[members[i] - 1].push_back(rec.index[i]);
        tr.stages.push_back(std::move(rec));
    }
    return tr;
}

/// Decoder l: resolves every stage whose subset contains l, reading only
/// bin indices that travelled on channels 1..l, then applies its per-letter
/// reconstruction to the decoded codewords.
inline DecodeResult decode(int l, const Transcript& tr, std::span<const std::uint8_t> y,
                           const NestedCodebook& cb, const CodecContext& ctx) {
    const AuxSystem& sys = ctx.system();
    const std::size_t n = ctx.blocklength();
    if (y.size() != n) throw std::invalid_argument("decode: blocklength mismatch");

    DecodeResult out;
    out.stages.resize(sys.v.count());
    std::vector<const std::uint8_t*> decoded(sys.v.count(), nullptr);
    std::vector<std::size_t> counts;

    const std::size_t words = (n + 63) / 64;
    std::vector<std::uint64_t> yw;
    std::size_t y_ones = 0;

    for (int j = 0; j < sys.v.count(); ++j) {
        const auto members = sys.v.members(j);
        if (std::find(members.begin(), members.end(), l) == members.end()) continue;
        const auto& test = ctx.decoder_test(j, l);
        const auto& book = cb.books[j];

        // known bin indices: exactly those sent on channels 1..l
        std::size_t known = 0;
        while (known < members.size() && members[known] <= l) ++known;

        std::vector<const std::uint8_t*> fixed;
        for (int a : test.axes) {
            if (a == sys.aux_axis(j)) continue;
            fixed.push_back(a == sys.y_axis(l) ? y.data() : decoded[a]);
        }

        // free dims: layers beyond `known`, plus the unbinned index
        std::vector<std::size_t> free_dims(book.dims.begin() + known, book.dims.end());
        std::size_t free_count = 1;
        for (std::size_t d : free_dims) free_count *= d;

        std::vector<std::size_t> full(book.dims.size(), 0);
        for (std::size_t i = 0; i < known; ++i) full[i] = tr.stages[j].index[i];

        std::size_t first_hit = free_count;
        bool ambiguous = false;
        const bool fast = test.fast2 && book.alphabet <= 2 && test.axes[1] == sys.y_axis(l);
        if (fast && yw.empty()) {
            yw = pack_binary(y, words);
            for (std::size_t w = 0; w < words; ++w) y_ones += std::popcount(yw[w]);
        }
        for (std::size_t f = 0; f < free_count; ++f) {
            const auto suffix = codec_detail::unflatten(f, free_dims);
            for (std::size_t i = 0; i < suffix.size(); ++i) full[known + i] = suffix[i];
            const std::size_t k = codec_detail::flatten(full, book.dims);
            const bool ok =
                fast ? codec_detail::passes_fast2(test, book.packed_codeword(k), yw.data(), words,
                                                  n, y_ones)
                     : codec_detail::passes(test, fixed, book.codeword(k).data(), n, counts);
            if (ok) {
                if (first_hit == free_count) {
                    first_hit = f;
                } else {
                    ambiguous = true;
                    break;
                }
            }
        }

        DecodeStage stage;
        stage.attempted = true;
        if (first_hit == free_count) {
            stage.status = DecodeStatus::NoneTypical;
            for (std::size_t i = known; i < full.size(); ++i) full[i] = 0;
        } else {
            stage.status = ambiguous ? DecodeStatus::Ambiguous : DecodeStatus::Ok;
            const auto suffix = codec_detail::unflatten(first_hit, free_dims);
            for (std::size_t i = 0; i < suffix.size(); ++i) full[known + i] = suffix[i];
        }
        stage.index = full;
        stage.agrees = (full == tr.stages[j].index);
        const std::size_t k = codec_detail::flatten(full, book.dims);
        decoded[j] = book.codeword(k).data();
        out.stages[j] = std::move(stage);
    }

    // per-letter reconstruction on the entitled tuple
    const auto& fn = ctx.reconstruction(l);
    out.xhat.resize(n);
    std::vector<int> tuple(fn.domain_axes.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < fn.domain_axes.size(); ++a) {
            const int axis = fn.domain_axes[a];
            tuple[a] = (axis == sys.y_axis(l)) ? y[i] : decoded[axis][i];
        }
        out.xhat[i] = static_cast<std::uint8_t>(fn.table[fn.tuple_index(tuple)]);
    }
    return out;
}

struct SimOptions {
    double eps0 = 0.05;
    std::optional<EpsilonSchedule> schedule; // overrides eps0 when set
    std::size_t storage_budget = std::size_t{1} << 26;
};

struct DecoderStageStats {
    // conditioned as in the staged analysis: source tuple typical, encoder
    // clean everywhere, this decoder clean at its earlier stages
    std::uint64_t attempts = 0;
    std::uint64_t none_typical = 0;
    std::uint64_t ambiguous = 0;
    std::uint64_t disagreements = 0;
    // conditioned only on the source tuple being typical
    std::uint64_t raw_attempts = 0;
    std::uint64_t raw_none = 0;
    std::uint64_t raw_ambiguous = 0;

    std::uint64_t failures() const { return none_typical + ambiguous; }
    double failure_rate() const {
        return attempts ? static_cast<double>(failures()) / attempts : 0.0;
    }
    double ambiguity_rate() const {
        return attempts ? static_cast<double>(ambiguous) / attempts : 0.0;
    }
    double raw_failure_rate() const {
        return raw_attempts ? static_cast<double>(raw_none + raw_ambiguous) / raw_attempts : 0.0;
    }
    double raw_ambiguity_rate() const {
        return raw_attempts ? static_cast<double>(raw_ambiguous) / raw_attempts : 0.0;
    }
};

struct BlocklengthStats {
    std::size_t n = 0;
    std::uint64_t trials = 0;
    std::uint64_t e1_count = 0;
    std::vector<std::uint64_t> encoder_attempts; // per stage, conditioned as in the error analysis
    std::vector<std::uint64_t> encoder_failures;
    std::vector<std::vector<DecoderStageStats>> decoder; // [l-1][j]
    std::vector<double> mean_distortion;                 // per decoder, all trials
    double delta1 = 0.0;    // source-typicality bound at eps0
    double mu_source = 0.0;
    double mu_joint = 0.0;
    bool failure_bounds_applicable = false;

    double e1_rate() const { return trials ? static_cast<double>(e1_count) / trials : 0.0; }
    double encoder_failure_rate(int j) const {
        return encoder_attempts[j] ? static_cast<double>(encoder_failures[j]) / encoder_attempts[j]
                                   : 0.0;
    }
};

struct SimReport {
    EpsilonSchedule schedule;
    RateAllocation allocation;
    std::vector<double> channel_rates;
    std::vector<double> distortion_targets;
    std::vector<BlocklengthStats> per_n;
};

/// Full Monte-Carlo run over a grid of blocklengths. Encoder stage counts
/// condition on the source tuple being typical and all earlier stages
/// succeeding; decoder stage counts additionally condition on the encoder
/// succeeding everywhere and the decoder's own earlier stages being clean.
/// Mean distortion is unconditional.
inline SimReport run_trials(const AuxSystem& sys, const DistortionVector& d,
                            std::span<const DistortionMeasure> measures,
                            std::span<const std::size_t> ns, std::uint64_t trials, double margin,
                            std::uint64_t seed, const SimOptions& opts = {}) {
    EpsilonSchedule schedule = opts.schedule ? *opts.schedule
                                             : EpsilonSchedule::defaults(sys.source.t, opts.eps0);
    CodecContext ctx(sys, measures, schedule);
    const LatticeSets& lat = ctx.lattice();
    const AllocationInfo info = allocation_info(sys, lat);
    RateAllocation alloc = allocate_rates_from(info, sys.v, margin);

    SimReport report;
    report.schedule = schedule;
    report.allocation = alloc;
    report.channel_rates = alloc.channel_rates(sys.v);
    report.distortion_targets = d.d;

    const JointPmf& q = ctx.source_pmf();
    std::vector<double> qcdf(q.cell.size());
    double acc = 0.0;
    for (std::size_t c = 0; c < q.cell.size(); ++c) {
        acc += q.cell[c];
        qcdf[c] = acc;
    }
    const int t = sys.source.t;
    const int m = sys.v.count();

    for (std::size_t n : ns) {
        ctx.set_blocklength(n);
        const NestedCodebook cb =
            build_codebooks(sys, alloc, n, detail::mix_seed(seed, n), opts.storage_budget);

        BlocklengthStats st;
        st.n = n;
        st.trials = trials;
        st.encoder_attempts.assign(m, 0);
        st.encoder_failures.assign(m, 0);
        st.decoder.assign(t, std::vector<DecoderStageStats>(m));
        st.mean_distortion.assign(t, 0.0);
        st.mu_source = mu_of(q);
        st.mu_joint = mu_of(ctx.joint());
        st.delta1 = delta1_bound(n, schedule.eps.front(), q);
        st.failure_bounds_applicable = schedule.within_bound_validity(st.mu_joint);

        Sequence x(n);
        std::vector<Sequence> ys(t, Sequence(n));
        std::vector<int> cellidx(1 + t);

        for (std::uint64_t trial = 0; trial < trials; ++trial) {
            detail::Rng rng(detail::mix_seed(detail::mix_seed(seed, n), trial));
            for (std::size_t i = 0; i < n; ++i) {
                const double u = rng.unit();
                std::size_t cell = 0;
                while (cell + 1 < qcdf.size() && u >= qcdf[cell]) ++cell;
                std::size_t rem = cell;
                for (int a = t; a >= 0; --a) {
                    cellidx[a] = static_cast<int>(rem % q.sizes[a]);
                    rem /= q.sizes[a];
                }
                x[i] = static_cast<std::uint8_t>(cellidx[0]);
                for (int l = 1; l <= t; ++l) ys[l - 1][i] = static_cast<std::uint8_t>(cellidx[l]);
            }

            std::vector<std::span<const std::uint8_t>> tuple;
            tuple.emplace_back(x);
            for (int l = 1; l <= t; ++l) tuple.emplace_back(ys[l - 1]);
            const bool e1 = !is_jointly_typical(tuple, q, schedule.eps.front());
            if (e1) ++st.e1_count;

            const Transcript tr = encode(x, cb, ctx);
            bool enc_clean = !e1;
            for (int j = 0; j < m; ++j) {
                if (enc_clean) {
                    ++st.encoder_attempts[j];
                    if (!tr.stages[j].success) {
                        ++st.encoder_failures[j];
                        enc_clean = false;
                    }
                }
            }
            const bool enc_all =
                std::all_of(tr.stages.begin(), tr.stages.end(),
                            [](const StageRecord& r) { return r.success; });

            for (int l = 1; l <= t; ++l) {
                const DecodeResult dr = decode(l, tr, ys[l - 1], cb, ctx);
                bool dec_clean = !e1 && enc_all;
                for (int j = 0; j < m; ++j) {
                    if (!dr.stages[j].attempted) continue;
                    auto& ds = st.decoder[l - 1][j];
                    if (!e1) {
                        ++ds.raw_attempts;
                        if (dr.stages[j].status == DecodeStatus::NoneTypical) ++ds.raw_none;
                        if (dr.stages[j].status == DecodeStatus::Ambiguous) ++ds.raw_ambiguous;
                    }
                    if (dec_clean) {
                        ++ds.attempts;
                        if (dr.stages[j].status == DecodeStatus::NoneTypical) ++ds.none_typical;
                        if (dr.stages[j].status == DecodeStatus::Ambiguous) ++ds.ambiguous;
                        if (!dr.stages[j].agrees) ++ds.disagreements;
                        if (dr.stages[j].status != DecodeStatus::Ok) dec_clean = false;
                    }
                }
                double dist = 0.0;
                const auto& meas = measures[l - 1];
                for (std::size_t i = 0; i < n; ++i) dist += meas.at(x[i], dr.xhat[i]);
                st.mean_distortion[l - 1] += dist / static_cast<double>(n);
            }
        }
        for (int l = 0; l < t; ++l) st.mean_distortion[l] /= static_cast<double>(trials);
        report.per_n.push_back(std::move(st));
    }
    return report;
}

} // namespace sirate
