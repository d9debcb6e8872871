#pragma once

//
// JSON file formats.
//
// Source spec:
//   {"t": int, "alphabets": [|X|, |Y1|, ..., |Yt|],
//    "pmf": [flat row-major, x slowest, y_t fastest],
//    "distortion": [per-decoder |X| x |Xhat_l| matrices],
//    "d": [t targets]}
//
// Auxiliary system spec:
//   {"v": [[subset members] ...], "aux_sizes": [...],
//    "channel": [flat p(u*|x), x-major]}
//
// Private-message source:
//   {"t": int, "w_alphabets": [...], "y_alphabets": [...],
//    "pmf": [flat row-major, w_1 slowest, y_t fastest]}
//
// Schema violations are reported with the line of the offending key.
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aux_system.hpp"
#include "bounds.hpp"
#include "lattice.hpp"
#include "source.hpp"

namespace sirate {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SourceSpec {
    JointSourcePmf q;
    std::vector<DistortionMeasure> measures;
    DistortionVector d;
};

namespace io_detail {

inline int line_of_key(const std::string& text, const std::string& key) {
    const std::string needle = "\"" + key + "\"";
    const auto pos = text.find(needle);
    if (pos == std::string::npos) return 1;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

[[noreturn]] inline void fail(const std::string& text, const std::string& key,
                              const std::string& what) {
    throw SchemaError("line " + std::to_string(line_of_key(text, key)) + ": \"" + key + "\" " +
                      what);
}

inline nlohmann::json parse(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("not valid JSON: ") + e.what());
    }
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename T>
std::vector<T> numeric_array(const std::string& text, const nlohmann::json& j,
                             const std::string& key) {
    if (!j.contains(key)) fail(text, key, "is missing");
    if (!j[key].is_array()) fail(text, key, "must be an array");
    std::vector<T> out;
    for (const auto& v : j[key]) {
        if (!v.is_number()) fail(text, key, "must contain only numbers");
        out.push_back(v.get<T>());
    }
    return out;
}

} // namespace io_detail

inline SourceSpec load_source_spec_text(const std::string& text) {
    using io_detail::fail;
    const nlohmann::json j = io_detail::parse(text);
    SourceSpec spec;
    if (!j.contains("t") || !j["t"].is_number_integer()) fail(text, "t", "must be an integer");
    spec.q.t = j["t"].get<int>();
    if (spec.q.t < 1) fail(text, "t", "must be >= 1");
    spec.q.alphabet_sizes = io_detail::numeric_array<int>(text, j, "alphabets");
    if (static_cast<int>(spec.q.alphabet_sizes.size()) != spec.q.t + 1)
        fail(text, "alphabets", "must hold |X| and one size per decoder");
    spec.q.probs = io_detail::numeric_array<double>(text, j, "pmf");
    std::size_t cells = 1;
    for (int s : spec.q.alphabet_sizes) {
        if (s < 1) fail(text, "alphabets", "entries must be >= 1");
        cells *= static_cast<std::size_t>(s);
    }
    if (spec.q.probs.size() != cells)
        fail(text, "pmf",
             "has " + std::to_string(spec.q.probs.size()) + " entries, expected " +
                 std::to_string(cells));

    if (!j.contains("distortion") || !j["distortion"].is_array() ||
        static_cast<int>(j["distortion"].size()) != spec.q.t)
        fail(text, "distortion", "must hold one matrix per decoder");
    for (int l = 1; l <= spec.q.t; ++l) {
        const auto& rows = j["distortion"][l - 1];
        if (!rows.is_array() || static_cast<int>(rows.size()) != spec.q.x_size())
            fail(text, "distortion", "matrix " + std::to_string(l) + " must have |X| rows");
        DistortionMeasure m;
        m.decoder = l;
        m.recon_size = -1;
        for (const auto& row : rows) {
            if (!row.is_array()) fail(text, "distortion", "rows must be arrays");
            if (m.recon_size < 0) m.recon_size = static_cast<int>(row.size());
            if (static_cast<int>(row.size()) != m.recon_size)
                fail(text, "distortion", "rows must share one width");
            for (const auto& v : row) {
                if (!v.is_number()) fail(text, "distortion", "entries must be numbers");
                m.table.push_back(v.get<double>());
            }
        }
        if (m.recon_size < 1) fail(text, "distortion", "rows must be nonempty");
        spec.measures.push_back(std::move(m));
    }
    spec.d.d = io_detail::numeric_array<double>(text, j, "d");
    if (static_cast<int>(spec.d.d.size()) != spec.q.t)
        fail(text, "d", "must hold one target per decoder");
    for (double v : spec.d.d)
        if (v < 0.0) fail(text, "d", "targets must be nonnegative");
    return spec;
}

inline SourceSpec load_source_spec(const std::string& path) {
    return load_source_spec_text(io_detail::slurp(path));
}

/// The subset list and channel for an auxiliary system; the source comes
/// from the accompanying source spec.
inline AuxSystem load_aux_spec_text(const std::string& text, const JointSourcePmf& q) {
    using io_detail::fail;
    const nlohmann::json j = io_detail::parse(text);
    AuxSystem sys;
    sys.source = q;
    if (!j.contains("v") || !j["v"].is_array()) fail(text, "v", "must be a list of subsets");
    sys.v.t = q.t;
    for (const auto& subset : j["v"]) {
        if (!subset.is_array()) fail(text, "v", "subsets must be arrays of decoder labels");
        std::uint32_t mask = 0;
        for (const auto& e : subset) {
            if (!e.is_number_integer()) fail(text, "v", "decoder labels must be integers");
            const int l = e.get<int>();
            if (l < 1 || l > q.t) fail(text, "v", "decoder label out of range");
            mask |= 1u << (l - 1);
        }
        sys.v.subsets.push_back(mask);
    }
    {
        const auto bad = validate_list(sys.v);
        if (!bad.empty()) fail(text, "v", bad.front());
    }
    sys.aux_sizes = io_detail::numeric_array<int>(text, j, "aux_sizes");
    if (sys.aux_sizes.size() != sys.v.subsets.size())
        fail(text, "aux_sizes", "must hold one size per subset");
    sys.channel = io_detail::numeric_array<double>(text, j, "channel");
    const std::size_t want = sys.aux_cells() * static_cast<std::size_t>(q.x_size());
    if (sys.channel.size() != want)
        fail(text, "channel",
             "has " + std::to_string(sys.channel.size()) + " entries, expected " +
                 std::to_string(want));
    {
        const auto bad = validate_system(sys);
        if (!bad.empty()) fail(text, "channel", bad.front());
    }
    return sys;
}

inline AuxSystem load_aux_spec(const std::string& path, const JointSourcePmf& q) {
    return load_aux_spec_text(io_detail::slurp(path), q);
}

inline nlohmann::json aux_spec_json(const AuxSystem& sys) {
    nlohmann::json j;
    j["v"] = nlohmann::json::array();
    for (int k = 0; k < sys.v.count(); ++k) j["v"].push_back(sys.v.members(k));
    j["aux_sizes"] = sys.aux_sizes;
    j["channel"] = sys.channel;
    return j;
}

inline PrivateMessageSource load_lossless_spec_text(const std::string& text) {
    using io_detail::fail;
    const nlohmann::json j = io_detail::parse(text);
    PrivateMessageSource src;
    if (!j.contains("t") || !j["t"].is_number_integer()) fail(text, "t", "must be an integer");
    src.t = j["t"].get<int>();
    if (src.t < 1) fail(text, "t", "must be >= 1");
    src.w_sizes = io_detail::numeric_array<int>(text, j, "w_alphabets");
    src.y_sizes = io_detail::numeric_array<int>(text, j, "y_alphabets");
    if (static_cast<int>(src.w_sizes.size()) != src.t)
        fail(text, "w_alphabets", "must hold one size per message");
    if (static_cast<int>(src.y_sizes.size()) != src.t)
        fail(text, "y_alphabets", "must hold one size per decoder");
    src.probs = io_detail::numeric_array<double>(text, j, "pmf");
    std::size_t cells = 1;
    for (int s : src.w_sizes) cells *= static_cast<std::size_t>(s);
    for (int s : src.y_sizes) cells *= static_cast<std::size_t>(s);
    if (src.probs.size() != cells)
        fail(text, "pmf",
             "has " + std::to_string(src.probs.size()) + " entries, expected " +
                 std::to_string(cells));
    double sum = 0.0;
    for (double p : src.probs) {
        if (p < 0.0) fail(text, "pmf", "has negative mass");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbTol) fail(text, "pmf", "does not sum to 1");
    return src;
}

inline PrivateMessageSource load_lossless_spec(const std::string& path) {
    return load_lossless_spec_text(io_detail::slurp(path));
}

} // namespace sirate
