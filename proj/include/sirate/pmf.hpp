#pragma once

//
// Dense joint pmfs over small finite alphabets.
//
// Layout: row-major with axis 0 varying slowest. All information-measure
// code in this library works on these tensors.
//

#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sirate {

/// Axis indices into a joint pmf. Must be distinct and in range.
using VariableSet = std::vector<int>;

inline std::size_t total_cells(std::span<const int> sizes) {
    std::size_t n = 1;
    for (int s : sizes) {
        if (s < 1) throw std::invalid_argument("pmf axis size must be >= 1");
        n *= static_cast<std::size_t>(s);
    }
    return n;
}

/// Dense joint pmf in row-major order (axis 0 slowest). A pmf with no axes
/// has exactly one cell holding the total mass.
struct JointPmf {
    std::vector<int> sizes;
    std::vector<double> cell;

    JointPmf() : cell(1, 0.0) {}
    explicit JointPmf(std::vector<int> s)
        : sizes(std::move(s)), cell(total_cells(sizes), 0.0) {}
    JointPmf(std::vector<int> s, std::vector<double> c)
        : sizes(std::move(s)), cell(std::move(c)) {
        if (cell.size() != total_cells(sizes))
            throw std::invalid_argument("pmf cell count does not match axis sizes");
    }

    int axes() const { return static_cast<int>(sizes.size()); }

    std::size_t index_of(std::span<const int> idx) const {
        std::size_t lin = 0;
        for (int a = 0; a < axes(); ++a) lin = lin * sizes[a] + idx[a];
        return lin;
    }

    double& at(std::span<const int> idx) { return cell[index_of(idx)]; }
    double at(std::span<const int> idx) const { return cell[index_of(idx)]; }

    double total() const {
        double s = 0.0;
        for (double c : cell) s += c;
        return s;
    }
};

inline void validate_vars(const JointPmf& p, const VariableSet& vars, bool allow_empty = false) {
    if (vars.empty() && !allow_empty)
        throw std::invalid_argument("variable set must be nonempty");
    std::vector<char> seen(p.sizes.size(), 0);
    for (int v : vars) {
        if (v < 0 || v >= p.axes())
            throw std::invalid_argument("variable index out of range: " + std::to_string(v));
        if (seen[v]) throw std::invalid_argument("duplicate variable index: " + std::to_string(v));
        seen[v] = 1;
    }
}

/// Sum out every axis not listed in `vars`. The result's axes follow the
/// order given in `vars`.
inline JointPmf marginalize(const JointPmf& p, const VariableSet& vars) {
    validate_vars(p, vars, /*allow_empty=*/true);
    std::vector<int> out_sizes(vars.size());
    for (std::size_t k = 0; k < vars.size(); ++k) out_sizes[k] = p.sizes[vars[k]];
    JointPmf out(out_sizes);

    const int na = p.axes();
    std::vector<std::size_t> in_stride(na, 1);
    for (int a = na - 2; a >= 0; --a)
        in_stride[a] = in_stride[a + 1] * static_cast<std::size_t>(p.sizes[a + 1]);

    for (std::size_t i = 0; i < p.cell.size(); ++i) {
        std::size_t o = 0;
        for (std::size_t k = 0; k < vars.size(); ++k) {
            const int a = vars[k];
            o = o * out_sizes[k] + (i / in_stride[a]) % static_cast<std::size_t>(p.sizes[a]);
        }
        out.cell[o] += p.cell[i];
    }
    return out;
}

} // namespace sirate
