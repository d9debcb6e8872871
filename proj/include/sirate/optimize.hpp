#pragma once

//
// Search over auxiliary channels for the bound functionals and the region
// boundary. Two engines:
//
//   grid    - exhaustive enumeration of quantized channel rows; slow but
//             trustworthy, used as the oracle in tests
//   descent - multi-restart coordinate descent with +/- step probes on the
//             channel simplex, projected by clip-and-renormalize
//
// Distortion targets enter through a penalty, so the search space stays a
// plain product of simplices. Restarts are independent (pure evaluations,
// derived seeds) and are reduced by a plain minimum, so the result does not
// depend on execution order.
//
// Neither engine certifies global optimality: descent results are upper
// bounds on the functional, and the grid is exact only up to its step.
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
#include "source.hpp"

namespace sirate {

enum class Engine { Grid, Descent };

struct SearchConfig {
    std::vector<int> aux_sizes;   // empty -> defaults for the list
    Engine engine = Engine::Descent;
    int grid_steps = 64;          // quantization denominator for the grid engine
    std::size_t grid_cap = 200'000'000; // refuse larger grids
    int restarts = 8;
    double step = 0.25;
    double shrink = 0.5;
    double min_step = 1e-4;
    int max_sweeps = 200;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    std::optional<std::vector<double>> init_channel; // used by restart 0
};

struct OptimResult {
    AuxSystem best;
    double value = std::numeric_limits<double>::infinity();
    bool feasible = false;
    std::string message;
    std::vector<double> restart_endpoints; // objective at each endpoint, inf if infeasible
};

struct TracePoint {
    std::vector<double> weight;
    std::vector<double> prefix_bounds;
    std::vector<double> rates; // corner of the traced region
};

/// Default cardinalities: t=1 uses |X|+1; t=2 uses the support-lemma sizes
/// (|X|+5 for the pair, |X||U_pair|+1 for the singletons); otherwise |X|
/// for every subset.
inline std::vector<int> default_aux_sizes(const SubsetList& v, int x_size) {
    std::vector<int> sizes(v.count(), x_size);
    if (v.t == 1) {
        sizes[0] = x_size + 1;
    } else if (v.t == 2) {
        const int pair_size = x_size + 5;
        for (int j = 0; j < v.count(); ++j)
            sizes[j] = (std::popcount(v.subsets[j]) == 2) ? pair_size : x_size * pair_size + 1;
    }
    return sizes;
}

/// Chain sizes from the degraded-case cardinality bound, nondegenerate only
/// on the nested subsets {l..t}.
inline std::vector<int> degraded_chain_aux_sizes(const SubsetList& v, int x_size) {
    std::vector<int> sizes(v.count(), 1);
    std::vector<int> chain(v.t + 1, 1);
    for (int l = 1; l <= v.t; ++l) {
        long prod = x_size;
        for (int k = 1; k < l; ++k) prod *= chain[k];
        const int tail = v.t - l;
        chain[l] = static_cast<int>(prod - 1 + tail + (tail + 1) * (tail + 2) / 2);
    }
    for (int j = 0; j < v.count(); ++j)
        for (int l = 1; l <= v.t; ++l)
            if (v.subsets[j] == (((1u << v.t) - 1u) & ~((1u << (l - 1)) - 1u))) sizes[j] = chain[l];
    return sizes;
}

namespace detail {

enum class Objective { SumRate, WorstCase, Weighted };

struct EvalOutcome {
    double objective = 0.0;
    double penalized = 0.0;
    bool feasible = false;
    std::vector<double> achieved;
};

class ChannelEvaluator {
public:
    ChannelEvaluator(const JointSourcePmf& q, const DistortionVector& d,
                     std::span<const DistortionMeasure> measures, SubsetList v,
                     std::vector<int> aux_sizes, Objective objective,
                     std::vector<double> weights = {})
        : objective_(objective), weights_(std::move(weights)), d_(d) {
        sys_.v = std::move(v);
        sys_.aux_sizes = std::move(aux_sizes);
        sys_.source = q;
        lat_ = derive_sets(sys_.v);
        measures_.assign(measures.begin(), measures.end());
        for (int l = 1; l <= q.t; ++l)
            domains_.push_back(decoder_domain_axes(sys_, lat_, l));

        // Penalty slope: large relative to any information charge, scaled by
        // the finest positive distortion step so one violated letter costs
        // more than the whole rate budget.
        double gap = std::numeric_limits<double>::infinity();
        for (const auto& m : measures_)
            for (double e : m.table)
                if (e > 0.0) gap = std::min(gap, e);
        if (!std::isfinite(gap)) gap = 1.0;
        penalty_ = 10.0 * std::max(1.0, std::log2(static_cast<double>(q.x_size()))) / gap;
    }

    const AuxSystem& system() const { return sys_; }
    std::size_t row_cells() const { return sys_.aux_cells(); }
    int rows() const { return sys_.source.x_size(); }

    EvalOutcome eval(const std::vector<double>& channel) {
        sys_.channel = channel;
        const JointPmf joint = induce_joint(sys_);
        EvalOutcome out;
        out.feasible = true;
        for (int l = 1; l <= sys_.source.t; ++l) {
            const auto r = optimal_reconstruction_on(joint, sys_.x_axis(), domains_[l - 1], l,
                                                     measures_[l - 1]);
            out.achieved.push_back(r.achieved);
            if (r.achieved > d_.d[l - 1] + kDistortionSlack) out.feasible = false;
        }
        out.objective = objective_value(joint);
        out.penalized = out.objective;
        for (int l = 0; l < sys_.source.t; ++l)
            out.penalized += penalty_ * std::max(0.0, out.achieved[l] - d_.d[l]);
        return out;
    }

    std::vector<double> region_bounds(const JointPmf& joint) const {
        std::vector<double> c;
        for (int l = 1; l <= sys_.source.t; ++l) {
            double acc = 0.0;
            const std::uint32_t prefix = (1u << l) - 1u;
            for (int j = 0; j < sys_.v.count(); ++j)
                if (sys_.v.subsets[j] & prefix) acc += rate_charge(joint, sys_, lat_, j, l);
            c.push_back(acc);
        }
        return c;
    }

private:
    double objective_value(const JointPmf& joint) const {
        switch (objective_) {
            case Objective::SumRate: {
                double total = 0.0;
                for (int j = 0; j < sys_.v.count(); ++j)
                    total += rate_charge(joint, sys_, lat_, j, sys_.source.t);
                return total;
            }
            case Objective::WorstCase: {
                double total = 0.0;
                const VariableSet x{sys_.x_axis()};
                for (int j = 0; j < sys_.v.count(); ++j) {
                    double worst = 0.0;
                    bool first = true;
                    for (int l : sys_.v.members(j)) {
                        VariableSet cond;
                        for (int i : lat_.supersets[j]) cond.push_back(sys_.aux_axis(i));
                        cond.push_back(sys_.y_axis(l));
                        const double v = conditional_mutual_information(joint, x,
                                                                        {sys_.aux_axis(j)}, cond);
                        if (first || v > worst) worst = v;
                        first = false;
                    }
                    total += worst;
                }
                return total;
            }
            case Objective::Weighted: {
                const auto c = region_bounds(joint);
                double acc = 0.0;
                for (std::size_t l = 0; l < c.size(); ++l) acc += weights_[l] * c[l];
                return acc;
            }
        }
        return 0.0;
    }

    Objective objective_;
    std::vector<double> weights_;
    DistortionVector d_;
    AuxSystem sys_;
    LatticeSets lat_;
    std::vector<DistortionMeasure> measures_;
    std::vector<VariableSet> domains_;
    double penalty_ = 1.0;
};

// All ways to split `steps` quanta over `cells` bins, as normalized rows.
inline std::vector<std::vector<double>> simplex_grid(int cells, int steps) {
    std::vector<std::vector<double>> rows;
    std::vector<int> quanta(cells, 0);
    const double inv = 1.0 / steps;
    auto rec = [&](auto&& self, int cell, int left) -> void {
        if (cell == cells - 1) {
            quanta[cell] = left;
            std::vector<double> row(cells);
            for (int c = 0; c < cells; ++c) row[c] = quanta[c] * inv;
            rows.push_back(std::move(row));
            return;
        }
        for (int k = left; k >= 0; --k) {
            quanta[cell] = k;
            self(self, cell + 1, left - k);
        }
    };
    rec(rec, 0, steps);
    return rows;
}

inline OptimResult run_grid(ChannelEvaluator& ev, const SearchConfig& cfg) {
    const int nx = ev.rows();
    const std::size_t cells = ev.row_cells();
    if (cells > 32) throw std::invalid_argument("grid engine: auxiliary product space too large");
    const auto rows = simplex_grid(static_cast<int>(cells), cfg.grid_steps);

    double combos = 1.0;
    for (int x = 0; x < nx; ++x) combos *= static_cast<double>(rows.size());
    if (combos > static_cast<double>(cfg.grid_cap))
        throw std::invalid_argument("grid engine: " + std::to_string(combos) +
                                    " channel grid points exceed the configured cap");

    OptimResult res;
    std::vector<double> channel(static_cast<std::size_t>(nx) * cells, 0.0);
    std::vector<std::size_t> pick(nx, 0);
    while (true) {
        for (int x = 0; x < nx; ++x)
            std::copy(rows[pick[x]].begin(), rows[pick[x]].end(),
                      channel.begin() + static_cast<std::size_t>(x) * cells);
        const auto out = ev.eval(channel);
        if (out.feasible && out.objective < res.value) {
            res.value = out.objective;
            res.best = ev.system();
            res.best.channel = channel;
            res.feasible = true;
        }
        int x = nx;
        bool done = true;
        while (x > 0) {
            --x;
            if (++pick[x] < rows.size()) {
                done = false;
                break;
            }
            pick[x] = 0;
        }
        if (done) break;
    }
    if (!res.feasible) res.message = "no grid point met the distortion targets";
    return res;
}

inline void renormalize_row(std::span<double> row) {
    double sum = 0.0;
    for (double& v : row) {
        if (v < 0.0) v = 0.0;
        sum += v;
    }
    if (sum <= 0.0) {
        const double u = 1.0 / static_cast<double>(row.size());
        for (double& v : row) v = u;
        return;
    }
    for (double& v : row) v /= sum;
}

inline std::vector<double> initial_channel(const ChannelEvaluator& ev, int restart,
                                           const SearchConfig& cfg, std::uint64_t seed) {
    const int nx = ev.rows();
    const std::size_t cells = ev.row_cells();
    std::vector<double> ch(static_cast<std::size_t>(nx) * cells, 0.0);
    if (restart == 0 && cfg.init_channel) {
        if (cfg.init_channel->size() != ch.size())
            throw std::invalid_argument("init_channel has the wrong shape");
        return *cfg.init_channel;
    }
    if (restart == 0) { // uniform rows: all auxiliaries independent of X
        std::fill(ch.begin(), ch.end(), 1.0 / static_cast<double>(cells));
        return ch;
    }
    if (restart == 1) { // first nondegenerate auxiliary tracks X, others uniform
        const auto& sys = ev.system();
        int jstar = -1;
        for (int j = 0; j < sys.aux_count(); ++j)
            if (sys.aux_sizes[j] > 1) {
                jstar = j;
                break;
            }
        std::size_t stride = 1; // row-major stride of axis jstar within the aux block
        for (int j = sys.aux_count() - 1; j > jstar; --j)
            stride *= static_cast<std::size_t>(sys.aux_sizes[j]);
        for (int x = 0; x < nx; ++x)
            for (std::size_t u = 0; u < cells; ++u) {
                const bool match =
                    jstar < 0 ||
                    static_cast<int>((u / stride) % sys.aux_sizes[jstar]) == x % sys.aux_sizes[jstar];
                ch[static_cast<std::size_t>(x) * cells + u] = match ? 1.0 : 0.0;
            }
        for (int x = 0; x < nx; ++x)
            renormalize_row(std::span<double>(ch).subspan(static_cast<std::size_t>(x) * cells, cells));
        return ch;
    }
    detail::Rng rng(detail::mix_seed(seed, static_cast<std::uint64_t>(restart)));
    for (double& v : ch) v = rng.expo();
    for (int x = 0; x < nx; ++x)
        renormalize_row(std::span<double>(ch).subspan(static_cast<std::size_t>(x) * cells, cells));
    return ch;
}

inline OptimResult run_descent(ChannelEvaluator& ev, const SearchConfig& cfg) {
    const int nx = ev.rows();
    const std::size_t cells = ev.row_cells();
    OptimResult res;

    for (int restart = 0; restart < std::max(1, cfg.restarts); ++restart) {
        std::vector<double> ch = initial_channel(ev, restart, cfg, cfg.seed);
        auto cur = ev.eval(ch);
        auto consider = [&](const EvalOutcome& out, const std::vector<double>& channel) {
            if (out.feasible && out.objective < res.value) {
                res.value = out.objective;
                res.best = ev.system();
                res.best.channel = channel;
                res.feasible = true;
            }
        };
        consider(cur, ch);

        if (cells > 1) {
            double step = cfg.step;
            std::vector<double> cand = ch;
            for (int sweep = 0; sweep < cfg.max_sweeps && step >= cfg.min_step; ++sweep) {
                bool improved = false;
                for (int x = 0; x < nx; ++x) {
                    const std::size_t base = static_cast<std::size_t>(x) * cells;
                    for (std::size_t c = 0; c < cells; ++c)
                        for (const double sign : {+1.0, -1.0}) {
                            cand = ch;
                            cand[base + c] += sign * step;
                            renormalize_row(
                                std::span<double>(cand).subspan(base, cells));
                            const auto out = ev.eval(cand);
                            if (out.penalized < cur.penalized - 1e-15) {
                                ch = cand;
                                cur = out;
                                consider(cur, ch);
                                improved = true;
                            }
                        }
                }
                if (!improved) step *= cfg.shrink;
            }
        }
        res.restart_endpoints.push_back(cur.feasible ? cur.objective
                                                     : std::numeric_limits<double>::infinity());
    }
    if (!res.feasible)
        res.message = "no restart reached the distortion targets";
    return res;
}

inline OptimResult run_engine(ChannelEvaluator& ev, const SearchConfig& cfg) {
    return cfg.engine == Engine::Grid ? run_grid(ev, cfg) : run_descent(ev, cfg);
}

} // namespace detail

/// Minimize the single-channel sum-rate bound over channels for a fixed list.
inline OptimResult minimize_sum_rate(const JointSourcePmf& q, const DistortionVector& d,
                                     std::span<const DistortionMeasure> measures,
                                     const SubsetList& v, const SearchConfig& cfg) {
    auto sizes = cfg.aux_sizes.empty() ? default_aux_sizes(v, q.x_size()) : cfg.aux_sizes;
    detail::ChannelEvaluator ev(q, d, measures, v, sizes, detail::Objective::SumRate);
    return detail::run_engine(ev, cfg);
}

/// Minimize the worst-decoder sum functional over channels (canonical list).
inline OptimResult minimize_worst_case(const JointSourcePmf& q, const DistortionVector& d,
                                       std::span<const DistortionMeasure> measures,
                                       const SearchConfig& cfg) {
    const SubsetList v = canonical_list(q.t);
    auto sizes = cfg.aux_sizes.empty() ? default_aux_sizes(v, q.x_size()) : cfg.aux_sizes;
    detail::ChannelEvaluator ev(q, d, measures, v, sizes, detail::Objective::WorstCase);
    return detail::run_engine(ev, cfg);
}

/// Scalarized boundary trace: for each weight vector, minimize the weighted
/// prefix bounds and report the resulting region corner.
inline std::vector<TracePoint> trace_inner_boundary(const JointSourcePmf& q,
                                                    const DistortionVector& d,
                                                    std::span<const DistortionMeasure> measures,
                                                    const SubsetList& v,
                                                    std::span<const std::vector<double>> weights,
                                                    const SearchConfig& cfg) {
    auto sizes = cfg.aux_sizes.empty() ? default_aux_sizes(v, q.x_size()) : cfg.aux_sizes;
    std::vector<TracePoint> points;
    for (const auto& w : weights) {
        if (static_cast<int>(w.size()) != q.t)
            throw std::invalid_argument("trace_inner_boundary: weight length must equal t");
        bool positive = false;
        for (double x : w) {
            if (x < 0.0) throw std::invalid_argument("trace_inner_boundary: negative weight");
            if (x > 0.0) positive = true;
        }
        if (!positive) throw std::invalid_argument("trace_inner_boundary: all-zero weight");

        detail::ChannelEvaluator ev(q, d, measures, v, sizes, detail::Objective::Weighted, w);
        OptimResult res = detail::run_engine(ev, cfg);
        if (!res.feasible)
            throw InfeasibleError("trace_inner_boundary: " + res.message);
        const JointPmf joint = induce_joint(res.best);
        TracePoint pt;
        pt.weight = w;
        pt.prefix_bounds = ev.region_bounds(joint);
        RateRegion region;
        region.t = q.t;
        region.prefix_bounds = pt.prefix_bounds;
        pt.rates = region.corner_rates();
        points.push_back(std::move(pt));
    }
    return points;
}

} // namespace sirate
