//
// Command-line front end.
//
// Subcommands: validate | bounds | counterexample | region | lossless |
// simulate. Exit codes: 0 success, 2 validation/schema error,
// 3 infeasible configuration. All numeric output is rendered at 12
// significant digits.
//

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sirate/bounds.hpp"
#include "sirate/codec.hpp"
#include "sirate/format.hpp"
#include "sirate/json_io.hpp"
#include "sirate/optimize.hpp"
#include "sirate/source.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;

std::vector<std::size_t> parse_size_list(const std::string& s) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        out.push_back(std::stoull(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

std::vector<std::vector<double>> parse_weight_list(const std::string& s) {
    std::vector<std::vector<double>> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(';', pos);
        if (next == std::string::npos) next = s.size();
        const std::string group = s.substr(pos, next - pos);
        std::vector<double> w;
        std::size_t gp = 0;
        while (gp < group.size()) {
            std::size_t gn = group.find(',', gp);
            if (gn == std::string::npos) gn = group.size();
            w.push_back(std::stod(group.substr(gp, gn - gp)));
            gp = gn + 1;
        }
        out.push_back(std::move(w));
        pos = next + 1;
    }
    return out;
}

std::string subset_label(const sirate::SubsetList& v, int j) {
    std::string s = "{";
    bool first = true;
    for (int l : v.members(j)) {
        if (!first) s += ";";
        s += std::to_string(l);
        first = false;
    }
    return s + "}";
}

void emit(const nlohmann::json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        out << j.dump(2) << "\n";
    }
}

int cmd_validate(const std::string& source_path) {
    const sirate::SourceSpec spec = sirate::load_source_spec(source_path);
    std::vector<std::string> bad = sirate::validate_source(spec.q);
    for (int l = 1; l <= spec.q.t; ++l)
        for (const auto& s : sirate::validate_measure(spec.measures[l - 1], spec.q.x_size()))
            bad.push_back("decoder " + std::to_string(l) + ": " + s);
    if (!bad.empty()) {
        for (const auto& s : bad) std::cerr << "violation: " << s << "\n";
        return kExitValidation;
    }
    std::cout << "ok\n";
    return kExitOk;
}

int cmd_counterexample() {
    using namespace sirate;
    const AuxSystem sys = counterexample_instance();
    const JointPmf joint = induce_joint(sys);
    const int x = sys.x_axis();
    const int u123 = *sys.axis_for_subset(0b111u);
    const int u12 = *sys.axis_for_subset(0b011u);
    const int u13 = *sys.axis_for_subset(0b101u);
    const int u23 = *sys.axis_for_subset(0b110u);
    const int u1 = *sys.axis_for_subset(0b001u);
    const int u2 = *sys.axis_for_subset(0b010u);
    const int u3 = *sys.axis_for_subset(0b100u);

    struct Term {
        const char* name;
        double value;
    };
    const Term terms[] = {
        {"I(X;U123)", conditional_mutual_information(joint, {x}, {u123})},
        {"I(X;U12|U123)", conditional_mutual_information(joint, {x}, {u12}, {u123})},
        {"I(X;U13|U123)", conditional_mutual_information(joint, {x}, {u13}, {u123})},
        {"I(X;U23|U123)", conditional_mutual_information(joint, {x}, {u23}, {u123})},
        {"I(X;U1|U12,U13,U123)",
         conditional_mutual_information(joint, {x}, {u1}, {u12, u13, u123})},
        {"I(X;U2|U12,U23,U123)",
         conditional_mutual_information(joint, {x}, {u2}, {u12, u23, u123})},
        {"I(X;U3|U13,U23,U123)",
         conditional_mutual_information(joint, {x}, {u3}, {u13, u23, u123})},
    };
    double r0_candidate = 0.0;
    for (const auto& t : terms) {
        std::cout << t.name << " = " << format_significant(t.value) << "\n";
        r0_candidate += t.value;
    }

    std::vector<DistortionMeasure> measures;
    for (int l = 1; l <= 3; ++l) measures.push_back(hamming_measure(l, 3));
    const DistortionVector d{{0.0, 0.0, 0.0}};
    const auto p2 = check_P2(sys, d, measures);
    std::cout << "zero-distortion reconstruction: " << (p2.pass ? "pass" : "FAIL") << "\n";

    const double hx = entropy(joint, {x});
    const double sw = slepian_wolf_rate(sys.source, measures);
    const double markov_cmi = conditional_mutual_information(joint, {u13}, {u12}, {x, u123});

    std::cout << "H(X) = " << format_significant(hx) << "\n";
    std::cout << "R0 candidate = " << format_significant(r0_candidate) << "\n";
    std::cout << "Slepian-Wolf rate = " << format_significant(sw) << "\n";
    std::cout << "markov check: I(U13;U12|X,U123) = " << format_significant(markov_cmi)
              << (markov_cmi > 1e-9 ? " > 0: channel lies outside the constrained set"
                                    : " = 0: channel satisfies the extra chains")
              << "\n";

    char verdict[160];
    if (r0_candidate < sw - 1e-9) {
        std::snprintf(verdict, sizeof(verdict),
                      "R0 candidate (%.6f) < Slepian-Wolf rate (%.6f): counterexample CONFIRMED",
                      r0_candidate, sw);
        std::cout << verdict << "\n";
        std::cout << "PASS\n";
        return kExitOk;
    }
    std::snprintf(verdict, sizeof(verdict),
                  "R0 candidate (%.6f) >= Slepian-Wolf rate (%.6f): counterexample NOT confirmed",
                  r0_candidate, sw);
    std::cout << verdict << "\n";
    std::cout << "FAIL\n";
    return 1;
}

struct BoundsArgs {
    std::string source_path;
    std::string aux_path;
    std::string out_path;
    std::string functional = "all"; // all|r0|thm2|inner|sw
    bool optimize = false;
    std::string engine = "descent";
    std::string aux_sizes;
    int restarts = 8;
    int grid_steps = 64;
    std::uint64_t seed = 1;
    bool all_lists = false;
};

sirate::SearchConfig make_config(const BoundsArgs& a) {
    sirate::SearchConfig cfg;
    cfg.engine = (a.engine == "grid") ? sirate::Engine::Grid : sirate::Engine::Descent;
    cfg.restarts = a.restarts;
    cfg.grid_steps = a.grid_steps;
    cfg.seed = a.seed;
    if (!a.aux_sizes.empty())
        for (std::size_t s : parse_size_list(a.aux_sizes)) cfg.aux_sizes.push_back(static_cast<int>(s));
    return cfg;
}

int cmd_bounds(const BoundsArgs& a) {
    using namespace sirate;
    const SourceSpec spec = load_source_spec(a.source_path);
    nlohmann::json out;

    if (a.optimize) {
        const SearchConfig cfg = make_config(a);
        std::vector<SubsetList> lists;
        if (a.all_lists && spec.q.t <= kMaxDecodersForEnum)
            lists = enumerate_lists(spec.q.t);
        else
            lists.push_back(canonical_list(spec.q.t));

        OptimResult best;
        bool any = false;
        for (const auto& v : lists) {
            OptimResult r = (a.functional == "r0")
                                ? minimize_worst_case(spec.q, spec.d, spec.measures, cfg)
                                : minimize_sum_rate(spec.q, spec.d, spec.measures, v, cfg);
            if (r.feasible && (!any || r.value < best.value)) {
                best = std::move(r);
                any = true;
            }
            if (a.functional == "r0") break; // list-independent
        }
        if (!any) throw InfeasibleError("no feasible channel found for the given targets");
        out["value"] = format_significant(best.value);
        out["feasible"] = true;
        out["best_system"] = aux_spec_json(best.best);
        emit(out, a.out_path);
        return kExitOk;
    }

    if (a.functional == "sw" || a.functional == "all") {
        try {
            out["sw"] = format_significant(slepian_wolf_rate(spec.q, spec.measures));
        } catch (const std::invalid_argument&) {
            if (a.functional == "sw") throw;
        }
    }
    if (!a.aux_path.empty()) {
        const AuxSystem sys = load_aux_spec(a.aux_path, spec.q);
        const LatticeSets lat = derive_sets(sys.v);
        const JointPmf joint = induce_joint(sys);
        const auto p2 = check_P2(sys, spec.d, spec.measures);
        out["achieved_distortion"] = p2.achieved;
        out["p2_pass"] = p2.pass;
        if (a.functional == "thm2" || a.functional == "all")
            out["thm2"] = format_significant(sum_rate_bound(sys));
        if (a.functional == "r0" || a.functional == "all")
            out["r0"] = format_significant(worst_case_sum_rate(sys));
        if (a.functional == "inner" || a.functional == "all") {
            if (!p2.pass)
                throw InfeasibleError("inner region: distortion targets not met by this system");
            const RateRegion region = inner_region(sys, spec.d, spec.measures);
            std::vector<std::string> bounds;
            for (double c : region.prefix_bounds) bounds.push_back(format_significant(c));
            out["inner_region"] = bounds;
            nlohmann::json phi = nlohmann::json::object();
            for (int j = 0; j < sys.v.count(); ++j)
                for (int l = 1; l <= spec.q.t; ++l) {
                    if ((sys.v.subsets[j] & ((1u << l) - 1u)) == 0) continue;
                    phi[subset_label(sys.v, j) + ",l=" + std::to_string(l)] =
                        format_significant(rate_charge(joint, sys, lat, j, l));
                }
            out["phi"] = phi;
        }
    } else if (a.functional != "sw" && a.functional != "all") {
        throw SchemaError("--aux is required to evaluate functionals at a fixed system");
    }
    emit(out, a.out_path);
    return kExitOk;
}

int cmd_region(const std::string& source_path, const std::string& weights_arg,
               const BoundsArgs& a) {
    using namespace sirate;
    const SourceSpec spec = load_source_spec(source_path);
    const auto weights = parse_weight_list(weights_arg);
    const SearchConfig cfg = make_config(a);
    const auto points = trace_inner_boundary(spec.q, spec.d, spec.measures,
                                             canonical_list(spec.q.t), weights, cfg);
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : points) {
        nlohmann::json row;
        row["weight"] = p.weight;
        std::vector<std::string> bounds, rates;
        for (double c : p.prefix_bounds) bounds.push_back(format_significant(c));
        for (double r : p.rates) rates.push_back(format_significant(r));
        row["prefix_bounds"] = bounds;
        row["rates"] = rates;
        out.push_back(row);
    }
    emit(out, a.out_path);
    return kExitOk;
}

int cmd_lossless(const std::string& source_path, const std::string& out_path) {
    using namespace sirate;
    const PrivateMessageSource src = load_lossless_spec(source_path);
    bool degraded = false;
    const RateRegion region = lossless_region(src, &degraded);
    if (!degraded)
        std::cerr << "warning: side information is not degraded; the bounds below are an inner "
                     "bound, not the exact region\n";
    nlohmann::json out;
    std::vector<std::string> bounds;
    for (double c : region.prefix_bounds) bounds.push_back(format_significant(c));
    out["prefix_bounds"] = bounds;
    out["sum_rate"] = format_significant(region.prefix_bounds.back());
    out["degraded"] = degraded;
    emit(out, out_path);
    return kExitOk;
}

struct SimulateArgs {
    std::string source_path;
    std::string aux_path;
    std::string n_list = "8,12,16";
    std::uint64_t trials = 2000;
    double margin = 0.25;
    std::uint64_t seed = 7;
    double eps0 = 0.05;
    std::size_t budget = std::size_t{1} << 26;
    std::string out_path;
};

int cmd_simulate(const SimulateArgs& a) {
    using namespace sirate;
    const SourceSpec spec = load_source_spec(a.source_path);
    const AuxSystem sys = load_aux_spec(a.aux_path, spec.q);
    const std::vector<std::size_t> ns = parse_size_list(a.n_list);

    SimOptions opts;
    opts.eps0 = a.eps0;
    opts.storage_budget = a.budget;
    const SimReport report =
        run_trials(sys, spec.d, spec.measures, ns, a.trials, a.margin, a.seed, opts);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!a.out_path.empty()) {
        file.open(a.out_path);
        os = &file;
    }
    *os << "n,event,stage/subset,decoder,empirical_rate,trials\n";
    for (const auto& st : report.per_n) {
        *os << st.n << ",E1,,," << format_significant(st.e1_rate()) << "," << st.trials << "\n";
        for (int j = 0; j < sys.v.count(); ++j)
            *os << st.n << ",E2," << subset_label(sys.v, j) << ",,"
                << format_significant(st.encoder_failure_rate(j)) << ","
                << st.encoder_attempts[j] << "\n";
        for (int l = 1; l <= spec.q.t; ++l)
            for (int j = 0; j < sys.v.count(); ++j) {
                const auto& ds = st.decoder[l - 1][j];
                if (!(sys.v.subsets[j] & (1u << (l - 1)))) continue;
                *os << st.n << ",D," << subset_label(sys.v, j) << "," << l << ","
                    << format_significant(ds.failure_rate()) << "," << ds.attempts << "\n";
                *os << st.n << ",D_none," << subset_label(sys.v, j) << "," << l << ","
                    << format_significant(ds.attempts ? static_cast<double>(ds.none_typical) /
                                                            ds.attempts
                                                      : 0.0)
                    << "," << ds.attempts << "\n";
                *os << st.n << ",D_ambiguous," << subset_label(sys.v, j) << "," << l << ","
                    << format_significant(ds.ambiguity_rate()) << "," << ds.attempts << "\n";
                *os << st.n << ",D_overall," << subset_label(sys.v, j) << "," << l << ","
                    << format_significant(ds.raw_failure_rate()) << "," << ds.raw_attempts
                    << "\n";
                *os << st.n << ",D_overall_ambiguous," << subset_label(sys.v, j) << "," << l
                    << "," << format_significant(ds.raw_ambiguity_rate()) << ","
                    << ds.raw_attempts << "\n";
            }
        for (int l = 1; l <= spec.q.t; ++l)
            *os << st.n << ",distortion,," << l << ","
                << format_significant(st.mean_distortion[l - 1]) << "," << st.trials << "\n";
    }
    if (!a.out_path.empty()) {
        std::cout << "wrote " << a.out_path << "\n";
        for (const auto& st : report.per_n)
            std::cout << "n=" << st.n << " Pr[E1]=" << format_significant(st.e1_rate())
                      << " delta1=" << format_significant(st.delta1)
                      << (st.failure_bounds_applicable ? "" : " (outside bound validity)") << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounds, counterexample checks and coding simulations for multi-decoder "
                 "rate distortion with side information"};
    app.require_subcommand(1);

    std::string validate_source_path;
    auto* validate = app.add_subcommand("validate", "check a source spec file");
    validate->add_option("--source", validate_source_path, "source spec JSON")->required();

    auto* counter = app.add_subcommand("counterexample",
                                       "evaluate the built-in three-decoder instance");

    BoundsArgs bounds_args;
    auto* bounds = app.add_subcommand("bounds", "evaluate or minimize bound functionals");
    bounds->add_option("--source", bounds_args.source_path, "source spec JSON")->required();
    bounds->add_option("--aux", bounds_args.aux_path, "auxiliary system JSON");
    bounds->add_option("--functional", bounds_args.functional, "all|thm2|r0|inner|sw");
    bounds->add_flag("--optimize", bounds_args.optimize, "search over channels");
    bounds->add_option("--engine", bounds_args.engine, "grid|descent");
    bounds->add_option("--aux-sizes", bounds_args.aux_sizes, "comma list of |U_S| per subset");
    bounds->add_option("--restarts", bounds_args.restarts, "descent restarts");
    bounds->add_option("--grid-steps", bounds_args.grid_steps, "grid quantization denominator");
    bounds->add_option("--seed", bounds_args.seed, "random seed");
    bounds->add_flag("--all-lists", bounds_args.all_lists, "search every subset order (t <= 3)");
    bounds->add_option("--out", bounds_args.out_path, "write JSON here instead of stdout");

    std::string region_source, region_weights;
    BoundsArgs region_args;
    auto* region = app.add_subcommand("region", "trace the achievable region boundary");
    region->add_option("--source", region_source, "source spec JSON")->required();
    region->add_option("--weights", region_weights, "semicolon-separated weight tuples, e.g. 1,0;0,1")
        ->required();
    region->add_option("--engine", region_args.engine, "grid|descent");
    region->add_option("--aux-sizes", region_args.aux_sizes, "comma list of |U_S| per subset");
    region->add_option("--restarts", region_args.restarts, "descent restarts");
    region->add_option("--grid-steps", region_args.grid_steps, "grid quantization denominator");
    region->add_option("--seed", region_args.seed, "random seed");
    region->add_option("--out", region_args.out_path, "write JSON here instead of stdout");

    std::string lossless_source, lossless_out;
    auto* lossless = app.add_subcommand("lossless", "exact region for private lossless messages");
    lossless->add_option("--source", lossless_source, "private-message source JSON")->required();
    lossless->add_option("--out", lossless_out, "write JSON here instead of stdout");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo nested-codebook run");
    simulate->add_option("--source", sim.source_path, "source spec JSON")->required();
    simulate->add_option("--aux", sim.aux_path, "auxiliary system JSON")->required();
    simulate->add_option("--n", sim.n_list, "comma list of blocklengths");
    simulate->add_option("--trials", sim.trials, "trials per blocklength");
    simulate->add_option("--margin", sim.margin, "multiplicative rate margin");
    simulate->add_option("--seed", sim.seed, "random seed");
    simulate->add_option("--eps0", sim.eps0, "base typicality tolerance");
    simulate->add_option("--budget", sim.budget, "codeword storage budget in symbols");
    simulate->add_option("--out", sim.out_path, "CSV output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(validate_source_path);
        if (counter->parsed()) return cmd_counterexample();
        if (bounds->parsed()) return cmd_bounds(bounds_args);
        if (region->parsed()) {
            region_args.source_path = region_source;
            return cmd_region(region_source, region_weights, region_args);
        }
        if (lossless->parsed()) return cmd_lossless(lossless_source, lossless_out);
        if (simulate->parsed()) return cmd_simulate(sim);
    } catch (const sirate::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const sirate::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const sirate::AllocationError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
