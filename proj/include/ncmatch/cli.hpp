#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncmatch/io.hpp"
#include "ncmatch/matcher.hpp"
#include "ncmatch/structure.hpp"

namespace ncmatch {
namespace cli {

struct CommonOptions {
    std::string input_path;
    std::string oracle_kind = "brute";
    std::uint64_t field_prime = 3221225473ull;
    std::uint64_t oracle_seed = 0;
    bool seed_given = false;
    int oracle_retrials = 3;
    std::size_t tutte_max_points = std::size_t{1} << 18;
    unsigned threads = 1;
    double walk_budget_scale = 1.0;
    std::int64_t family_cap = 24;
    std::uint64_t mis_seed = 0x5bd1e995u;
    bool mis_seed_given = false;
    Weight weight_cap = 1'000'000;
    std::string out_path;
    std::string dump_duals_path;
    std::string dump_transcript_path;
    std::string replay_transcript_path;
    bool verify = false;
    bool trace = false;
};

inline void add_common(CLI::App* cmd, CommonOptions& o, bool needs_input = true) {
    if (needs_input)
        cmd->add_option("input", o.input_path, "input graph (DIMACS-like)")->required();
    cmd->add_option("--oracle", o.oracle_kind, "decision oracle implementation")
        ->check(CLI::IsMember({"brute", "tutte", "replay"}));
    cmd->add_option("--field-prime", o.field_prime, "prime field for the Tutte oracle");
    cmd->add_option("--oracle-seed", o.oracle_seed, "seed for oracle randomness")
        ->each([&](const std::string&) { o.seed_given = true; });
    cmd->add_option("--oracle-retrials", o.oracle_retrials,
                    "independent Tutte retrials per query");
    cmd->add_option("--tutte-max-points", o.tutte_max_points,
                    "evaluation-point budget per Tutte query");
    cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
    cmd->add_option("--walk-budget-scale", o.walk_budget_scale,
                    "scale factor for the weight-family walk budget");
    cmd->add_option("--family-cap", o.family_cap,
                    "weight vectors tried per iteration before escalating (0 = all)");
    cmd->add_option("--mis-seed", o.mis_seed, "seed for the triad independent-set rounds")
        ->each([&](const std::string&) { o.mis_seed_given = true; });
    cmd->add_option("--weight-cap", o.weight_cap, "maximum admissible |edge weight|");
    cmd->add_option("--out", o.out_path, "write the JSON result here instead of stdout");
    cmd->add_option("--dump-duals", o.dump_duals_path, "write the laminar dual family as JSON");
    cmd->add_option("--dump-transcript", o.dump_transcript_path,
                    "export the oracle transcript as JSON");
    cmd->add_option("--replay-transcript", o.replay_transcript_path,
                    "preload a transcript export before running");
    cmd->add_flag("--verify", o.verify, "run the independent matching verifier on the output");
    cmd->add_flag("--trace", o.trace, "emit per-iteration progress to stderr");
}

inline void apply_env_seed(CommonOptions& o) {
    if (const char* env = std::getenv("NC_MATCH_SEED")) {
        std::uint64_t s = std::strtoull(env, nullptr, 10);
        if (!o.seed_given) o.oracle_seed = s;
        if (!o.mis_seed_given) o.mis_seed = s ^ 0x5bd1e995u;
    }
}

inline std::shared_ptr<DecisionOracle> build_oracle(const CommonOptions& o) {
    OracleOptions opt;
    opt.seed = o.oracle_seed;
    opt.retrials = o.oracle_retrials;
    opt.field_prime = o.field_prime;
    opt.max_points = o.tutte_max_points;
    opt.keep_query_text = !o.dump_transcript_path.empty();
    if (o.oracle_kind == "replay") return std::make_shared<ReplayOracle>(opt);
    return make_oracle(o.oracle_kind, opt);
}

struct LabOptions {
    std::uint64_t seed = 1;
    int samples = 25;
    std::string out_path;
};

inline int run_lab(const LabOptions& lo, std::ostream& out, std::ostream& err);

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"oracle-based NC reduction for minimum-weight perfect matching"};
    app.require_subcommand(1);

    CommonOptions o;
    LabOptions lo;
    Weight decide_threshold = 0;
    CLI::App* pm = app.add_subcommand("pm", "find a perfect matching");
    CLI::App* mwpm = app.add_subcommand("mwpm", "find a minimum-weight perfect matching");
    CLI::App* maxm = app.add_subcommand("maxmatching", "find a maximum matching");
    CLI::App* decide = app.add_subcommand("decide", "is there a perfect matching of weight <= W?");
    CLI::App* lab = app.add_subcommand("lab", "measure the structural-lemma bounds (CSV)");
    for (CLI::App* c : {pm, mwpm, maxm, decide}) add_common(c, o);
    decide->add_option("-W,--threshold", decide_threshold, "weight threshold")->required();
    lab->add_option("--seed", lo.seed, "random seed");
    lab->add_option("--samples", lo.samples, "instances per check");
    lab->add_option("--out", lo.out_path, "write CSV here instead of stdout");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream oss;
        int code = app.exit(e, oss, oss);
        (code == 0 ? out : err) << oss.str();
        return code == 0 ? 0 : 1;
    }

    if (lab->parsed()) return run_lab(lo, out, err);
    apply_env_seed(o);

    try {
        std::ifstream in(o.input_path);
        if (!in) {
            err << "error: cannot open " << o.input_path << "\n";
            return 1;
        }
        ParsedGraph pg = parse_dimacs(in);
        pg.weights.check_cap(o.weight_cap);
        auto oracle = build_oracle(o);
        if (!o.replay_transcript_path.empty()) {
            std::ifstream tin(o.replay_transcript_path);
            if (!tin) {
                err << "error: cannot open transcript " << o.replay_transcript_path << "\n";
                return 1;
            }
            import_transcript_json(oracle->transcript(), tin);
        }
        ThreadPool pool(o.threads);
        PartialMatchingOptions popts;
        popts.walk_budget_scale = o.walk_budget_scale;
        popts.family_cap = o.family_cap;
        popts.mis_seed = o.mis_seed;

        const Graph& graph = pg.graph;
        Minor whole = Minor::whole(pg.graph);
        std::ostream* trace_out = o.trace ? &err : nullptr;

        nlohmann::json j;
        int exit_code = 0;
        std::optional<MatchingResult> res;
        std::string mode;
        if (pm->parsed()) mode = "pm";
        if (mwpm->parsed()) mode = "mwpm";
        if (maxm->parsed()) mode = "maxmatching";
        if (decide->parsed()) mode = "decide";
        j["mode"] = mode;

        auto fill_matching = [&](const std::vector<EdgeId>& edges) {
            nlohmann::json arr = nlohmann::json::array();
            for (EdgeId e : edges)
                arr.push_back({graph.edges[e].u + 1, graph.edges[e].v + 1});
            j["matching"] = arr;
            j["matching_edge_ids"] = edges;
        };
        auto fill_stats = [&](const RunStats& s) {
            j["stats"] = {{"oracle_calls", s.oracle_calls}, {"cache_hits", s.cache_hits},
                          {"iterations", s.iterations},     {"depth", s.depth},
                          {"rounds", s.rounds}};
        };

        if (mode == "decide") {
            auto answer = oracle->mwpm_weight(whole, pg.weights);
            bool yes = answer && *answer <= decide_threshold;
            j["W"] = decide_threshold;
            j["answer"] = yes ? "yes" : "no";
            if (answer)
                j["mwpm_weight"] = *answer;
            else
                j["mwpm_weight"] = nullptr;
            j["no_perfect_matching"] = !answer.has_value();
            auto ts = oracle->transcript().stats();
            fill_stats({ts.queries, ts.cache_hits, 0, 0, 1, 0});
        } else if (mode == "maxmatching") {
            RunStats stats;
            std::vector<EdgeId> mm = maximum_matching(whole, *oracle, popts, &pool, &stats);
            fill_matching(mm);
            j["size"] = mm.size();
            j["weight"] = matching_weight(mm, pg.weights);
            j["no_perfect_matching"] = false;
            fill_stats(stats);
            if (o.verify && !verify_matching(graph, mm)) {
                err << "verifier: output is not a matching\n";
                return 3;
            }
            if (o.verify) j["verified"] = true;
        } else {
            if (mode == "pm")
                res = perfect_matching(whole, *oracle, popts, &pool, trace_out);
            else
                res = min_weight_perfect_matching(whole, pg.weights, *oracle, popts, &pool,
                                                  trace_out);
            if (!res) {
                j["matching"] = nlohmann::json::array();
                j["weight"] = nullptr;
                j["no_perfect_matching"] = true;
                auto ts = oracle->transcript().stats();
                fill_stats({ts.queries, ts.cache_hits, 0, 0, 1, 0});
                exit_code = 2;
            } else {
                fill_matching(res->edges);
                j["weight"] = matching_weight(res->edges, pg.weights);
                j["no_perfect_matching"] = false;
                fill_stats(res->stats);
                if (o.verify) {
                    std::string why;
                    if (!verify_perfect_matching(graph, res->edges, &why)) {
                        err << "verifier: " << why << "\n";
                        return 3;
                    }
                    j["verified"] = true;
                }
            }
        }

        if (!o.dump_duals_path.empty() && mode != "maxmatching") {
            WeightVector w = (mode == "pm") ? WeightVector::zero(graph.m()) : pg.weights;
            try {
                LaminarFamily family = balanced_critical_dual(whole, w, *oracle);
                std::ofstream df(o.dump_duals_path);
                df << family_to_json(family, whole).dump(1) << "\n";
            } catch (const NoPerfectMatchingInputError&) {
                // nothing to dump
            }
        }
        if (!o.dump_transcript_path.empty()) {
            std::ofstream tf(o.dump_transcript_path);
            export_transcript_json(oracle->transcript(), tf);
        }

        if (!o.out_path.empty()) {
            std::ofstream of(o.out_path);
            of << j.dump(1) << "\n";
        } else {
            out << j.dump(1) << "\n";
        }
        return exit_code;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

// ---------------------------------------------------------------------------
// lab: measured counts vs. the structural guarantees, as CSV.
// ---------------------------------------------------------------------------

namespace labgen {

inline Graph random_min_degree2(detail::SplitMix64& rng, int n, int extra) {
    Graph g;
    g.n = n;
    for (NodeId v = 0; v < n; ++v) g.edges.push_back({v, static_cast<NodeId>((v + 1) % n)});
    for (int k = 0; k < extra; ++k) {
        NodeId u = static_cast<NodeId>(rng.next() % n);
        NodeId v = static_cast<NodeId>(rng.next() % n);
        if (u == v) continue;
        g.edges.push_back({u, v});
    }
    return g;
}

}  // namespace labgen

inline int run_lab(const LabOptions& lo, std::ostream& out, std::ostream& err) {
    std::ofstream file;
    std::ostream* os = &out;
    if (!lo.out_path.empty()) {
        file.open(lo.out_path);
        if (!file) {
            err << "error: cannot open " << lo.out_path << "\n";
            return 1;
        }
        os = &file;
    }
    *os << "check,sample,n,m,measured,bound\n";
    detail::SplitMix64 rng(lo.seed);
    for (int s = 0; s < lo.samples; ++s) {
        int n = 20 + static_cast<int>(rng.next() % 120);
        int extra = static_cast<int>(rng.next() % (n / 4 + 1));
        Graph g = labgen::random_min_degree2(rng, n, extra);
        Minor m = Minor::whole(g);
        auto triads = find_triads(m);
        double tri_bound = 9.0 * g.n - 8.0 * g.m();
        *os << "triads," << s << "," << g.n << "," << g.m() << "," << triads.size() << ","
            << std::max(0.0, tri_bound) << "\n";

        int n2 = 16 + static_cast<int>(rng.next() % 100);
        int m2 = n2 + static_cast<int>(rng.next() % (2 * n2));
        Graph g2;
        g2.n = n2;
        for (int k = 0; k < m2; ++k) {
            NodeId u = static_cast<NodeId>(rng.next() % n2);
            NodeId v = static_cast<NodeId>(rng.next() % n2);
            if (u == v) v = static_cast<NodeId>((v + 1) % n2);
            g2.edges.push_back({std::min(u, v), std::max(u, v)});
        }
        Minor m2m = Minor::whole(g2);
        auto cycles = lab::extract_edge_disjoint_cycles(m2m);
        double cyc_bound =
            (g2.m() - g2.n) / (2.0 * std::max(1.0, std::log2(static_cast<double>(g2.n))));
        *os << "cycles," << s << "," << g2.n << "," << g2.m() << "," << cycles.size() << ","
            << std::max(0.0, cyc_bound) << "\n";

        std::vector<std::vector<EdgeId>> odd;
        for (const auto& c : cycles)
            if (c.size() % 2 == 1) odd.push_back(c);
        if (odd.size() % 2 == 1) odd.pop_back();
        auto walks = lab::build_even_walks(m2m, odd);
        double log2n = std::max(1.0, std::log2(static_cast<double>(g2.n)));
        *os << "walks," << s << "," << g2.n << "," << g2.m() << "," << walks.size() << ","
            << g2.m() / (log2n * log2n) << "\n";

        // Separation: some family member must give every walk in the
        // collection a nonzero circulation.
        std::vector<EvenWalk> collection;
        for (const auto& c : cycles)
            if (c.size() % 2 == 0 && c.size() >= 4 && collection.size() < 8) {
                NodeId anchor = g2.n;
                for (EdgeId id : c)
                    anchor = std::min({anchor, m2m.edges()[id].u, m2m.edges()[id].v});
                collection.push_back(
                    EvenWalk::even_cycle(m2m, anchor, lab::detail_walks::rotate_cycle(m2m, c, anchor)));
            }
        int separated = 0;
        if (!collection.empty()) {
            WeightFamily fam(g2.m(), static_cast<std::int64_t>(collection.size()));
            for (std::int64_t i = 0; i < fam.size() && !separated; ++i) {
                WeightVector wv = bind_to_minor(fam.member(i), m2m, g2.m());
                bool all = true;
                for (const EvenWalk& wk : collection)
                    if (circulation(wv, wk) == 0) {
                        all = false;
                        break;
                    }
                if (all) separated = 1;
            }
            *os << "separation," << s << "," << g2.n << "," << g2.m() << "," << separated << ",1\n";
        }
    }
    return 0;
}

}  // namespace cli
}  // namespace ncmatch
