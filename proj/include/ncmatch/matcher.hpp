#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "ncmatch/partial.hpp"

namespace ncmatch {

struct MatchingResult {
    std::vector<EdgeId> edges;  // root edge ids, sorted ascending
    Weight weight = 0;          // under the query weight vector (0 for pm mode)
    RunStats stats;
};

/// Depth budget from the 5/6 node-weight bound: ceil(log_{6/5} n) + 1.
inline std::int64_t perfect_matching_depth_bound(std::int32_t n) {
    if (n <= 1) return 1;
    return static_cast<std::int64_t>(
               std::ceil(std::log(static_cast<double>(n)) / std::log(6.0 / 5.0))) +
           1;
}

inline Weight matching_weight(const std::vector<EdgeId>& edges, const WeightVector& w) {
    Weight s = 0;
    for (EdgeId e : edges) s += w.at(e);
    return s;
}

/// Independent validity check: every vertex of the root graph covered
/// exactly once.
inline bool verify_perfect_matching(const Graph& g, const std::vector<EdgeId>& edges,
                                    std::string* why = nullptr) {
    std::vector<int> cover(g.n, 0);
    for (EdgeId e : edges) {
        if (e < 0 || e >= g.m()) {
            if (why) *why = "edge id out of range";
            return false;
        }
        ++cover[g.edges[e].u];
        ++cover[g.edges[e].v];
    }
    for (NodeId v = 0; v < g.n; ++v) {
        if (cover[v] != 1) {
            if (why) *why = "vertex " + std::to_string(v + 1) + " covered " +
                            std::to_string(cover[v]) + " times";
            return false;
        }
    }
    return true;
}

/// Matching validity (every vertex covered at most once).
inline bool verify_matching(const Graph& g, const std::vector<EdgeId>& edges) {
    std::vector<int> cover(g.n, 0);
    for (EdgeId e : edges) {
        if (e < 0 || e >= g.m()) return false;
        if (++cover[g.edges[e].u] > 1) return false;
        if (++cover[g.edges[e].v] > 1) return false;
    }
    return true;
}

namespace detail {

/// Root vertices of the preimage of `node` (a node of `derived`) translated
/// into nodes of `base`, where `derived` was produced from `base`.
inline std::vector<NodeId> preimage_in(const Minor& base, const Minor& derived, NodeId node) {
    std::vector<NodeId> out;
    for (NodeId x = 0; x < base.root()->n; ++x) {
        if (derived.home(x) != node) continue;
        NodeId t = base.home(x);
        if (t >= 0) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

/// Alg. 2: divide and conquer on the partial-matching minor. Each level
/// takes every pending subgraph in parallel, keeps the edges of its
/// partial-matching minor, and recurses into each preimage minus the vertex
/// that is already matched (located through lineage). Returns nothing when
/// the graph has no perfect matching.
inline std::optional<MatchingResult> perfect_matching(const Minor& g0, DecisionOracle& oracle,
                                                      const PartialMatchingOptions& opts = {},
                                                      const ThreadPool* pool = nullptr,
                                                      std::ostream* trace_out = nullptr) {
    MatchingResult result;
    const std::int32_t root_m = g0.root() ? g0.root()->m() : 0;
    const WeightVector zero = WeightVector::zero(root_m);
    if (g0.node_count() > 0) {
        if (!oracle.mwpm_weight(g0, zero)) {
            result.stats.rounds += 1;
            return std::nullopt;
        }
        result.stats.rounds += 1;
    }

    struct Task {
        Minor minor;
    };
    std::vector<Task> level;
    if (g0.node_count() > 0) level.push_back({g0});
    std::int64_t depth = 0;
    while (!level.empty()) {
        ++depth;
        struct Outcome {
            std::vector<EdgeId> matched;
            std::vector<Minor> children;
            std::int64_t iterations = 0;
            std::int64_t rounds = 0;
        };
        std::vector<Outcome> out(level.size());
        auto run_task = [&](std::size_t ti) {
            const Minor& T = level[ti].minor;
            Outcome& o = out[ti];
            if (T.node_count() == 0) return;
            PartialMatchingResult pm = partial_matching(T, oracle, opts, nullptr, trace_out);
            o.iterations = pm.iterations;
            o.rounds = pm.rounds;
            const Minor& H = pm.minor;
            for (const MinorEdge& e : H.edges()) o.matched.push_back(e.id);
            for (NodeId s : H.nodes()) {
                std::vector<NodeId> pre = detail::preimage_in(T, H, s);
                if (pre.size() <= 1) continue;
                // The unique matched edge at s tells us which preimage node
                // is already covered.
                const MinorEdge* me = nullptr;
                for (const MinorEdge& e : H.edges())
                    if (e.u == s || e.v == s) {
                        me = &e;
                        break;
                    }
                if (!me) throw Error("perfect_matching: minor node left unmatched");
                const Graph::Edge& re = T.root()->edges[me->id];
                NodeId covered = H.home(re.u) == s ? T.home(re.u) : T.home(re.v);
                std::vector<NodeId> rest;
                rest.reserve(pre.size() - 1);
                for (NodeId x : pre)
                    if (x != covered) rest.push_back(x);
                o.children.push_back(T.induced(rest));
            }
        };
        if (pool)
            pool->for_n(level.size(), run_task);
        else
            for (std::size_t i = 0; i < level.size(); ++i) run_task(i);

        std::vector<Task> next;
        std::int64_t level_rounds = 0;
        for (Outcome& o : out) {
            result.edges.insert(result.edges.end(), o.matched.begin(), o.matched.end());
            for (Minor& c : o.children) next.push_back({std::move(c)});
            result.stats.iterations += o.iterations;
            level_rounds = std::max(level_rounds, o.rounds);
        }
        result.stats.rounds += 1 + level_rounds;
        level = std::move(next);
    }
    result.stats.depth = depth;
    if (depth > perfect_matching_depth_bound(g0.node_count()))
        result.stats.depth_bound_violations += 1;
    std::sort(result.edges.begin(), result.edges.end());
    auto ts = oracle.transcript().stats();
    result.stats.oracle_calls = ts.queries;
    result.stats.cache_hits = ts.cache_hits;
    return result;
}

namespace detail {

inline std::optional<MatchingResult> mwpm_rec(const Minor& T, const WeightVector& w,
                                              DecisionOracle& oracle,
                                              const PartialMatchingOptions& opts,
                                              const ThreadPool* pool, std::ostream* trace_out,
                                              int level) {
    MatchingResult result;
    if (T.node_count() == 0) return result;
    if (!oracle.mwpm_weight(T, w)) return std::nullopt;
    result.stats.rounds += 1;

    RoundCost rrc;
    Minor H = reduce(T, w, oracle, &rrc);
    result.stats.rounds += rrc.rounds;

    std::optional<MatchingResult> pm = perfect_matching(H, oracle, opts, pool, trace_out);
    if (!pm)
        throw OracleError("min_weight_perfect_matching: matching minor has no perfect matching "
                          "(inconsistent oracle answers)");
    result.edges = pm->edges;
    result.stats.iterations += pm->stats.iterations;
    result.stats.rounds += pm->stats.rounds;
    result.stats.depth = std::max(result.stats.depth, pm->stats.depth);
    result.stats.depth_bound_violations += pm->stats.depth_bound_violations;

    struct Piece {
        std::vector<NodeId> rest;
    };
    std::vector<Piece> pieces;
    for (NodeId s : H.nodes()) {
        std::vector<NodeId> pre = preimage_in(T, H, s);
        if (pre.size() <= 1) continue;
        const MinorEdge* me = nullptr;
        for (const MinorEdge& e : H.edges())
            if (e.u == s || e.v == s) {
                me = &e;
                break;
            }
        if (!me) throw Error("min_weight_perfect_matching: minor node left unmatched");
        const Graph::Edge& re = T.root()->edges[me->id];
        NodeId covered = H.home(re.u) == s ? T.home(re.u) : T.home(re.v);
        std::vector<NodeId> rest;
        for (NodeId x : pre)
            if (x != covered) rest.push_back(x);
        pieces.push_back({std::move(rest)});
    }
    std::vector<std::optional<MatchingResult>> sub(pieces.size());
    auto run_piece = [&](std::size_t i) {
        sub[i] = mwpm_rec(T.induced(pieces[i].rest), w, oracle, opts, nullptr, trace_out,
                          level + 1);
    };
    if (pool)
        pool->for_n(pieces.size(), run_piece);
    else
        for (std::size_t i = 0; i < pieces.size(); ++i) run_piece(i);

    std::int64_t max_child = 0;
    for (auto& s : sub) {
        if (!s)
            throw OracleError("min_weight_perfect_matching: shrunk piece lost its matching");
        result.edges.insert(result.edges.end(), s->edges.begin(), s->edges.end());
        result.stats.iterations += s->stats.iterations;
        result.stats.depth = std::max(result.stats.depth, s->stats.depth);
        result.stats.depth_bound_violations += s->stats.depth_bound_violations;
        max_child = std::max(max_child, s->stats.rounds);
    }
    if (!pieces.empty()) result.stats.rounds += 1 + max_child;
    std::sort(result.edges.begin(), result.edges.end());
    result.weight = matching_weight(result.edges, w);
    return result;
}

}  // namespace detail

/// Sec. 5.1 extension: reduce under w, find a perfect matching in the shrunk
/// graph, then extend to a minimum-weight matching inside every shrunk piece
/// recursively. By complementary slackness the returned weight is exactly
/// O(G, w).
inline std::optional<MatchingResult> min_weight_perfect_matching(
    const Minor& g0, const WeightVector& w, DecisionOracle& oracle,
    const PartialMatchingOptions& opts = {}, const ThreadPool* pool = nullptr,
    std::ostream* trace_out = nullptr) {
    auto res = detail::mwpm_rec(g0, w, oracle, opts, pool, trace_out, 0);
    if (res) {
        auto ts = oracle.transcript().stats();
        res->stats.oracle_calls = ts.queries;
        res->stats.cache_hits = ts.cache_hits;
    }
    return res;
}

/// Maximum matching by doubling: two weight-0 copies of G plus a weight-1
/// edge between the copies of every vertex. The doubled graph always has a
/// perfect matching, its MWPM weight is |V| - 2 * (maximum matching size),
/// and the copy-0 matched edges form a maximum matching.
inline std::vector<EdgeId> maximum_matching(const Minor& g0, DecisionOracle& oracle,
                                            const PartialMatchingOptions& opts = {},
                                            const ThreadPool* pool = nullptr,
                                            RunStats* stats_out = nullptr) {
    const Graph& g = *g0.root();
    Graph doubled;
    doubled.n = 2 * g.n;
    std::vector<Weight> wd;
    for (const Graph::Edge& e : g.edges) {
        doubled.edges.push_back({e.u, e.v});
        wd.push_back(0);
    }
    for (const Graph::Edge& e : g.edges) {
        doubled.edges.push_back({e.u + g.n, e.v + g.n});
        wd.push_back(0);
    }
    for (NodeId v = 0; v < g.n; ++v) {
        doubled.edges.push_back({v, v + g.n});
        wd.push_back(1);
    }
    auto res = min_weight_perfect_matching(Minor::whole(std::move(doubled)), WeightVector(wd),
                                           oracle, opts, pool);
    if (!res) throw Error("maximum_matching: doubled graph must have a perfect matching");
    std::vector<EdgeId> out;
    for (EdgeId e : res->edges)
        if (e < g.m()) out.push_back(e);
    if (stats_out) *stats_out = res->stats;
    return out;
}

}  // namespace ncmatch
