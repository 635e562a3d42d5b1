#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "ncmatch/laminar.hpp"
#include "ncmatch/oracle.hpp"
#include "ncmatch/walks.hpp"

namespace ncmatch {

namespace lab {

// ---------------------------------------------------------------------------
// Edge-disjoint cycle extraction, following the induction of the cycle-count
// bound: strip loops, parallel pairs and degree <= 1 vertices, splice
// degree-2 vertices (remembering the expansion), and otherwise remove a
// shortest cycle, which in a simple min-degree-3 graph has length at most
// 2 log2 |V|.
// ---------------------------------------------------------------------------

namespace detail_cycles {

struct WorkEdge {
    NodeId u, v;
    bool alive = true;
    // Real edges carry the minor edge id; spliced edges expand to two others.
    EdgeId real_id = -1;
    std::int32_t part1 = -1, part2 = -1;  // indices of replaced work edges
};

struct WorkGraph {
    std::vector<WorkEdge> edges;
    std::vector<char> vertex_alive;
    std::vector<std::vector<std::int32_t>> incident;  // vertex -> edge indices

    void expand(std::int32_t ei, std::vector<EdgeId>& out) const {
        const WorkEdge& e = edges[ei];
        if (e.real_id >= 0) {
            out.push_back(e.real_id);
        } else {
            expand(e.part1, out);
            expand(e.part2, out);
        }
    }
};

}  // namespace detail_cycles

/// All returned cycles are edge-disjoint lists of minor edge ids. The count
/// is at least (|E| - |V|) / (2 log2 |V|).
inline std::vector<std::vector<EdgeId>> extract_edge_disjoint_cycles(const Minor& g) {
    using namespace detail_cycles;
    WorkGraph wg;
    NodeId cap = 1;
    for (NodeId v : g.nodes()) cap = std::max(cap, v + 1);
    wg.vertex_alive.assign(cap, 0);
    wg.incident.assign(cap, {});
    for (NodeId v : g.nodes()) wg.vertex_alive[v] = 1;
    for (const MinorEdge& e : g.edges()) {
        wg.edges.push_back({e.u, e.v, true, e.id, -1, -1});
        std::int32_t idx = static_cast<std::int32_t>(wg.edges.size()) - 1;
        wg.incident[e.u].push_back(idx);
        wg.incident[e.v].push_back(idx);
    }

    auto live_incident = [&](NodeId v) {
        std::vector<std::int32_t> out;
        for (std::int32_t ei : wg.incident[v])
            if (wg.edges[ei].alive) out.push_back(ei);
        return out;
    };

    std::vector<std::vector<EdgeId>> cycles;
    auto emit = [&](const std::vector<std::int32_t>& work_cycle) {
        std::vector<EdgeId> real;
        for (std::int32_t ei : work_cycle) wg.expand(ei, real);
        cycles.push_back(std::move(real));
    };

    while (true) {
        bool changed = false;
        // Loops first (splicing can create them).
        for (std::size_t ei = 0; ei < wg.edges.size(); ++ei) {
            if (!wg.edges[ei].alive || wg.edges[ei].u != wg.edges[ei].v) continue;
            wg.edges[ei].alive = false;
            emit({static_cast<std::int32_t>(ei)});
            changed = true;
        }
        // Parallel pairs.
        std::map<std::pair<NodeId, NodeId>, std::int32_t> seen;
        for (std::size_t ei = 0; ei < wg.edges.size(); ++ei) {
            if (!wg.edges[ei].alive) continue;
            auto key = std::minmax(wg.edges[ei].u, wg.edges[ei].v);
            auto [it, inserted] = seen.emplace(key, static_cast<std::int32_t>(ei));
            if (!inserted && wg.edges[it->second].alive) {
                wg.edges[ei].alive = false;
                wg.edges[it->second].alive = false;
                emit({it->second, static_cast<std::int32_t>(ei)});
                seen.erase(it);
                changed = true;
            }
        }
        if (changed) continue;

        // Degree 0, 1 and 2 vertices, smallest id first.
        std::optional<NodeId> deg_le1, deg2;
        for (NodeId v = 0; v < cap; ++v) {
            if (!wg.vertex_alive[v]) continue;
            std::size_t d = live_incident(v).size();
            if (d <= 1 && !deg_le1) deg_le1 = v;
            if (d == 2 && !deg2) deg2 = v;
        }
        if (deg_le1) {
            for (std::int32_t ei : live_incident(*deg_le1)) wg.edges[ei].alive = false;
            wg.vertex_alive[*deg_le1] = 0;
            continue;
        }
        if (deg2) {
            NodeId v = *deg2;
            auto inc = live_incident(v);
            std::int32_t e1 = inc[0], e2 = inc[1];
            NodeId a = wg.edges[e1].u == v ? wg.edges[e1].v : wg.edges[e1].u;
            NodeId b = wg.edges[e2].u == v ? wg.edges[e2].v : wg.edges[e2].u;
            wg.edges[e1].alive = false;
            wg.edges[e2].alive = false;
            wg.vertex_alive[v] = 0;
            wg.edges.push_back({a, b, true, -1, e1, e2});
            std::int32_t idx = static_cast<std::int32_t>(wg.edges.size()) - 1;
            wg.incident[a].push_back(idx);
            wg.incident[b].push_back(idx);
            continue;
        }

        // Simple graph, min degree >= 3: pull out a shortest cycle.
        std::vector<NodeId> live;
        for (NodeId v = 0; v < cap; ++v)
            if (wg.vertex_alive[v] && !live_incident(v).empty()) live.push_back(v);
        if (live.empty()) break;

        std::vector<std::int32_t> best_cycle;
        for (NodeId start : live) {
            // BFS girth scan from start.
            std::vector<std::int32_t> level(cap, -1), par_edge(cap, -1);
            std::deque<NodeId> q{start};
            level[start] = 0;
            std::optional<std::pair<std::int32_t, NodeId>> closing;  // (edge, far endpoint)
            while (!q.empty() && !closing) {
                NodeId x = q.front();
                q.pop_front();
                for (std::int32_t ei : live_incident(x)) {
                    if (ei == par_edge[x]) continue;
                    NodeId y = wg.edges[ei].u == x ? wg.edges[ei].v : wg.edges[ei].u;
                    if (level[y] < 0) {
                        level[y] = level[x] + 1;
                        par_edge[y] = ei;
                        q.push_back(y);
                    } else {
                        closing = {{ei, x}};
                        break;
                    }
                }
            }
            if (!closing) continue;
            // Reconstruct the cycle through the two tree paths, trimming at
            // the meeting point.
            auto path_edges = [&](NodeId v) {
                std::vector<std::int32_t> out;
                while (par_edge[v] >= 0) {
                    out.push_back(par_edge[v]);
                    v = wg.edges[par_edge[v]].u == v ? wg.edges[par_edge[v]].v
                                                     : wg.edges[par_edge[v]].u;
                }
                return out;  // v .. start
            };
            NodeId x = closing->second;
            NodeId y = wg.edges[closing->first].u == x ? wg.edges[closing->first].v
                                                       : wg.edges[closing->first].u;
            std::vector<std::int32_t> px = path_edges(x), py = path_edges(y);
            while (!px.empty() && !py.empty() && px.back() == py.back()) {
                px.pop_back();
                py.pop_back();
            }
            std::vector<std::int32_t> cyc = px;
            cyc.push_back(closing->first);
            cyc.insert(cyc.end(), py.rbegin(), py.rend());
            if (best_cycle.empty() || cyc.size() < best_cycle.size()) best_cycle = cyc;
        }
        if (best_cycle.empty()) break;
        for (std::int32_t ei : best_cycle) wg.edges[ei].alive = false;
        emit(best_cycle);
    }
    return cycles;
}

// ---------------------------------------------------------------------------
// Token pairing on a tree (Fact 5.4): pair an even token multiset so the
// connecting tree paths are pairwise edge-disjoint. Processing leaves-first,
// each vertex pairs everything pending locally and passes at most one token
// to its parent, so each tree edge carries at most one path.
// ---------------------------------------------------------------------------

struct TokenPath {
    std::size_t token_a, token_b;  // indices into the input token list
    std::vector<EdgeId> edges;     // tree path, possibly empty
};

inline std::vector<TokenPath> pair_tokens_on_tree(const Minor& tree,
                                                  const std::vector<NodeId>& tokens) {
    if (tokens.size() % 2 != 0) throw OddTokensError("token count must be even");
    std::vector<TokenPath> out;
    if (tokens.empty()) return out;

    NodeId cap = 1;
    for (NodeId v : tree.nodes()) cap = std::max(cap, v + 1);
    std::vector<std::vector<std::pair<NodeId, EdgeId>>> adj(cap);
    for (const MinorEdge& e : tree.edges()) {
        adj[e.u].emplace_back(e.v, e.id);
        adj[e.v].emplace_back(e.u, e.id);
    }
    NodeId root = tree.nodes().front();
    std::vector<NodeId> order;
    std::vector<NodeId> parent(cap, -1);
    std::vector<EdgeId> parent_edge(cap, -1);
    std::vector<char> seen(cap, 0);
    std::vector<NodeId> stack{root};
    seen[root] = 1;
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (auto [u, id] : adj[v]) {
            if (seen[u]) continue;
            seen[u] = 1;
            parent[u] = v;
            parent_edge[u] = id;
            stack.push_back(u);
        }
    }
    for (NodeId v : tree.nodes())
        if (!seen[v]) throw Error("pair_tokens_on_tree: input is not a connected tree");

    struct Pending {
        std::size_t token;
        NodeId origin;
    };
    std::vector<std::vector<Pending>> pending(cap);
    for (std::size_t t = 0; t < tokens.size(); ++t) pending[tokens[t]].push_back({t, tokens[t]});

    auto path_up = [&](NodeId from, NodeId to) {
        std::vector<EdgeId> p;
        while (from != to) {
            p.push_back(parent_edge[from]);
            from = parent[from];
        }
        return p;
    };

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        NodeId v = *it;
        auto& pend = pending[v];
        std::sort(pend.begin(), pend.end(),
                  [](const Pending& a, const Pending& b) { return a.token < b.token; });
        while (pend.size() >= 2) {
            Pending p2 = pend.back();
            pend.pop_back();
            Pending p1 = pend.back();
            pend.pop_back();
            std::vector<EdgeId> e1 = path_up(p1.origin, v);
            std::vector<EdgeId> e2 = path_up(p2.origin, v);
            std::reverse(e2.begin(), e2.end());
            e1.insert(e1.end(), e2.begin(), e2.end());
            out.push_back({p1.token, p2.token, std::move(e1)});
        }
        if (!pend.empty()) {
            if (parent[v] < 0) throw Error("pair_tokens_on_tree: odd tokens at the root");
            pending[parent[v]].push_back(pend.front());
            pend.clear();
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Even-walk construction from paired odd cycles (Lemma 5.5): token the
// cycles on a spanning tree, pair them, trim each connecting path at the
// last exit from the first cycle and first entry to the second, filter to
// walks of at most twice the average length, and keep a maximal
// edge-disjoint subset via a greedy independent set.
// ---------------------------------------------------------------------------

namespace detail_walks {

/// Consecutive traversal order of a simple cycle given as an edge id set,
/// starting and ending at `anchor`. The input order is not trusted (cycle
/// extraction may interleave spliced sub-edges).
inline std::vector<EdgeId> rotate_cycle(const Minor& g, const std::vector<EdgeId>& cycle,
                                        NodeId anchor) {
    std::map<EdgeId, const MinorEdge*> lookup;
    for (const MinorEdge& e : g.edges()) lookup[e.id] = &e;
    std::map<NodeId, std::vector<EdgeId>> at;
    for (EdgeId id : cycle) {
        const MinorEdge& e = *lookup.at(id);
        at[e.u].push_back(id);
        at[e.v].push_back(id);
    }
    for (auto& [v, ids] : at) {
        if (ids.size() != 2) throw Error("rotate_cycle: edge set is not a simple cycle");
        std::sort(ids.begin(), ids.end());
    }
    if (at.find(anchor) == at.end()) throw Error("rotate_cycle: anchor not on cycle");
    std::vector<EdgeId> out;
    NodeId cur = anchor;
    EdgeId prev = -1;
    do {
        const auto& ids = at.at(cur);
        EdgeId next = (ids[0] == prev) ? ids[1] : ids[0];
        out.push_back(next);
        const MinorEdge& e = *lookup.at(next);
        cur = (e.u == cur) ? e.v : e.u;
        prev = next;
    } while (cur != anchor);
    if (out.size() != cycle.size()) throw Error("rotate_cycle: edge set is not one cycle");
    return out;
}

}  // namespace detail_walks

inline std::vector<EvenWalk> build_even_walks(const Minor& g,
                                              const std::vector<std::vector<EdgeId>>& odd_cycles) {
    if (odd_cycles.empty()) return {};
    for (const auto& c : odd_cycles)
        if (c.size() % 2 == 0) throw Error("build_even_walks: cycles must have odd length");

    std::map<EdgeId, const MinorEdge*> lookup;
    for (const MinorEdge& e : g.edges()) lookup[e.id] = &e;
    auto comps = connected_components(g);
    auto comp_of = [&](NodeId v) {
        for (std::size_t i = 0; i < comps.size(); ++i)
            if (std::binary_search(comps[i].begin(), comps[i].end(), v)) return i;
        throw Error("build_even_walks: vertex outside minor");
    };

    struct Pair {
        std::size_t c1, c2;
        std::vector<EdgeId> path;
    };
    std::vector<Pair> pairs;
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        std::vector<std::size_t> mine;
        for (std::size_t k = 0; k < odd_cycles.size(); ++k) {
            NodeId some = lookup.at(odd_cycles[k].front())->u;
            if (comp_of(some) == ci) mine.push_back(k);
        }
        if (mine.size() % 2 == 1) mine.pop_back();  // discard one odd-one-out
        if (mine.empty()) continue;
        // Spanning tree of the component: BFS over the minor's edges.
        Minor comp_minor = g.induced(comps[ci]);
        std::vector<EdgeId> tree_edges;
        {
            NodeId cap = comps[ci].back() + 1;
            std::vector<char> seen(cap, 0);
            std::vector<std::vector<std::pair<NodeId, EdgeId>>> adj(cap);
            for (const MinorEdge& e : comp_minor.edges()) {
                adj[e.u].emplace_back(e.v, e.id);
                adj[e.v].emplace_back(e.u, e.id);
            }
            std::deque<NodeId> q{comps[ci].front()};
            seen[comps[ci].front()] = 1;
            while (!q.empty()) {
                NodeId v = q.front();
                q.pop_front();
                for (auto [u, id] : adj[v]) {
                    if (seen[u]) continue;
                    seen[u] = 1;
                    tree_edges.push_back(id);
                    q.push_back(u);
                }
            }
        }
        std::vector<char> is_tree(static_cast<std::size_t>(g.root()->m()), 0);
        for (EdgeId e : tree_edges) is_tree[e] = 1;
        Minor tree = comp_minor.filter_edges([&](EdgeId e) { return is_tree[e] != 0; });

        std::vector<NodeId> tokens;
        for (std::size_t k : mine) {
            // Token at the cycle's smallest vertex.
            NodeId best = -1;
            for (EdgeId id : odd_cycles[k]) {
                const MinorEdge& e = *lookup.at(id);
                if (best < 0 || e.u < best) best = e.u;
                if (e.v < best) best = e.v;
            }
            tokens.push_back(best);
        }
        for (const TokenPath& tp : pair_tokens_on_tree(tree, tokens))
            pairs.push_back({mine[tp.token_a], mine[tp.token_b], tp.edges});
    }

    std::vector<EvenWalk> walks;
    for (const Pair& pr : pairs) {
        const auto& c1 = odd_cycles[pr.c1];
        const auto& c2 = odd_cycles[pr.c2];
        std::vector<char> in_c1(static_cast<std::size_t>(g.root()->n), 0),
            in_c2(static_cast<std::size_t>(g.root()->n), 0);
        auto mark = [&](const std::vector<EdgeId>& c, std::vector<char>& in) {
            for (EdgeId id : c) {
                in[lookup.at(id)->u] = 1;
                in[lookup.at(id)->v] = 1;
            }
        };
        mark(c1, in_c1);
        mark(c2, in_c2);
        // Walk the tree path vertex by vertex: last exit from C1, first
        // entry to C2 afterwards.
        NodeId start = -1;
        {
            // token of c1 = path start; reconstruct path vertex sequence
            NodeId t1 = -1;
            for (EdgeId id : c1) {
                const MinorEdge& e = *lookup.at(id);
                if (t1 < 0 || e.u < t1) t1 = e.u;
                if (e.v < t1) t1 = e.v;
            }
            start = t1;
        }
        std::vector<NodeId> pverts{start};
        NodeId c = start;
        for (EdgeId id : pr.path) {
            const MinorEdge& e = *lookup.at(id);
            c = (e.u == c) ? e.v : e.u;
            pverts.push_back(c);
        }
        std::size_t last_in_c1 = 0, first_in_c2 = pverts.size() - 1;
        for (std::size_t i = 0; i < pverts.size(); ++i)
            if (in_c1[pverts[i]]) last_in_c1 = i;
        bool found_c2 = false;
        for (std::size_t i = last_in_c1; i < pverts.size(); ++i)
            if (in_c2[pverts[i]]) {
                first_in_c2 = i;
                found_c2 = true;
                break;
            }
        if (!found_c2)
            throw Error("build_even_walks: connecting path never reaches the second cycle");
        NodeId anchor1 = pverts[last_in_c1];
        NodeId anchor2 = pverts[first_in_c2];
        std::vector<EdgeId> trimmed(pr.path.begin() + last_in_c1,
                                    pr.path.begin() + first_in_c2);
        walks.push_back(EvenWalk::two_odd_cycles(
            g, anchor1, detail_walks::rotate_cycle(g, c1, anchor1), trimmed, anchor2,
            detail_walks::rotate_cycle(g, c2, anchor2)));
    }

    if (walks.empty()) return walks;
    // Markov filter: drop walks longer than twice the average, then keep a
    // maximal edge-disjoint subset greedily.
    double avg = 0;
    for (const EvenWalk& w : walks) avg += static_cast<double>(w.edge_list().size());
    avg /= static_cast<double>(walks.size());
    std::vector<const EvenWalk*> kept;
    for (const EvenWalk& w : walks)
        if (static_cast<double>(w.edge_list().size()) <= 2 * avg) kept.push_back(&w);
    std::vector<EvenWalk> out;
    std::vector<char> used(static_cast<std::size_t>(g.root()->m()), 0);
    for (const EvenWalk* w : kept) {
        bool clash = false;
        for (EdgeId e : w->edge_list())
            if (used[e]) {
                clash = true;
                break;
            }
        if (clash) continue;
        for (EdgeId e : w->edge_list()) used[e] = 1;
        out.push_back(*w);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Walk-destruction evidence (Lemmas 3.12 / 3.13): a positive-circulation
// walk within E[w] must mismatch some tight set of any laminar dual of the
// face, and a mismatching set traps an internal walk edge.
// ---------------------------------------------------------------------------

struct DestructionEvidence {
    enum class Kind { DisallowedEdge, TightSetMismatch };
    Kind kind;
    EdgeId edge = -1;                // disallowed edge, or the trapped internal edge
    std::vector<NodeId> set;         // mismatching set when applicable
    Weight mismatch_value = 0;
};

inline DestructionEvidence verify_walk_destruction(const Minor& g, const WeightVector& w,
                                                   const EvenWalk& walk,
                                                   const LaminarFamily& family,
                                                   DecisionOracle& oracle) {
    if (circulation(w, walk) == 0)
        throw Error("verify_walk_destruction: walk circulation must be positive");
    std::vector<EdgeId> allowed = allowed_edges(g, w, oracle);
    std::vector<char> ok(static_cast<std::size_t>(g.root()->m()), 0);
    for (EdgeId e : allowed) ok[e] = 1;
    for (EdgeId e : walk.edge_list())
        if (!ok[e]) return {DestructionEvidence::Kind::DisallowedEdge, e, {}, 0};

    std::map<EdgeId, const MinorEdge*> lookup;
    for (const MinorEdge& e : g.edges()) lookup[e.id] = &e;
    for (const auto& s : family.non_singletons()) {
        Weight mis = mismatch(g, walk, s);
        if (mis == 0) continue;
        for (EdgeId id : walk.edge_list()) {
            const MinorEdge& e = *lookup.at(id);
            bool iu = std::binary_search(s.begin(), s.end(), e.u);
            bool iv = std::binary_search(s.begin(), s.end(), e.v);
            if (iu && iv) return {DestructionEvidence::Kind::TightSetMismatch, id, s, mis};
        }
        throw LemmaViolationError(
            "mismatching tight set without an internal walk edge (contradicts the trap lemma)");
    }
    throw LemmaViolationError(
        "positive-circulation walk inside E[w] with no mismatching tight set");
}

}  // namespace lab

}  // namespace ncmatch
