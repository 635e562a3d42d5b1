#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "ncmatch/errors.hpp"
#include "ncmatch/parallel.hpp"

namespace ncmatch {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;
using Weight = std::int64_t;

/// Immutable root graph. Vertices are 0..n-1, edges keep their input order;
/// an edge's position in `edges` is its id for the whole pipeline.
struct Graph {
    struct Edge {
        NodeId u = 0;
        NodeId v = 0;
    };

    std::int32_t n = 0;
    std::vector<Edge> edges;

    std::int32_t m() const { return static_cast<std::int32_t>(edges.size()); }
};

struct MinorEdge {
    EdgeId id;   // root edge id (lineage is the identity on retained ids)
    NodeId u;
    NodeId v;
};

/// Node-weighted multigraph minor of a root graph. Node ids are stable: a
/// contracted set is named after its smallest member. Values are immutable
/// after construction; every operation returns a new Minor.
class Minor {
public:
    Minor() = default;

    static Minor whole(std::shared_ptr<const Graph> root) {
        Minor g;
        g.root_ = std::move(root);
        const Graph& gr = *g.root_;
        g.nodes_.resize(gr.n);
        std::iota(g.nodes_.begin(), g.nodes_.end(), 0);
        g.weights_.assign(gr.n, 1);
        g.home_.resize(gr.n);
        std::iota(g.home_.begin(), g.home_.end(), 0);
        g.edges_.reserve(gr.edges.size());
        for (EdgeId e = 0; e < gr.m(); ++e) {
            if (gr.edges[e].u == gr.edges[e].v)
                throw Error("self-loop in root graph");
            g.edges_.push_back({e, gr.edges[e].u, gr.edges[e].v});
        }
        g.rebuild_index();
        return g;
    }

    static Minor whole(Graph g) { return whole(std::make_shared<const Graph>(std::move(g))); }

    const std::shared_ptr<const Graph>& root() const { return root_; }
    const std::vector<NodeId>& nodes() const { return nodes_; }
    const std::vector<MinorEdge>& edges() const { return edges_; }
    std::int32_t node_count() const { return static_cast<std::int32_t>(nodes_.size()); }
    std::int32_t edge_count() const { return static_cast<std::int32_t>(edges_.size()); }
    std::int32_t root_vertex_count() const { return root_ ? root_->n : 0; }

    bool has_node(NodeId v) const {
        return v >= 0 && v < static_cast<NodeId>(pos_.size()) && pos_[v] >= 0;
    }

    Weight node_weight(NodeId v) const { return weights_[pos_at(v)]; }

    Weight total_node_weight() const {
        Weight s = 0;
        for (Weight w : weights_) s += w;
        return s;
    }

    /// Current node holding a given root vertex, or -1 if it was dropped.
    NodeId home(NodeId root_vertex) const { return home_[root_vertex]; }

    /// Root vertices currently shrunk into node v.
    std::vector<NodeId> preimage(NodeId v) const {
        std::vector<NodeId> out;
        for (NodeId x = 0; x < static_cast<NodeId>(home_.size()); ++x)
            if (home_[x] == v) out.push_back(x);
        return out;
    }

    std::vector<std::int32_t> degrees() const {
        std::vector<std::int32_t> deg(pos_.size(), 0);
        for (const MinorEdge& e : edges_) {
            ++deg[e.u];
            ++deg[e.v];
        }
        return deg;  // indexed by node id
    }

    /// Contract disjoint node sets. Each set must be connected here and have
    /// odd total node weight (Fact 3.4 side conditions); violations throw.
    Minor contract(const std::vector<std::vector<NodeId>>& sets) const {
        check_sets_disjoint(sets);
        for (const auto& s : sets) {
            if (!is_connected_set(s)) {
                instrumentation::disconnected_contractions().fetch_add(1);
                throw DisconnectedSetError("contract: set is not connected in the minor");
            }
            if (set_weight(s) % 2 == 0)
                throw EvenSetError("contract: set has even total node weight");
        }
        return contract_impl(sets);
    }

    /// Contraction of the complement of one node, used by the heavy-node exit
    /// of PartialMatching. The complement may be disconnected; the result is
    /// returned, never queried, so the minor-only guarantee is not at stake.
    Minor contract_complement_unchecked(NodeId kept) const {
        std::vector<NodeId> rest;
        rest.reserve(nodes_.size());
        for (NodeId v : nodes_)
            if (v != kept) rest.push_back(v);
        if (rest.size() <= 1) return *this;
        if (set_weight(rest) % 2 == 0)
            throw EvenSetError("contract: complement has even total node weight");
        return contract_impl({rest});
    }

    /// New minor keeping exactly the edges whose id passes `keep`.
    template <typename Pred>
    Minor filter_edges(Pred&& keep) const {
        Minor g = *this;
        g.edges_.clear();
        for (const MinorEdge& e : edges_)
            if (keep(e.id)) g.edges_.push_back(e);
        return g;
    }

    /// Induced sub-minor on a node subset (edges with both endpoints kept).
    Minor induced(const std::vector<NodeId>& keep_nodes) const {
        std::vector<char> keep(pos_.size(), 0);
        for (NodeId v : keep_nodes) {
            if (!has_node(v)) throw Error("induced: unknown node");
            keep[v] = 1;
        }
        Minor g;
        g.root_ = root_;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (!keep[nodes_[i]]) continue;
            g.nodes_.push_back(nodes_[i]);
            g.weights_.push_back(weights_[i]);
        }
        for (const MinorEdge& e : edges_)
            if (keep[e.u] && keep[e.v]) g.edges_.push_back(e);
        g.home_.assign(home_.size(), -1);
        for (std::size_t x = 0; x < home_.size(); ++x)
            if (home_[x] >= 0 && keep[home_[x]]) g.home_[x] = home_[x];
        g.rebuild_index();
        return g;
    }

    /// Same structure with all node weights reset to one (PartialMatching's
    /// opening step); lineage is preserved.
    Minor with_unit_weights() const {
        Minor g = *this;
        std::fill(g.weights_.begin(), g.weights_.end(), 1);
        return g;
    }

    /// Collapse parallel edges, keeping the smallest root edge id per pair.
    Minor dedupe_parallel_edges() const {
        Minor g = *this;
        std::sort(g.edges_.begin(), g.edges_.end(), [](const MinorEdge& a, const MinorEdge& b) {
            NodeId au = std::min(a.u, a.v), av = std::max(a.u, a.v);
            NodeId bu = std::min(b.u, b.v), bv = std::max(b.u, b.v);
            if (au != bu) return au < bu;
            if (av != bv) return av < bv;
            return a.id < b.id;
        });
        std::vector<MinorEdge> out;
        for (const MinorEdge& e : g.edges_) {
            if (!out.empty()) {
                const MinorEdge& p = out.back();
                if (std::min(p.u, p.v) == std::min(e.u, e.v) &&
                    std::max(p.u, p.v) == std::max(e.u, e.v))
                    continue;
            }
            out.push_back(e);
        }
        std::sort(out.begin(), out.end(),
                  [](const MinorEdge& a, const MinorEdge& b) { return a.id < b.id; });
        g.edges_ = std::move(out);
        return g;
    }

    bool is_connected_set(const std::vector<NodeId>& set) const {
        if (set.empty()) return false;
        if (set.size() == 1) return has_node(set[0]);
        std::vector<char> in(pos_.size(), 0);
        for (NodeId v : set) {
            if (!has_node(v)) throw Error("unknown node in set");
            in[v] = 1;
        }
        // BFS over edges internal to the set.
        std::vector<std::vector<NodeId>> adj_local(pos_.size());
        for (const MinorEdge& e : edges_) {
            if (in[e.u] && in[e.v]) {
                adj_local[e.u].push_back(e.v);
                adj_local[e.v].push_back(e.u);
            }
        }
        std::vector<NodeId> stack{set[0]};
        std::vector<char> seen(pos_.size(), 0);
        seen[set[0]] = 1;
        std::size_t reached = 1;
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            for (NodeId u : adj_local[v]) {
                if (!seen[u]) {
                    seen[u] = 1;
                    ++reached;
                    stack.push_back(u);
                }
            }
        }
        return reached == set.size();
    }

    Weight set_weight(const std::vector<NodeId>& set) const {
        Weight s = 0;
        for (NodeId v : set) s += node_weight(v);
        return s;
    }

    /// Consistency check used by tests: weight conservation, parity, lineage.
    void assert_invariants() const {
        Weight total = total_node_weight();
        Weight root_total = 0;
        for (NodeId x = 0; x < static_cast<NodeId>(home_.size()); ++x)
            if (home_[x] >= 0) ++root_total;
        if (total != root_total)
            throw Error("minor invariant: node weights do not add up to surviving root vertices");
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (weights_[i] > 1 && weights_[i] % 2 == 0)
                throw Error("minor invariant: non-singleton node with even weight");
        for (const MinorEdge& e : edges_) {
            if (e.u == e.v) throw Error("minor invariant: self-loop");
            if (!has_node(e.u) || !has_node(e.v)) throw Error("minor invariant: dangling edge");
        }
    }

private:
    std::size_t pos_at(NodeId v) const {
        if (!has_node(v)) throw Error("unknown node " + std::to_string(v));
        return static_cast<std::size_t>(pos_[v]);
    }

    void rebuild_index() {
        NodeId maxid = root_ ? root_->n : 0;
        for (NodeId v : nodes_) maxid = std::max(maxid, v + 1);
        pos_.assign(maxid, -1);
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            pos_[nodes_[i]] = static_cast<std::int32_t>(i);
    }

    void check_sets_disjoint(const std::vector<std::vector<NodeId>>& sets) const {
        std::vector<char> used(pos_.size(), 0);
        for (const auto& s : sets) {
            for (NodeId v : s) {
                if (!has_node(v)) throw Error("contract: unknown node");
                if (used[v]) throw OverlappingSetsError("contract: sets overlap");
                used[v] = 1;
            }
        }
    }

    Minor contract_impl(const std::vector<std::vector<NodeId>>& sets) const {
        // Representative of each set is its smallest node id.
        std::vector<NodeId> rep(pos_.size(), -1);
        for (NodeId v : nodes_) rep[v] = v;
        for (const auto& s : sets) {
            NodeId r = *std::min_element(s.begin(), s.end());
            for (NodeId v : s) rep[v] = r;
        }
        Minor g;
        g.root_ = root_;
        std::vector<Weight> acc(pos_.size(), 0);
        for (std::size_t i = 0; i < nodes_.size(); ++i) acc[rep[nodes_[i]]] += weights_[i];
        for (NodeId v : nodes_) {
            if (rep[v] == v) {
                g.nodes_.push_back(v);
                g.weights_.push_back(acc[v]);
            }
        }
        for (const MinorEdge& e : edges_) {
            NodeId u = rep[e.u], v = rep[e.v];
            if (u == v) continue;  // internal edges are deleted
            g.edges_.push_back({e.id, u, v});
        }
        g.home_.resize(home_.size());
        for (std::size_t x = 0; x < home_.size(); ++x)
            g.home_[x] = home_[x] >= 0 ? rep[home_[x]] : -1;
        g.rebuild_index();
        return g;
    }

    std::shared_ptr<const Graph> root_;
    std::vector<NodeId> nodes_;       // sorted ascending
    std::vector<Weight> weights_;     // aligned with nodes_
    std::vector<MinorEdge> edges_;    // sorted by root edge id
    std::vector<NodeId> home_;        // root vertex -> node id, -1 if dropped
    std::vector<std::int32_t> pos_;   // node id -> index into nodes_, -1 if absent
};

/// Count of edges with at least one endpoint of degree >= 2 (Def. 3.1's
/// complement); the progress measure of the main loop.
inline std::int64_t non_isolated_edge_count(const Minor& g) {
    auto deg = g.degrees();
    std::int64_t c = 0;
    for (const MinorEdge& e : g.edges())
        if (deg[e.u] >= 2 || deg[e.v] >= 2) ++c;
    return c;
}

/// True iff every node has degree exactly one (vacuously true when empty).
inline bool is_perfect_matching_graph(const Minor& g) {
    auto deg = g.degrees();
    for (NodeId v : g.nodes())
        if (deg[v] != 1) return false;
    return true;
}

/// Partition into maximal connected node sets, ordered by smallest node id;
/// members sorted ascending.
inline std::vector<std::vector<NodeId>> connected_components(const Minor& g) {
    std::vector<std::vector<NodeId>> comps;
    if (g.node_count() == 0) return comps;
    NodeId cap = 0;
    for (NodeId v : g.nodes()) cap = std::max(cap, v + 1);
    std::vector<std::vector<NodeId>> adj(cap);
    for (const MinorEdge& e : g.edges()) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::vector<char> seen(cap, 0);
    for (NodeId s : g.nodes()) {
        if (seen[s]) continue;
        std::vector<NodeId> comp;
        std::vector<NodeId> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (NodeId u : adj[v]) {
                if (!seen[u]) {
                    seen[u] = 1;
                    stack.push_back(u);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

}  // namespace ncmatch
