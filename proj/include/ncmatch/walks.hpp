#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "ncmatch/graph.hpp"
#include "ncmatch/weights.hpp"

namespace ncmatch {

/// Closed even-length edge list that traverses either a simple even cycle or
/// two odd cycles joined by a doubly-traversed path (Def. 2.6). Walks are
/// built through the two factories below, which derive the traversal order
/// and validate the claimed shape; a doubled edge always lands on positions
/// of equal parity, so its signature entry is +-2.
class EvenWalk {
public:
    enum class Kind { SimpleEvenCycle, TwoOddCyclesWithPath };

    /// Simple even cycle given as consecutive edges starting at `start`.
    static EvenWalk even_cycle(const Minor& g, NodeId start, std::vector<EdgeId> cycle_edges) {
        EvenWalk w;
        w.kind_ = Kind::SimpleEvenCycle;
        w.start_ = start;
        w.edges_ = std::move(cycle_edges);
        w.validate(g);
        return w;
    }

    /// Two odd cycles joined by a (possibly empty) path. `cycle1` starts and
    /// ends at `anchor1`, `path` runs anchor1 -> anchor2, `cycle2` closes at
    /// `anchor2`. The traversal is cycle1, path, cycle2, reversed path.
    static EvenWalk two_odd_cycles(const Minor& g, NodeId anchor1, std::vector<EdgeId> cycle1,
                                   std::vector<EdgeId> path, NodeId anchor2,
                                   std::vector<EdgeId> cycle2) {
        EvenWalk w;
        w.kind_ = Kind::TwoOddCyclesWithPath;
        w.start_ = anchor1;
        w.cycle1_len_ = static_cast<std::int32_t>(cycle1.size());
        w.path_len_ = static_cast<std::int32_t>(path.size());
        w.anchor2_ = anchor2;
        w.edges_ = std::move(cycle1);
        w.edges_.insert(w.edges_.end(), path.begin(), path.end());
        w.edges_.insert(w.edges_.end(), cycle2.begin(), cycle2.end());
        w.edges_.insert(w.edges_.end(), path.rbegin(), path.rend());
        w.validate(g);
        return w;
    }

    Kind kind() const { return kind_; }
    const std::vector<EdgeId>& edge_list() const { return edges_; }
    NodeId start() const { return start_; }

    /// sign(C) = sum_i (-1)^i 1_{e_i}; entries in {-2,-1,1,2}, never zero.
    std::map<EdgeId, int> signature() const {
        std::map<EdgeId, int> sig;
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            int s = (i % 2 == 0) ? -1 : 1;  // first edge is position 1
            sig[edges_[i]] += s;
        }
        for (auto it = sig.begin(); it != sig.end();) {
            if (it->second == 0)
                throw InvalidWalkError("signature cancels on a doubled edge");
            ++it;
        }
        return sig;
    }

private:
    EvenWalk() = default;

    /// Walk the edge list from start_, checking adjacency and the claimed
    /// classification against the minor.
    void validate(const Minor& g) const {
        if (edges_.empty() || edges_.size() % 2 != 0)
            throw InvalidWalkError("even walk needs a positive even number of edges");
        std::map<EdgeId, const MinorEdge*> lookup;
        for (const MinorEdge& e : g.edges()) lookup[e.id] = &e;

        // Derive vertex sequence; loops are banned so each step is forced.
        std::vector<NodeId> verts{start_};
        NodeId cur = start_;
        for (EdgeId id : edges_) {
            auto it = lookup.find(id);
            if (it == lookup.end()) throw InvalidWalkError("walk edge not in minor");
            const MinorEdge& e = *it->second;
            if (e.u == cur)
                cur = e.v;
            else if (e.v == cur)
                cur = e.u;
            else
                throw InvalidWalkError("walk edges are not consecutive");
            verts.push_back(cur);
        }
        if (cur != start_) throw InvalidWalkError("walk does not close");

        std::map<EdgeId, std::vector<std::size_t>> occurrences;
        for (std::size_t i = 0; i < edges_.size(); ++i) occurrences[edges_[i]].push_back(i);
        for (const auto& [id, occ] : occurrences) {
            if (occ.size() > 2) throw InvalidWalkError("edge traversed more than twice");
            if (occ.size() == 2 && (occ[0] % 2) != (occ[1] % 2))
                throw InvalidWalkError("doubled edge with mixed parity");
        }

        if (kind_ == Kind::SimpleEvenCycle) {
            for (const auto& [id, occ] : occurrences)
                if (occ.size() != 1) throw InvalidWalkError("cycle reuses an edge");
            std::vector<NodeId> body(verts.begin(), verts.end() - 1);
            std::sort(body.begin(), body.end());
            if (std::adjacent_find(body.begin(), body.end()) != body.end())
                throw InvalidWalkError("cycle revisits a vertex");
        } else {
            std::size_t c1 = static_cast<std::size_t>(cycle1_len_);
            std::size_t p = static_cast<std::size_t>(path_len_);
            std::size_t c2 = edges_.size() - c1 - 2 * p;
            if (c1 % 2 == 0 || c2 % 2 == 0)
                throw InvalidWalkError("joined cycles must both be odd");
            if (verts[c1] != start_) throw InvalidWalkError("first cycle does not close");
            if (verts[c1 + p] != anchor2_ || verts[c1 + p + c2] != anchor2_)
                throw InvalidWalkError("second cycle does not close at its anchor");
            check_simple_cycle(std::vector<NodeId>(verts.begin(), verts.begin() + c1));
            check_simple_cycle(
                std::vector<NodeId>(verts.begin() + c1 + p, verts.begin() + c1 + p + c2));
            // Path must be simple and edge-disjoint from both cycles.
            std::vector<NodeId> pverts(verts.begin() + c1, verts.begin() + c1 + p + 1);
            std::sort(pverts.begin(), pverts.end());
            if (std::adjacent_find(pverts.begin(), pverts.end()) != pverts.end())
                throw InvalidWalkError("connecting path revisits a vertex");
            for (std::size_t i = 0; i < p; ++i) {
                EdgeId pe = edges_[c1 + i];
                if (occurrences[pe].size() != 2)
                    throw InvalidWalkError("path edge must be traversed twice");
            }
            for (std::size_t i = 0; i < c1; ++i)
                if (occurrences[edges_[i]].size() != 1)
                    throw InvalidWalkError("cycle edge shared with path");
            for (std::size_t i = c1 + p; i < c1 + p + c2; ++i)
                if (occurrences[edges_[i]].size() != 1)
                    throw InvalidWalkError("cycle edge shared with path");
        }
    }

    static void check_simple_cycle(std::vector<NodeId> body) {
        std::sort(body.begin(), body.end());
        if (std::adjacent_find(body.begin(), body.end()) != body.end())
            throw InvalidWalkError("cycle revisits a vertex");
    }

    Kind kind_ = Kind::SimpleEvenCycle;
    NodeId start_ = 0;
    NodeId anchor2_ = 0;
    std::int32_t cycle1_len_ = 0;
    std::int32_t path_len_ = 0;
    std::vector<EdgeId> edges_;
};

/// crc_w(C) = |<w, sign(C)>|.
inline Weight circulation(const WeightVector& w, const EvenWalk& walk) {
    Weight dot = 0;
    for (const auto& [e, s] : walk.signature()) dot += w.at(e) * s;
    return dot < 0 ? -dot : dot;
}

/// mis(C, S) = |<1_{delta(S)}, sign(C)>|, doubled crossings counting twice.
inline Weight mismatch(const Minor& g, const EvenWalk& walk, const std::vector<NodeId>& set) {
    NodeId cap = 1;
    for (NodeId v : g.nodes()) cap = std::max(cap, v + 1);
    std::vector<char> in(cap, 0);
    for (NodeId v : set) in[v] = 1;
    std::map<EdgeId, const MinorEdge*> lookup;
    for (const MinorEdge& e : g.edges()) lookup[e.id] = &e;
    Weight dot = 0;
    for (const auto& [id, s] : walk.signature()) {
        const MinorEdge& e = *lookup.at(id);
        bool iu = e.u < cap && in[e.u];
        bool iv = e.v < cap && in[e.v];
        if (iu != iv) dot += s;
    }
    return dot < 0 ? -dot : dot;
}

}  // namespace ncmatch
