#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <vector>

#include "ncmatch/reduce.hpp"
#include "ncmatch/weights.hpp"

namespace ncmatch {

/// Path a-b-c whose three vertices all have degree 2 (Def. 3.9); always a
/// tight odd set, for the whole polytope and every face.
struct Triad {
    NodeId a, b, c;  // b is the center; a < c

    std::vector<NodeId> as_set() const {
        std::vector<NodeId> s{a, b, c};
        std::sort(s.begin(), s.end());
        return s;
    }
};

/// All triads, ordered by (min endpoint, center).
inline std::vector<Triad> find_triads(const Minor& g) {
    auto deg = g.degrees();
    NodeId cap = 1;
    for (NodeId v : g.nodes()) cap = std::max(cap, v + 1);
    std::vector<std::vector<NodeId>> nbrs(cap);
    for (const MinorEdge& e : g.edges()) {
        nbrs[e.u].push_back(e.v);
        nbrs[e.v].push_back(e.u);
    }
    std::vector<Triad> out;
    for (NodeId b : g.nodes()) {
        if (deg[b] != 2) continue;
        NodeId a = nbrs[b][0], c = nbrs[b][1];
        if (a == c) continue;  // parallel pair, not a path
        if (deg[a] != 2 || deg[c] != 2) continue;
        if (a > c) std::swap(a, c);
        out.push_back({a, b, c});
    }
    std::sort(out.begin(), out.end(), [](const Triad& x, const Triad& y) {
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    return out;
}

/// Node-disjoint maximal subset via randomized parallel rounds on the triad
/// conflict graph (Luby-style, seeded), then a deterministic greedy sweep
/// that guarantees maximality.
inline std::vector<Triad> maximal_disjoint_triads(const std::vector<Triad>& triads,
                                                  std::uint64_t seed = 0x5bd1e995u,
                                                  std::int64_t* rounds_out = nullptr) {
    const std::size_t n = triads.size();
    std::vector<char> alive(n, 1), chosen(n, 0);
    // Conflict adjacency: triads sharing any node.
    NodeId cap = 1;
    for (const Triad& t : triads) cap = std::max({cap, t.a + 1, t.b + 1, t.c + 1});
    std::vector<std::vector<std::int32_t>> by_node(cap);
    for (std::size_t i = 0; i < n; ++i) {
        by_node[triads[i].a].push_back(static_cast<std::int32_t>(i));
        by_node[triads[i].b].push_back(static_cast<std::int32_t>(i));
        by_node[triads[i].c].push_back(static_cast<std::int32_t>(i));
    }
    std::vector<std::vector<std::int32_t>> conflict(n);
    for (const auto& bucket : by_node)
        for (std::int32_t i : bucket)
            for (std::int32_t j : bucket)
                if (i != j) conflict[i].push_back(j);
    for (auto& c : conflict) {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }

    std::int64_t rounds = 0;
    std::size_t live_count = n;
    while (live_count > 0) {
        ++rounds;
        // Local-minimum selection under per-round random priorities.
        auto priority = [&](std::size_t i) {
            return detail::mix64(seed ^ (rounds * 0x9e3779b97f4a7c15ull) ^ (i * 0xff51afd7ed558ccdull));
        };
        std::vector<std::size_t> selected;
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            std::uint64_t pi = priority(i);
            bool local_min = true;
            for (std::int32_t j : conflict[i]) {
                if (!alive[j]) continue;
                std::uint64_t pj = priority(j);
                if (pj < pi || (pj == pi && static_cast<std::size_t>(j) < i)) {
                    local_min = false;
                    break;
                }
            }
            if (local_min) selected.push_back(i);
        }
        for (std::size_t i : selected) {
            chosen[i] = 1;
            alive[i] = 0;
            --live_count;
            for (std::int32_t j : conflict[i])
                if (alive[j]) {
                    alive[j] = 0;
                    --live_count;
                }
        }
    }
    // Deterministic completion sweep; a correct Luby pass leaves nothing.
    for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        bool blocked = false;
        for (std::int32_t j : conflict[i])
            if (chosen[j]) {
                blocked = true;
                break;
            }
        if (!blocked) chosen[i] = 1;
    }
    std::vector<Triad> out;
    for (std::size_t i = 0; i < n; ++i)
        if (chosen[i]) out.push_back(triads[i]);
    // Maximality check.
    for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        bool blocked = false;
        for (std::int32_t j : conflict[i])
            if (chosen[j]) {
                blocked = true;
                break;
            }
        if (!blocked) throw Error("maximal_disjoint_triads: completion left an addable triad");
    }
    if (rounds_out) *rounds_out = rounds;
    return out;
}

struct PartialMatchingOptions {
    double walk_budget_scale = 1.0;  // scales s = ceil(m / log^2 n)
    std::int64_t family_cap = 24;    // 0 = always evaluate the whole family
    std::uint64_t mis_seed = 0x5bd1e995u;
};

struct IterationTrace {
    std::int64_t non_isolated_before = 0;
    std::int64_t non_isolated_after = 0;
    std::int64_t candidate_index = -1;  // -1 = heavy-node exit, 0 = triads
};

struct PartialMatchingResult {
    Minor minor;
    std::int64_t iterations = 0;
    std::int64_t rounds = 0;
    std::vector<IterationTrace> trace;
};

namespace detail {

inline std::int64_t walk_budget(std::int32_t m, std::int32_t n, double scale) {
    double log2n = n >= 2 ? std::log2(static_cast<double>(n)) : 1.0;
    double denom = std::max(1.0, log2n * log2n);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(scale * m / denom)));
}

}  // namespace detail

/// Alg. 3: iteratively replace the minor with the best shrinking candidate
/// (a maximal triad contraction, or Reduce under some family weight vector)
/// until the minor is itself a perfect matching. A node holding at least 1/6
/// of the total node weight short-circuits the loop: disallowed edges are
/// dropped, the complement of that node is contracted, and parallel edges
/// are deduplicated down to the smallest original id.
inline PartialMatchingResult partial_matching(const Minor& input, DecisionOracle& oracle,
                                              const PartialMatchingOptions& opts = {},
                                              const ThreadPool* pool = nullptr,
                                              std::ostream* trace_out = nullptr) {
    PartialMatchingResult res;
    Minor g = input.with_unit_weights();
    const std::int32_t root_m = g.root() ? g.root()->m() : 0;
    const WeightVector zero = WeightVector::zero(root_m);

    while (!is_perfect_matching_graph(g)) {
        ++res.iterations;
        IterationTrace it;
        it.non_isolated_before = non_isolated_edge_count(g);
        const Weight total = g.total_node_weight();

        std::optional<NodeId> heavy;
        for (NodeId v : g.nodes())
            if (6 * g.node_weight(v) >= total) {
                heavy = v;
                break;  // nodes are sorted, smallest qualifier wins
            }
        if (heavy) {
            RoundCost rc;
            std::vector<EdgeId> allowed0 = allowed_edges(g, zero, oracle, &rc);
            std::vector<char> keep(root_m, 0);
            for (EdgeId e : allowed0) keep[e] = 1;
            g = g.filter_edges([&](EdgeId e) { return keep[e] != 0; })
                    .contract_complement_unchecked(*heavy)
                    .dedupe_parallel_edges();
            rc.step();
            res.rounds += rc.rounds;
            it.non_isolated_after = non_isolated_edge_count(g);
            it.candidate_index = -1;
            res.trace.push_back(it);
            if (trace_out)
                *trace_out << "iter " << res.iterations << " heavy-node exit, edges "
                           << g.edge_count() << "\n";
            res.minor = g;
            return res;
        }

        // Candidate 0: contract a maximal set of node-disjoint triads, then
        // drop disallowed edges. (Contracting first keeps every contracted
        // set connected in the pre-removal graph; the edge set matches the
        // remove-then-contract order.)
        RoundCost rc;
        std::vector<EdgeId> allowed0 = allowed_edges(g, zero, oracle, &rc);
        std::vector<char> keep0(root_m, 0);
        for (EdgeId e : allowed0) keep0[e] = 1;
        std::int64_t mis_rounds = 0;
        std::vector<Triad> triads = find_triads(g);
        std::vector<Triad> mis = maximal_disjoint_triads(triads, opts.mis_seed, &mis_rounds);
        rc.step(1 + mis_rounds);
        std::vector<std::vector<NodeId>> triad_sets;
        triad_sets.reserve(mis.size());
        for (const Triad& t : mis) triad_sets.push_back(t.as_set());
        Minor triad_candidate =
            g.contract(triad_sets).filter_edges([&](EdgeId e) { return keep0[e] != 0; });

        const std::int32_t m_cur = g.edge_count();
        const std::int64_t s = detail::walk_budget(m_cur, g.node_count(), opts.walk_budget_scale);
        WeightFamily family(m_cur, s);
        const std::int64_t family_size = family.size();

        struct Candidate {
            Minor minor;
            std::int64_t count = 0;
            std::int64_t rounds = 0;
            bool failed = false;
        };
        std::vector<Candidate> cands;
        cands.push_back({triad_candidate, non_isolated_edge_count(triad_candidate), 0, false});

        std::int64_t evaluated = 0;
        std::int64_t best = -1;
        auto consider = [&](std::int64_t upto) {
            std::size_t first = cands.size();
            std::size_t count = static_cast<std::size_t>(upto - evaluated);
            cands.resize(first + count);
            auto eval_one = [&](std::size_t i) {
                std::int64_t fi = evaluated + static_cast<std::int64_t>(i);
                Candidate& c = cands[first + i];
                try {
                    RoundCost crc;
                    WeightVector wf = bind_to_minor(family.member(fi), g, root_m);
                    c.minor = reduce(g, wf, oracle, &crc);
                    c.count = non_isolated_edge_count(c.minor);
                    c.rounds = crc.rounds;
                } catch (const EvenComponentAtThresholdError&) {
                    c.failed = true;  // symptom of an inconsistent oracle answer
                } catch (const NoWitnessError&) {
                    c.failed = true;
                } catch (const NotLaminarError&) {
                    c.failed = true;
                } catch (const NoPerfectMatchingInputError&) {
                    c.failed = true;
                }
            };
            if (pool)
                pool->for_n(count, eval_one);
            else
                for (std::size_t i = 0; i < count; ++i) eval_one(i);
            evaluated = upto;
            std::int64_t max_child = 0;
            for (std::size_t i = 0; i < cands.size(); ++i) {
                max_child = std::max(max_child, cands[i].rounds);
                if (cands[i].failed) continue;
                if (best < 0 || cands[i].count < cands[best].count) best = static_cast<std::int64_t>(i);
            }
            rc.parallel_children(max_child);
        };

        std::int64_t first_batch =
            opts.family_cap > 0 ? std::min<std::int64_t>(opts.family_cap, family_size) : family_size;
        consider(first_batch);
        // Escalate to the full family only if the capped prefix is stuck.
        if ((best < 0 || cands[best].count >= it.non_isolated_before) && evaluated < family_size)
            consider(family_size);

        if (best < 0 || cands[best].count >= it.non_isolated_before)
            throw NoProgressError(
                "partial_matching: no candidate reduced the non-isolated edge count (" +
                std::to_string(it.non_isolated_before) + ")");

        g = std::move(cands[best].minor);
        res.rounds += rc.rounds;
        it.non_isolated_after = cands[best].count;
        it.candidate_index = best;
        res.trace.push_back(it);
        if (trace_out)
            *trace_out << "iter " << res.iterations << " chose candidate " << best << ", count "
                       << it.non_isolated_before << " -> " << it.non_isolated_after << "\n";
    }
    res.minor = g;
    return res;
}

}  // namespace ncmatch
