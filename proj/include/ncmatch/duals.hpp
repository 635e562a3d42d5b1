#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "ncmatch/laminar.hpp"
#include "ncmatch/oracle.hpp"

namespace ncmatch {

namespace detail {

struct Dsu {
    explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
    std::vector<std::size_t> parent;
};

}  // namespace detail

/// Support of the balanced critical dual (Alg. 1), run independently per
/// connected component of the E[w]-restricted graph. For each node v,
/// mu(v) = min_u O(R - u - v, w) over the restricted component; the reweighted
/// edges w'_e = w_e + mu(u) + mu(v) are swept by threshold, and every proper
/// nontrivial connected component of each prefix subgraph joins the family.
/// The full component itself is excluded (its flip would be empty), and a
/// proper even-weight component is reported as an oracle-error symptom.
inline LaminarFamily balanced_critical_dual(const Minor& g, const WeightVector& w,
                                            DecisionOracle& oracle, RoundCost* rc = nullptr) {
    LaminarFamily family = LaminarFamily::singletons(g);
    if (g.node_count() == 0) return family;

    std::vector<EdgeId> allowed = allowed_edges(g, w, oracle, rc);
    std::vector<char> keep(static_cast<std::size_t>(g.root()->m()), 0);
    for (EdgeId e : allowed) keep[e] = 1;
    Minor restricted = g.filter_edges([&](EdgeId e) { return keep[e] != 0; });

    auto comps = connected_components(restricted);
    std::int64_t max_child = 0;
    for (const auto& comp : comps) {
        if (comp.size() == 1)
            throw NoWitnessError("balanced_critical_dual: node without allowed edges");
        RoundCost comp_rc;
        Minor rc_minor = restricted.induced(comp);
        std::vector<OracleAnswer> mus = mu_all(rc_minor, w, comp, oracle, &comp_rc);
        std::vector<std::size_t> pos(comp.back() + 1);
        for (std::size_t i = 0; i < comp.size(); ++i) pos[comp[i]] = i;
        for (std::size_t i = 0; i < comp.size(); ++i)
            if (!mus[i])
                throw NoWitnessError("balanced_critical_dual: component is not matching-covered");

        struct ReEdge {
            Weight wprime;
            std::size_t u, v;  // positions within comp
        };
        std::vector<ReEdge> redges;
        redges.reserve(rc_minor.edges().size());
        for (const MinorEdge& e : rc_minor.edges())
            redges.push_back({w.at(e.id) + *mus[pos[e.u]] + *mus[pos[e.v]], pos[e.u], pos[e.v]});
        std::sort(redges.begin(), redges.end(),
                  [](const ReEdge& a, const ReEdge& b) { return a.wprime < b.wprime; });

        // Threshold sweep: after adding all edges with w' <= t, snapshot the
        // nontrivial components.
        detail::Dsu dsu(comp.size());
        std::size_t i = 0;
        comp_rc.step();  // the sweep is one more parallel phase
        while (i < redges.size()) {
            Weight t = redges[i].wprime;
            for (; i < redges.size() && redges[i].wprime == t; ++i)
                dsu.unite(redges[i].u, redges[i].v);
            std::vector<std::vector<NodeId>> groups(comp.size());
            for (std::size_t x = 0; x < comp.size(); ++x)
                groups[dsu.find(x)].push_back(comp[x]);
            for (auto& s : groups) {
                if (s.size() < 2 || s.size() == comp.size()) continue;
                if (g.set_weight(s) % 2 == 0)
                    throw EvenComponentAtThresholdError(
                        "balanced_critical_dual: proper even-weight component at threshold " +
                        std::to_string(t));
                family.add(std::move(s));
            }
        }
        max_child = std::max(max_child, comp_rc.rounds);
    }
    if (rc) rc->parallel_children(max_child);

    if (!family.is_laminar())
        throw NotLaminarError("balanced_critical_dual: output family crosses itself");
    return family;
}

}  // namespace ncmatch
