#pragma once

#include <vector>

#include "ncmatch/duals.hpp"

namespace ncmatch {

/// Alg. 4: remove disallowed edges, compute the per-component laminar dual,
/// flip sets heavier than half their component, and contract the
/// inclusion-wise maximal sets. The result is a matching minor of the input
/// (Fact 3.4); no contracted node ends up above half its component's weight.
inline Minor reduce(const Minor& g, const WeightVector& w, DecisionOracle& oracle,
                    RoundCost* rc = nullptr) {
    LaminarFamily family = balanced_critical_dual(g, w, oracle, rc);

    std::vector<EdgeId> allowed = allowed_edges(g, w, oracle);  // memoized by now
    std::vector<char> keep(static_cast<std::size_t>(g.root()->m()), 0);
    for (EdgeId e : allowed) keep[e] = 1;
    Minor restricted = g.filter_edges([&](EdgeId e) { return keep[e] != 0; });

    std::vector<std::vector<NodeId>> to_contract;
    for (const auto& comp : connected_components(restricted)) {
        LaminarFamily comp_family;
        for (const auto& s : family.non_singletons()) {
            if (std::includes(comp.begin(), comp.end(), s.begin(), s.end()))
                comp_family.add(s);
        }
        if (comp_family.size() == 0) continue;
        LaminarFamily flipped = flip_heavy_sets(comp_family, restricted, comp);
        for (auto& s : flipped.maximal_non_singletons()) to_contract.push_back(std::move(s));
    }
    if (rc) rc->step();
    if (to_contract.empty()) return restricted;
    return restricted.contract(to_contract);
}

}  // namespace ncmatch
