#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "ncmatch/graph.hpp"

namespace ncmatch {

/// Family of node sets over a fixed minor: pairwise non-crossing, including
/// all singletons. Sets are stored sorted and deduplicated.
class LaminarFamily {
public:
    LaminarFamily() = default;

    static LaminarFamily singletons(const Minor& g) {
        LaminarFamily f;
        for (NodeId v : g.nodes()) f.add({v});
        return f;
    }

    void add(std::vector<NodeId> set) {
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        if (set.empty()) return;
        sets_.insert(std::move(set));
    }

    std::vector<std::vector<NodeId>> sets() const {
        return {sets_.begin(), sets_.end()};
    }

    std::vector<std::vector<NodeId>> non_singletons() const {
        std::vector<std::vector<NodeId>> out;
        for (const auto& s : sets_)
            if (s.size() > 1) out.push_back(s);
        return out;
    }

    std::size_t size() const { return sets_.size(); }

    bool contains(std::vector<NodeId> set) const {
        std::sort(set.begin(), set.end());
        return sets_.count(set) > 0;
    }

    bool is_laminar() const {
        auto all = sets();
        for (std::size_t i = 0; i < all.size(); ++i) {
            for (std::size_t j = i + 1; j < all.size(); ++j) {
                if (cross(all[i], all[j])) return false;
            }
        }
        return true;
    }

    static bool cross(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
        // Inputs sorted; crossing = not disjoint, neither contains the other.
        std::vector<NodeId> inter;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
        if (inter.empty()) return false;
        return inter.size() != a.size() && inter.size() != b.size();
    }

    /// Inclusion-wise maximal members with more than one node. In a laminar
    /// family these are pairwise disjoint.
    std::vector<std::vector<NodeId>> maximal_non_singletons() const {
        auto cand = non_singletons();
        std::vector<std::vector<NodeId>> out;
        for (const auto& s : cand) {
            bool covered = false;
            for (const auto& t : cand) {
                if (&s == &t || t.size() <= s.size()) continue;
                if (std::includes(t.begin(), t.end(), s.begin(), s.end())) {
                    covered = true;
                    break;
                }
            }
            if (!covered) out.push_back(s);
        }
        return out;
    }

private:
    std::set<std::vector<NodeId>> sets_;
};

/// Lemma 6.1 / Alg. 4 flip: every member whose node weight exceeds half of
/// the component's is replaced by its complement within the component. The
/// output is laminar again; parity of flipped sets is up to the caller (an
/// even complement is caught by contract()'s parity check downstream).
inline LaminarFamily flip_heavy_sets(const LaminarFamily& family, const Minor& g,
                                     const std::vector<NodeId>& component) {
    std::vector<NodeId> comp = component;
    std::sort(comp.begin(), comp.end());
    Weight comp_weight = g.set_weight(comp);
    LaminarFamily out;
    for (const auto& s : family.sets()) {
        if (!std::includes(comp.begin(), comp.end(), s.begin(), s.end()))
            throw Error("flip_heavy_sets: family member leaves the component");
        if (2 * g.set_weight(s) > comp_weight) {
            std::vector<NodeId> complement;
            std::set_difference(comp.begin(), comp.end(), s.begin(), s.end(),
                                std::back_inserter(complement));
            out.add(std::move(complement));
        } else {
            out.add(s);
        }
    }
    return out;
}

}  // namespace ncmatch
