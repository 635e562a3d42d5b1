#include <catch2/catch_amalgamated.hpp>

#include "ncmatch/structure.hpp"
#include "ncmatch/walks.hpp"
#include "ncmatch/weights.hpp"
#include "support/naive.hpp"

using namespace ncmatch;

namespace {

Graph cycle(int n) {
    Graph g;
    g.n = n;
    for (NodeId v = 0; v < n; ++v) g.edges.push_back({v, static_cast<NodeId>((v + 1) % n)});
    return g;
}

/// Two complete triangles joined vertex-by-vertex with three unit-weight cut
/// edges; every edge is allowed, the orange 4-cycle has circulation 2 and
/// mismatch 2 with the first triangle.
struct BlockedCycleFixture {
    Graph graph;
    WeightVector weights;
    Minor minor;
    EvenWalk orange;

    BlockedCycleFixture()
        : graph(make_graph()),
          weights(std::vector<Weight>{0, 0, 0, 0, 0, 0, 1, 1, 1}),
          minor(Minor::whole(graph)),
          orange(EvenWalk::even_cycle(minor, 0, {6, 3, 7, 0})) {}

    static Graph make_graph() {
        Graph g;
        g.n = 6;
        g.edges = {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {0, 3}, {1, 4}, {2, 5}};
        return g;
    }
};

}  // namespace

TEST_CASE("signature of a 4-cycle alternates") {
    Minor m = Minor::whole(cycle(4));
    EvenWalk w = EvenWalk::even_cycle(m, 0, {0, 1, 2, 3});
    auto sig = w.signature();
    REQUIRE(sig.size() == 4);
    CHECK(sig.at(0) == -sig.at(1));
    CHECK(sig.at(1) == -sig.at(2));
    CHECK(sig.at(2) == -sig.at(3));
    for (auto [e, s] : sig) CHECK((s == 1 || s == -1));
}

TEST_CASE("doubled connecting edge gets a +-2 signature entry") {
    // two triangles joined by one edge: 0-1-2, 3-4-5, bridge 2-3
    Graph g;
    g.n = 6;
    g.edges = {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {2, 3}};
    Minor m = Minor::whole(g);
    EvenWalk w = EvenWalk::two_odd_cycles(m, 2, {2, 0, 1}, {6}, 3, {3, 4, 5});
    REQUIRE(w.edge_list().size() == 8);
    auto sig = w.signature();
    CHECK(std::abs(sig.at(6)) == 2);
    int twos = 0;
    for (auto [e, s] : sig)
        if (std::abs(s) == 2) ++twos;
    CHECK(twos == 1);
}

TEST_CASE("starting edge choice flips the signature but not the circulation") {
    Minor m = Minor::whole(cycle(4));
    EvenWalk w1 = EvenWalk::even_cycle(m, 0, {0, 1, 2, 3});
    EvenWalk w2 = EvenWalk::even_cycle(m, 1, {1, 2, 3, 0});
    WeightVector w({1, 2, 1, 7});
    CHECK(circulation(w, w1) == circulation(w, w2));
    auto s1 = w1.signature();
    auto s2 = w2.signature();
    CHECK(s1.at(0) == -s2.at(0));
}

TEST_CASE("circulation on the 4-cycle") {
    Minor m = Minor::whole(cycle(4));
    EvenWalk walk = EvenWalk::even_cycle(m, 0, {0, 1, 2, 3});
    CHECK(circulation(WeightVector({1, 2, 1, 2}), walk) == 2);
    CHECK(circulation(WeightVector::zero(4), walk) == 0);
    CHECK(circulation(WeightVector({1, 1, 1, 1}), walk) == 0);
}

TEST_CASE("mismatch on the blocked-cycle example") {
    BlockedCycleFixture fx;
    CHECK(circulation(fx.weights, fx.orange) == 2);
    CHECK(mismatch(fx.minor, fx.orange, {0, 1, 2}) == 2);
    // a walk entirely inside a set has mismatch zero
    EvenWalk inside = EvenWalk::even_cycle(fx.minor, 0, {6, 3, 7, 0});
    CHECK(mismatch(fx.minor, inside, {0, 1, 2, 3, 4, 5}) == 0);
}

TEST_CASE("crossing a set twice with opposite parities cancels") {
    Minor m = Minor::whole(cycle(4));
    EvenWalk walk = EvenWalk::even_cycle(m, 0, {0, 1, 2, 3});
    // entering {1} via edge 0 and leaving via edge 1: adjacent positions,
    // opposite signs
    CHECK(mismatch(m, walk, {1}) == 0);
    CHECK(mismatch(m, walk, {1, 2}) == 2);  // same-parity crossings add up
}

TEST_CASE("walk validation rejects malformed inputs") {
    Minor m = Minor::whole(cycle(4));
    CHECK_THROWS_AS(EvenWalk::even_cycle(m, 0, {0, 1}), InvalidWalkError);      // not closed
    CHECK_THROWS_AS(EvenWalk::even_cycle(m, 0, {0, 1, 2}), InvalidWalkError);   // odd
    CHECK_THROWS_AS(EvenWalk::even_cycle(m, 1, {0, 1, 2, 3}), InvalidWalkError);  // wrong start
    Graph g;
    g.n = 6;
    g.edges = {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {2, 3}};
    Minor m2 = Minor::whole(g);
    // even "cycles" joined by a path are rejected
    CHECK_THROWS_AS(EvenWalk::two_odd_cycles(m2, 2, {2, 0, 1, 1}, {6}, 3, {3, 4, 5}),
                    InvalidWalkError);
}

TEST_CASE("weight family is deterministic and separates a single 4-cycle") {
    WeightFamily f1(4, 1), f2(4, 1);
    REQUIRE(f1.size() == f2.size());
    CHECK(f1.member(0) == f2.member(0));
    CHECK(f1.member(f1.size() - 1) == f2.member(f2.size() - 1));

    Minor m = Minor::whole(cycle(4));
    EvenWalk walk = EvenWalk::even_cycle(m, 0, {0, 1, 2, 3});
    WeightVector w0 = bind_to_minor(f1.member(0), m, 4);
    CHECK(circulation(w0, walk) > 0);
}

TEST_CASE("some family member separates random edge-disjoint even cycles") {
    naive::Rng rng(60601);
    int rounds_with_cycles = 0;
    for (int round = 0; round < 60; ++round) {
        int n = 10 + static_cast<int>(rng.below(30));
        Graph g = naive::random_matchable(rng, n - (n % 2), 2 * n);
        Minor m = Minor::whole(g);
        auto cycles = lab::extract_edge_disjoint_cycles(m);
        std::vector<EvenWalk> walks;
        for (const auto& c : cycles) {
            if (c.size() % 2 == 1 || c.size() < 2 || walks.size() >= 10) continue;
            NodeId anchor = g.n;
            for (EdgeId id : c)
                anchor = std::min({anchor, g.edges[id].u, g.edges[id].v});
            walks.push_back(EvenWalk::even_cycle(m, anchor, lab::detail_walks::rotate_cycle(m, c, anchor)));
        }
        if (walks.empty()) continue;
        ++rounds_with_cycles;
        WeightFamily fam(g.m(), static_cast<std::int64_t>(walks.size()));
        bool separated = false;
        for (std::int64_t i = 0; i < fam.size() && !separated; ++i) {
            WeightVector wv = bind_to_minor(fam.member(i), m, g.m());
            bool all = true;
            for (const EvenWalk& wk : walks)
                if (circulation(wv, wk) == 0) {
                    all = false;
                    break;
                }
            separated = all;
        }
        CHECK(separated);
    }
    CHECK(rounds_with_cycles > 20);
}

TEST_CASE("cycles in the symmetric difference of two MWPMs have zero circulation") {
    naive::Rng rng(271828);
    int pairs_checked = 0;
    for (int round = 0; round < 80 && pairs_checked < 60; ++round) {
        auto inst = naive::random_graph(rng, 6 + 2 * rng.below(4), 55, 3);
        auto optima = naive::min_weight_matchings(inst.graph, inst.weights);
        if (optima.size() < 2) continue;
        Minor m = Minor::whole(inst.graph);
        for (std::size_t a = 0; a < optima.size() && pairs_checked < 60; ++a) {
            for (std::size_t b = a + 1; b < optima.size() && pairs_checked < 60; ++b) {
                std::vector<EdgeId> sym;
                std::set_symmetric_difference(optima[a].begin(), optima[a].end(),
                                              optima[b].begin(), optima[b].end(),
                                              std::back_inserter(sym));
                if (sym.empty()) continue;
                // split the symmetric difference into its cycles
                std::vector<char> used(inst.graph.m(), 0);
                std::map<NodeId, std::vector<EdgeId>> at;
                for (EdgeId e : sym) {
                    at[inst.graph.edges[e].u].push_back(e);
                    at[inst.graph.edges[e].v].push_back(e);
                }
                for (EdgeId start : sym) {
                    if (used[start]) continue;
                    std::vector<EdgeId> cyc;
                    NodeId anchor = std::min(inst.graph.edges[start].u, inst.graph.edges[start].v);
                    NodeId cur = anchor;
                    EdgeId prev = -1;
                    do {
                        const auto& ids = at.at(cur);
                        EdgeId nxt = (ids[0] == prev || used[ids[0]]) ? ids[1] : ids[0];
                        cyc.push_back(nxt);
                        used[nxt] = 1;
                        const auto& e = inst.graph.edges[nxt];
                        cur = (e.u == cur) ? e.v : e.u;
                        prev = nxt;
                    } while (cur != anchor);
                    EvenWalk walk = EvenWalk::even_cycle(m, anchor, cyc);
                    CHECK(circulation(inst.weights, walk) == 0);
                    ++pairs_checked;
                }
            }
        }
    }
    CHECK(pairs_checked >= 30);
}

TEST_CASE("positive mismatch implies an internal edge") {
    // Lemma 3.13 as a property over random sets and walks.
    naive::Rng rng(1414);
    int found = 0;
    for (int round = 0; round < 200; ++round) {
        int n = 8 + static_cast<int>(rng.below(14));
        Graph g = naive::random_matchable(rng, n - (n % 2), 2 * n);
        Minor m = Minor::whole(g);
        auto cycles = lab::extract_edge_disjoint_cycles(m);
        for (const auto& c : cycles) {
            if (c.size() % 2 == 1 || c.size() < 4) continue;
            NodeId anchor = g.n;
            for (EdgeId id : c) anchor = std::min({anchor, g.edges[id].u, g.edges[id].v});
            EvenWalk walk =
                EvenWalk::even_cycle(m, anchor, lab::detail_walks::rotate_cycle(m, c, anchor));
            std::vector<NodeId> set;
            for (NodeId v = 0; v < g.n; ++v)
                if (rng.below(2)) set.push_back(v);
            if (set.empty()) continue;
            if (mismatch(m, walk, set) == 0) continue;
            ++found;
            bool internal = false;
            std::vector<char> in(g.n, 0);
            for (NodeId v : set) in[v] = 1;
            for (EdgeId e : walk.edge_list())
                if (in[g.edges[e].u] && in[g.edges[e].v]) internal = true;
            CHECK(internal);
        }
    }
    CHECK(found > 50);
}
