#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "ncmatch/duals.hpp"
#include "ncmatch/structure.hpp"
#include "support/naive.hpp"

using namespace ncmatch;
using ncmatch::lab::build_even_walks;
using ncmatch::lab::extract_edge_disjoint_cycles;
using ncmatch::lab::pair_tokens_on_tree;
using ncmatch::lab::verify_walk_destruction;

namespace {

void check_edge_disjoint(const std::vector<std::vector<EdgeId>>& cycles) {
    std::set<EdgeId> seen;
    for (const auto& c : cycles)
        for (EdgeId e : c) {
            CHECK(seen.insert(e).second);
        }
}

double cycle_bound(int n, int m) {
    if (n < 2) return 0;
    return (m - n) / (2.0 * std::max(1.0, std::log2(static_cast<double>(n))));
}

}  // namespace

TEST_CASE("cycle extraction on forests, K5 and parallel pairs") {
    naive::Rng rng(3);
    Graph forest = naive::random_tree(rng, 12);
    CHECK(extract_edge_disjoint_cycles(Minor::whole(forest)).empty());

    Graph k5;
    k5.n = 5;
    for (NodeId u = 0; u < 5; ++u)
        for (NodeId v = u + 1; v < 5; ++v) k5.edges.push_back({u, v});
    auto cycles = extract_edge_disjoint_cycles(Minor::whole(k5));
    check_edge_disjoint(cycles);
    CHECK(cycles.size() >= 2);  // bound is (10-5)/(2 log2 5) ~ 1.08

    Graph pp;
    pp.n = 2;
    pp.edges = {{0, 1}, {0, 1}};
    auto two = extract_edge_disjoint_cycles(Minor::whole(pp));
    REQUIRE(two.size() == 1);
    CHECK(two[0].size() == 2);
}

TEST_CASE("cycle extraction meets the count bound on random multigraphs") {
    naive::Rng rng(515151);
    for (int round = 0; round < 300; ++round) {
        int n = 4 + static_cast<int>(rng.below(60));
        int m = static_cast<int>(rng.below(3 * n + 1));
        Graph g;
        g.n = n;
        for (int k = 0; k < m; ++k) {
            NodeId u = static_cast<NodeId>(rng.below(n));
            NodeId v = static_cast<NodeId>(rng.below(n));
            if (u == v) v = static_cast<NodeId>((v + 1) % n);
            g.edges.push_back({std::min(u, v), std::max(u, v)});
        }
        auto cycles = extract_edge_disjoint_cycles(Minor::whole(g));
        check_edge_disjoint(cycles);
        CHECK(static_cast<double>(cycles.size()) >= cycle_bound(g.n, g.m()) - 1e-9);
        // every reported cycle is closed in the original graph
        for (const auto& c : cycles) {
            std::map<NodeId, int> deg;
            for (EdgeId e : c) {
                deg[g.edges[e].u] += 1;
                deg[g.edges[e].v] += 1;
            }
            for (auto [v, d] : deg) CHECK(d % 2 == 0);
        }
    }
}

TEST_CASE("token pairing on trees") {
    Graph p3;
    p3.n = 3;
    p3.edges = {{0, 1}, {1, 2}};
    Minor tree = Minor::whole(p3);

    auto same = pair_tokens_on_tree(tree, {1, 1});
    REQUIRE(same.size() == 1);
    CHECK(same[0].edges.empty());

    auto ends = pair_tokens_on_tree(tree, {0, 2});
    REQUIRE(ends.size() == 1);
    CHECK(ends[0].edges.size() == 2);

    Graph star;
    star.n = 5;
    star.edges = {{0, 1}, {0, 2}, {0, 3}, {0, 4}};
    auto leaves = pair_tokens_on_tree(Minor::whole(star), {1, 2, 3, 4});
    REQUIRE(leaves.size() == 2);
    std::set<EdgeId> used;
    for (const auto& tp : leaves) {
        CHECK(tp.edges.size() == 2);
        for (EdgeId e : tp.edges) CHECK(used.insert(e).second);
    }

    CHECK_THROWS_AS(pair_tokens_on_tree(tree, {0, 1, 2}), OddTokensError);
}

TEST_CASE("token pairing paths are edge-disjoint on random trees") {
    naive::Rng rng(2052);
    for (int round = 0; round < 300; ++round) {
        int n = 2 + static_cast<int>(rng.below(40));
        Graph t = naive::random_tree(rng, n);
        Minor tree = Minor::whole(t);
        int k = 2 * (1 + static_cast<int>(rng.below(6)));
        std::vector<NodeId> tokens;
        for (int i = 0; i < k; ++i) tokens.push_back(static_cast<NodeId>(rng.below(n)));
        auto paths = pair_tokens_on_tree(tree, tokens);
        REQUIRE(paths.size() == tokens.size() / 2);
        std::set<EdgeId> used;
        std::set<std::size_t> matched;
        for (const auto& tp : paths) {
            CHECK(matched.insert(tp.token_a).second);
            CHECK(matched.insert(tp.token_b).second);
            for (EdgeId e : tp.edges) CHECK(used.insert(e).second);
            // the path really connects the two token vertices
            std::map<NodeId, int> deg;
            for (EdgeId e : tp.edges) {
                deg[t.edges[e].u] ^= 1;
                deg[t.edges[e].v] ^= 1;
            }
            NodeId a = tokens[tp.token_a], b = tokens[tp.token_b];
            if (a == b) {
                CHECK(tp.edges.empty());
            } else {
                CHECK(deg[a] == 1);
                CHECK(deg[b] == 1);
                int odd = 0;
                for (auto [v, d] : deg) odd += d;
                CHECK(odd == 2);
            }
        }
    }
}

TEST_CASE("even walks from two odd cycles") {
    // vertex-disjoint triangles joined by one edge
    Graph g;
    g.n = 6;
    g.edges = {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {2, 3}};
    Minor m = Minor::whole(g);
    auto walks = build_even_walks(m, {{0, 1, 2}, {3, 4, 5}});
    REQUIRE(walks.size() == 1);
    CHECK(walks[0].edge_list().size() == 8);  // 3 + 1 + 3 + 1
    CHECK(walks[0].kind() == EvenWalk::Kind::TwoOddCyclesWithPath);

    CHECK(build_even_walks(m, {}).empty());

    // two triangles sharing a vertex: connecting path has length zero
    Graph shared;
    shared.n = 5;
    shared.edges = {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 2}};
    auto joined = build_even_walks(Minor::whole(shared), {{0, 1, 2}, {3, 4, 5}});
    REQUIRE(joined.size() == 1);
    CHECK(joined[0].edge_list().size() == 6);
}

TEST_CASE("even-walk construction scales with the cycle count") {
    naive::Rng rng(31313);
    for (int round = 0; round < 100; ++round) {
        int n = 10 + static_cast<int>(rng.below(60));
        Graph g = naive::random_matchable(rng, n - (n % 2), 3 * n);
        Minor m = Minor::whole(g);
        auto cycles = extract_edge_disjoint_cycles(m);
        std::vector<std::vector<EdgeId>> odd;
        for (const auto& c : cycles)
            if (c.size() % 2 == 1) odd.push_back(c);
        if (odd.size() % 2 == 1) odd.pop_back();
        if (odd.empty()) continue;
        auto walks = build_even_walks(m, odd);
        // all walks validate (the factory throws otherwise) and are
        // pairwise edge-disjoint by construction
        std::set<EdgeId> once;
        for (const EvenWalk& w : walks) {
            std::set<EdgeId> mine(w.edge_list().begin(), w.edge_list().end());
            for (EdgeId e : mine) CHECK(once.insert(e).second);
        }
    }
}

TEST_CASE("walk destruction evidence on the blocked-cycle graph") {
    Graph g;
    g.n = 6;
    g.edges = {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {0, 3}, {1, 4}, {2, 5}};
    WeightVector w({0, 0, 0, 0, 0, 0, 1, 1, 1});
    BruteForceOracle oracle;
    Minor m = Minor::whole(g);
    LaminarFamily family = balanced_critical_dual(m, w, oracle);
    EvenWalk orange = EvenWalk::even_cycle(m, 0, {6, 3, 7, 0});
    auto ev = verify_walk_destruction(m, w, orange, family, oracle);
    CHECK(ev.kind == lab::DestructionEvidence::Kind::TightSetMismatch);
    CHECK(ev.mismatch_value == 2);
    CHECK((ev.set == std::vector<NodeId>{0, 1, 2} || ev.set == std::vector<NodeId>{3, 4, 5}));
    // the trapped edge lies inside the reported set
    bool iu = std::binary_search(ev.set.begin(), ev.set.end(), g.edges[ev.edge].u);
    bool iv = std::binary_search(ev.set.begin(), ev.set.end(), g.edges[ev.edge].v);
    CHECK((iu && iv));
}

TEST_CASE("bipartite positive-circulation cycles lose an edge") {
    // C4 with one heavy edge: the heavy pair is disallowed.
    Graph c4;
    c4.n = 4;
    c4.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    WeightVector w({5, 0, 0, 0});
    BruteForceOracle oracle;
    Minor m = Minor::whole(c4);
    LaminarFamily family = balanced_critical_dual(m, w, oracle);
    EvenWalk cycle = EvenWalk::even_cycle(m, 0, {0, 1, 2, 3});
    REQUIRE(circulation(w, cycle) > 0);
    auto ev = verify_walk_destruction(m, w, cycle, family, oracle);
    CHECK(ev.kind == lab::DestructionEvidence::Kind::DisallowedEdge);
    CHECK(ev.edge == 0);
}

TEST_CASE("zero-circulation walks are rejected") {
    Graph c4;
    c4.n = 4;
    c4.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    BruteForceOracle oracle;
    Minor m = Minor::whole(c4);
    LaminarFamily family = balanced_critical_dual(m, WeightVector::zero(4), oracle);
    EvenWalk cycle = EvenWalk::even_cycle(m, 0, {0, 1, 2, 3});
    CHECK_THROWS_AS(verify_walk_destruction(m, WeightVector::zero(4), cycle, family, oracle),
                    Error);
}
