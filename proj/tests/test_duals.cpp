#include <catch2/catch_amalgamated.hpp>

#include "ncmatch/duals.hpp"
#include "support/naive.hpp"

using namespace ncmatch;

namespace {

Graph k2() {
    Graph g;
    g.n = 2;
    g.edges = {{0, 1}};
    return g;
}

Graph two_triangles_bridge() {
    Graph g;
    g.n = 6;
    g.edges = {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {2, 3}};
    return g;
}

Graph blocked_cycle_graph() {
    Graph g;
    g.n = 6;
    g.edges = {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {0, 3}, {1, 4}, {2, 5}};
    return g;
}

}  // namespace

TEST_CASE("K2 dual support is the singletons") {
    BruteForceOracle oracle;
    Minor m = Minor::whole(k2());
    LaminarFamily fam = balanced_critical_dual(m, WeightVector::zero(1), oracle);
    CHECK(fam.size() == 2);
    CHECK(fam.contains({0}));
    CHECK(fam.contains({1}));
}

TEST_CASE("empty graph gives an empty family") {
    BruteForceOracle oracle;
    Graph g;
    g.n = 0;
    CHECK(balanced_critical_dual(Minor::whole(g), WeightVector::zero(0), oracle).size() == 0);
}

TEST_CASE("unique-matching graph decomposes into trivial components") {
    // With w = 0, E[0] of the two-triangles-plus-bridge graph is its unique
    // perfect matching, so every restricted component is a K2 and the
    // per-component runs contribute nothing beyond singletons.
    BruteForceOracle oracle;
    Minor m = Minor::whole(two_triangles_bridge());
    LaminarFamily fam = balanced_critical_dual(m, WeightVector::zero(7), oracle);
    CHECK(fam.size() == 6);
    CHECK(fam.non_singletons().empty());
}

TEST_CASE("blocked-cycle graph yields both triangle tight sets") {
    BruteForceOracle oracle;
    Minor m = Minor::whole(blocked_cycle_graph());
    WeightVector w({0, 0, 0, 0, 0, 0, 1, 1, 1});
    LaminarFamily fam = balanced_critical_dual(m, w, oracle);
    CHECK(fam.contains({0, 1, 2}));
    CHECK(fam.contains({3, 4, 5}));
    CHECK(fam.non_singletons().size() == 2);
    CHECK(fam.is_laminar());
}

TEST_CASE("every non-singleton member is a tight odd set") {
    BruteForceOracle oracle;
    naive::Rng rng(31245);
    int nontrivial = 0;
    for (int round = 0; round < 300; ++round) {
        // 0/1 weights on dense-ish graphs produce plenty of tied optima and
        // blossom structure.
        auto inst = naive::random_graph(rng, 4 + 2 * rng.below(4), 55 + rng.below(40), 1);
        Minor m = Minor::whole(inst.graph);
        if (!oracle.mwpm_weight(m, inst.weights)) continue;
        LaminarFamily fam = balanced_critical_dual(m, inst.weights, oracle);
        REQUIRE(fam.is_laminar());
        for (NodeId v = 0; v < inst.graph.n; ++v) REQUIRE(fam.contains({v}));
        for (const auto& s : fam.non_singletons()) {
            ++nontrivial;
            CHECK(naive::is_tight_odd_set(inst.graph, inst.weights, s));
            CHECK(m.set_weight(s) % 2 == 1);
        }
    }
    INFO("non-singleton members seen: " << nontrivial);
    CHECK(nontrivial > 10);
}

TEST_CASE("family agrees across oracle implementations") {
    // Lemma 3.3's uniqueness, observed at the output level.
    naive::Rng rng(5544);
    for (int round = 0; round < 25; ++round) {
        auto inst = naive::random_graph(rng, 4 + 2 * rng.below(4), 50 + rng.below(40), 20);
        BruteForceOracle brute;
        OracleOptions topt;
        topt.seed = 1000 + round;
        TutteOracle tutte(topt);
        Minor m = Minor::whole(inst.graph);
        if (!brute.mwpm_weight(m, inst.weights)) continue;
        LaminarFamily f1 = balanced_critical_dual(m, inst.weights, brute);
        LaminarFamily f2 = balanced_critical_dual(m, inst.weights, tutte);
        CHECK(f1.sets() == f2.sets());
    }
}

TEST_CASE("family is schedule-independent") {
    auto inst_graph = blocked_cycle_graph();
    WeightVector w({0, 0, 0, 0, 0, 0, 1, 1, 1});
    BruteForceOracle o1, o2;
    Minor m = Minor::whole(inst_graph);
    LaminarFamily f1 = balanced_critical_dual(m, w, o1);
    LaminarFamily f2 = balanced_critical_dual(m, w, o2);
    CHECK(f1.sets() == f2.sets());
}
