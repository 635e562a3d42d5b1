#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ncmatch/io.hpp"
#include "ncmatch/oracle.hpp"
#include "support/naive.hpp"

using namespace ncmatch;

namespace {

Graph k2() {
    Graph g;
    g.n = 2;
    g.edges = {{0, 1}};
    return g;
}

Graph triangle() {
    Graph g;
    g.n = 3;
    g.edges = {{0, 1}, {1, 2}, {2, 0}};
    return g;
}

Graph cycle4() {
    Graph g;
    g.n = 4;
    g.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    return g;
}

}  // namespace

TEST_CASE("brute-force oracle on the textbook cases") {
    BruteForceOracle oracle;
    CHECK_FALSE(oracle.mwpm_weight(Minor::whole(triangle()), WeightVector::zero(3)).has_value());
    CHECK(oracle.mwpm_weight(Minor::whole(k2()), WeightVector({7})) == OracleAnswer{7});

    Graph c4 = cycle4();
    WeightVector w({1, 2, 3, 4});
    auto expect = naive::mwpm_weight(c4, w);
    auto got = oracle.mwpm_weight(Minor::whole(c4), w);
    REQUIRE(expect.has_value());
    CHECK(got == OracleAnswer{*expect});
    CHECK(*got == 4);
}

TEST_CASE("allowed edges match brute-force enumeration") {
    BruteForceOracle oracle;
    Graph c4 = cycle4();
    CHECK(allowed_edges(Minor::whole(c4), WeightVector::zero(4), oracle) ==
          std::vector<EdgeId>{0, 1, 2, 3});
    WeightVector w({1, 2, 3, 4});
    CHECK(allowed_edges(Minor::whole(c4), w, oracle) == naive::allowed_edges(c4, w));
    CHECK(allowed_edges(Minor::whole(c4), w, oracle) == std::vector<EdgeId>{0, 2});
    CHECK(allowed_edges(Minor::whole(k2()), WeightVector::zero(1), oracle) ==
          std::vector<EdgeId>{0});
    CHECK_THROWS_AS(allowed_edges(Minor::whole(triangle()), WeightVector::zero(3), oracle),
                    NoPerfectMatchingInputError);
}

TEST_CASE("allowed edges agree with naive enumeration on random instances") {
    BruteForceOracle oracle;
    naive::Rng rng(5150);
    int matchable_seen = 0;
    for (int round = 0; round < 150; ++round) {
        auto inst = naive::random_graph(rng, 4 + rng.below(7), 30 + rng.below(50), 9);
        Minor m = Minor::whole(inst.graph);
        if (!oracle.mwpm_weight(m, inst.weights)) continue;
        ++matchable_seen;
        CHECK(allowed_edges(m, inst.weights, oracle) ==
              naive::allowed_edges(inst.graph, inst.weights));
    }
    CHECK(matchable_seen > 20);
}

TEST_CASE("mu on the small named cases") {
    BruteForceOracle oracle;
    CHECK(mu(Minor::whole(k2()), WeightVector::zero(1), 0, oracle) == 0);
    CHECK(mu(Minor::whole(k2()), WeightVector::zero(1), 1, oracle) == 0);
    Graph c4 = cycle4();
    for (NodeId v = 0; v < 4; ++v)
        CHECK(mu(Minor::whole(c4), WeightVector::zero(4), v, oracle) == 0);
    Graph p4;
    p4.n = 4;
    p4.edges = {{0, 1}, {1, 2}, {2, 3}};
    CHECK(mu(Minor::whole(p4), WeightVector::zero(3), 1, oracle) == 0);
}

TEST_CASE("restricted mu dominates the unrestricted form") {
    // mu over E[w] (the form the dual computation uses) versus mu over the
    // full edge set: the unrestricted minimum ranges over strictly more
    // matchings, so restricted >= full always, and the two genuinely differ
    // on some instances.
    BruteForceOracle oracle;
    naive::Rng rng(999);
    int compared = 0;
    int strict = 0;
    for (int round = 0; round < 120; ++round) {
        auto inst = naive::random_graph(rng, 4 + rng.below(5) * 2, 45 + rng.below(40), 6);
        Minor m = Minor::whole(inst.graph);
        if (!oracle.mwpm_weight(m, inst.weights)) continue;
        auto allowed = naive::allowed_edges(inst.graph, inst.weights);
        std::vector<char> keep(inst.graph.m(), 0);
        for (EdgeId e : allowed) keep[e] = 1;
        Minor restricted = m.filter_edges([&](EdgeId e) { return keep[e] != 0; });
        for (const auto& comp : connected_components(restricted)) {
            if (comp.size() < 2) continue;
            for (NodeId v : comp) {
                Weight restricted_mu = mu(m, inst.weights, v, oracle);
                // unrestricted: min over u of MWPM(G - u - v) on the full graph
                std::optional<Weight> full;
                for (NodeId u = 0; u < inst.graph.n; ++u) {
                    if (u == v) continue;
                    Graph sub;
                    sub.n = inst.graph.n;
                    std::vector<Weight> sw;
                    for (EdgeId e = 0; e < inst.graph.m(); ++e) {
                        auto [a, b] = inst.graph.edges[e];
                        if (a == u || b == u || a == v || b == v) continue;
                        sub.edges.push_back({a, b});
                        sw.push_back(inst.weights.at(e));
                    }
                    // delete u, v by leaving them isolated and matching the rest
                    std::vector<std::vector<EdgeId>> pms;
                    std::vector<char> covered(sub.n, 0);
                    covered[u] = covered[v] = 1;
                    std::vector<EdgeId> acc;
                    naive::enumerate_rec(sub, pms, covered, acc, 0);
                    for (const auto& pm : pms) {
                        Weight x = 0;
                        for (EdgeId e : pm) x += sw[e];
                        if (!full || x < *full) full = x;
                    }
                }
                ++compared;
                REQUIRE(full.has_value());
                CHECK(restricted_mu >= *full);
                if (restricted_mu > *full) ++strict;
            }
        }
    }
    CHECK(compared > 50);
    CHECK(strict > 0);  // the two definitions are genuinely different
}

TEST_CASE("transcript memoizes and counts") {
    BruteForceOracle oracle;
    Minor m = Minor::whole(cycle4());
    WeightVector w({1, 2, 3, 4});
    oracle.mwpm_weight(m, w);
    auto s1 = oracle.transcript().stats();
    oracle.mwpm_weight(m, w);
    auto s2 = oracle.transcript().stats();
    CHECK(s2.queries == s1.queries + 1);
    CHECK(s2.cache_hits == s1.cache_hits + 1);
}

TEST_CASE("batched pair deletions equal individual vertex-deleted queries") {
    BruteForceOracle oracle;
    naive::Rng rng(4242);
    for (int round = 0; round < 40; ++round) {
        auto inst = naive::random_graph(rng, 5 + rng.below(6), 50, 8);
        Minor m = Minor::whole(inst.graph);
        std::vector<std::pair<NodeId, NodeId>> pairs;
        for (NodeId u = 0; u < inst.graph.n; ++u)
            for (NodeId v = u + 1; v < inst.graph.n; ++v) pairs.emplace_back(u, v);
        BruteForceOracle fresh;
        BatchAnswers batch = oracle.query_with_deleted_pairs(m, inst.weights, pairs);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            std::vector<NodeId> rest;
            for (NodeId x : m.nodes())
                if (x != pairs[i].first && x != pairs[i].second) rest.push_back(x);
            CHECK(batch.per_pair[i] == fresh.mwpm_weight(m.induced(rest), inst.weights));
        }
    }
}

TEST_CASE("tutte oracle agrees with brute force on random queries") {
    OracleOptions opt;
    opt.seed = 31337;
    TutteOracle tutte(opt);
    BruteForceOracle brute;
    naive::Rng rng(2718);
    int checked = 0;
    for (int round = 0; round < 60; ++round) {
        auto inst = naive::random_graph(rng, 4 + rng.below(9), 30 + rng.below(55), 50);
        Minor m = Minor::whole(inst.graph);
        CHECK(tutte.mwpm_weight(m, inst.weights) == brute.mwpm_weight(m, inst.weights));
        ++checked;
    }
    CHECK(checked == 60);
}

TEST_CASE("tutte handles negative weights") {
    OracleOptions opt;
    TutteOracle tutte(opt);
    BruteForceOracle brute;
    Graph c4 = cycle4();
    WeightVector w({-5, 2, -3, 4});
    CHECK(tutte.mwpm_weight(Minor::whole(c4), w) == brute.mwpm_weight(Minor::whole(c4), w));
    CHECK(*brute.mwpm_weight(Minor::whole(c4), w) == -8);
}

TEST_CASE("tutte works with a non-NTT-friendly prime at small degree") {
    OracleOptions opt;
    opt.field_prime = 2147483647ull;  // Mersenne prime, 2-adic order 1
    TutteOracle tutte(opt);
    BruteForceOracle brute;
    naive::Rng rng(11);
    for (int round = 0; round < 15; ++round) {
        auto inst = naive::random_graph(rng, 4 + rng.below(5), 60, 10);
        Minor m = Minor::whole(inst.graph);
        CHECK(tutte.mwpm_weight(m, inst.weights) == brute.mwpm_weight(m, inst.weights));
    }
}

TEST_CASE("threshold adapter answers Notation-1.1 queries") {
    BruteForceOracle oracle;
    Minor m = Minor::whole(cycle4());
    WeightVector w({1, 2, 3, 4});
    CHECK_FALSE(oracle.decide_at_most(m, w, 3));
    CHECK(oracle.decide_at_most(m, w, 4));
    CHECK_FALSE(oracle.decide_at_most(Minor::whole(triangle()), WeightVector::zero(3), 100));
}

TEST_CASE("transcript export, import and replay") {
    OracleOptions opt;
    opt.keep_query_text = true;
    opt.seed = 7;
    TutteOracle tutte(opt);
    Minor m = Minor::whole(cycle4());
    WeightVector w({1, 2, 3, 4});
    auto a1 = tutte.mwpm_weight(m, w);
    allowed_edges(m, w, tutte);
    std::ostringstream exported;
    export_transcript_json(tutte.transcript(), exported);

    ReplayOracle replay;
    std::istringstream in(exported.str());
    std::size_t n = import_transcript_json(replay.transcript(), in);
    CHECK(n == tutte.transcript().size());
    CHECK(replay.mwpm_weight(m, w) == a1);
    CHECK(allowed_edges(m, w, replay) == allowed_edges(m, w, tutte));
    // a query outside the transcript must fail loudly
    Graph k4;
    k4.n = 4;
    k4.edges = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    CHECK_THROWS_AS(replay.mwpm_weight(Minor::whole(k4), WeightVector::zero(6)), OracleError);
}

TEST_CASE("checked oracle reports disagreements") {
    auto brute = std::make_shared<BruteForceOracle>();
    auto tutte = std::make_shared<TutteOracle>();
    CheckedOracle checked(tutte, brute);
    Minor m = Minor::whole(cycle4());
    checked.mwpm_weight(m, WeightVector({1, 2, 3, 4}));
    CHECK(checked.disagreement().compared >= 1);
    CHECK(checked.disagreement().mismatches == 0);
}

TEST_CASE("empty and odd graphs") {
    BruteForceOracle oracle;
    Graph empty;
    empty.n = 0;
    CHECK(oracle.mwpm_weight(Minor::whole(empty), WeightVector::zero(0)) == OracleAnswer{0});
    Graph one;
    one.n = 1;
    CHECK_FALSE(oracle.mwpm_weight(Minor::whole(one), WeightVector::zero(0)).has_value());
}
