#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ncmatch/laminar.hpp"
#include "ncmatch/oracle.hpp"

namespace ncmatch {

struct ParsedGraph {
    Graph graph;
    WeightVector weights;
};

/// DIMACS-like format: `p edge <n> <m>` then `e <u> <v> [<w>]` with 1-based
/// vertices; missing weights default to 0. Comment lines start with 'c'.
inline ParsedGraph parse_dimacs(std::istream& in) {
    ParsedGraph out;
    std::vector<Weight> w;
    bool have_header = false;
    std::int64_t declared_m = 0;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "c") continue;
        if (tag == "p") {
            if (have_header) throw ParseError("duplicate problem line", lineno, 1);
            std::string kind;
            std::int64_t n = -1, m = -1;
            if (!(ls >> kind >> n >> m) || kind != "edge")
                throw ParseError("expected 'p edge <n> <m>'", lineno, 1);
            if (n < 0 || m < 0) throw ParseError("negative sizes in problem line", lineno, 3);
            out.graph.n = static_cast<std::int32_t>(n);
            declared_m = m;
            have_header = true;
            continue;
        }
        if (tag == "e") {
            if (!have_header) throw ParseError("edge before problem line", lineno, 1);
            std::int64_t u = 0, v = 0;
            if (!(ls >> u >> v)) throw ParseError("expected 'e <u> <v> [<w>]'", lineno, 3);
            Weight wt = 0;
            ls >> wt;  // optional
            if (u < 1 || u > out.graph.n || v < 1 || v > out.graph.n)
                throw ParseError("vertex out of range", lineno, 3);
            if (u == v) throw ParseError("self-loops are not allowed", lineno, 3);
            out.graph.edges.push_back(
                {static_cast<NodeId>(u - 1), static_cast<NodeId>(v - 1)});
            w.push_back(wt);
            continue;
        }
        throw ParseError("unknown line tag '" + tag + "'", lineno, 1);
    }
    if (!have_header) throw ParseError("missing problem line", lineno == 0 ? 1 : lineno, 1);
    if (declared_m != out.graph.m())
        throw ParseError("problem line declares " + std::to_string(declared_m) + " edges, found " +
                             std::to_string(out.graph.m()),
                         lineno, 1);
    out.weights = WeightVector(std::move(w));
    return out;
}

inline void write_dimacs(std::ostream& os, const Graph& g, const WeightVector& w) {
    os << "p edge " << g.n << " " << g.m() << "\n";
    for (EdgeId e = 0; e < g.m(); ++e)
        os << "e " << g.edges[e].u + 1 << " " << g.edges[e].v + 1 << " " << w.at(e) << "\n";
}

/// Debug form of a minor: nodes with weights, edges with lineage.
inline nlohmann::json minor_to_json(const Minor& g) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (NodeId v : g.nodes())
        j["nodes"].push_back({{"id", v}, {"weight", g.node_weight(v)}});
    j["edges"] = nlohmann::json::array();
    for (const MinorEdge& e : g.edges()) {
        const Graph::Edge& re = g.root()->edges[e.id];
        j["edges"].push_back({{"u", e.u},
                              {"v", e.v},
                              {"lineage", {{"edge", e.id}, {"u", re.u}, {"v", re.v}}}});
    }
    return j;
}

inline nlohmann::json family_to_json(const LaminarFamily& family, const Minor& g) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : family.sets()) {
        nlohmann::json set_j;
        set_j["nodes"] = s;
        set_j["node_weight"] = g.set_weight(s);
        j.push_back(set_j);
    }
    return j;
}

inline void export_transcript_json(const OracleTranscript& t, std::ostream& os) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [text, encoded] : t.entries_text()) {
        nlohmann::json entry;
        entry["query"] = text;
        if (encoded == OracleTranscript::kNoPM)
            entry["answer"] = nullptr;
        else
            entry["answer"] = encoded;
        j.push_back(entry);
    }
    os << j.dump(1) << "\n";
}

inline std::size_t import_transcript_json(OracleTranscript& t, std::istream& is) {
    nlohmann::json j;
    is >> j;
    if (!j.is_array()) throw Error("transcript import: expected a JSON array");
    std::size_t n = 0;
    for (const auto& entry : j) {
        Weight enc = entry["answer"].is_null() ? OracleTranscript::kNoPM
                                               : entry["answer"].get<Weight>();
        t.preload(entry["query"].get<std::string>(), enc);
        ++n;
    }
    return n;
}

}  // namespace ncmatch
