#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "ncmatch/field.hpp"
#include "ncmatch/graph.hpp"
#include "ncmatch/parallel.hpp"
#include "ncmatch/weights.hpp"

namespace ncmatch {

/// Weight of a minimum-weight perfect matching; empty when none exists.
using OracleAnswer = std::optional<Weight>;

struct OracleOptions {
    std::uint64_t seed = 0x6e63'6d61'7463'68ull;
    int retrials = 3;                    // independent Tutte b-assignments
    std::uint64_t field_prime = 3221225473ull;  // 3 * 2^30 + 1, NTT-friendly
    std::size_t max_points = std::size_t{1} << 18;
    bool keep_query_text = false;        // retain canonical strings for export
};

namespace detail {

struct Key128 {
    std::uint64_t a = 0, b = 0;
    bool operator==(const Key128& o) const { return a == o.a && b == o.b; }
};

struct Key128Hash {
    std::size_t operator()(const Key128& k) const {
        return static_cast<std::size_t>(k.a ^ (k.b * 0x9e3779b97f4a7c15ull));
    }
};

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline Key128 hash_bytes(const std::string& s) {
    std::uint64_t h1 = 0x2545f4914f6cdd1dull, h2 = 0x27d4eb2f165667c5ull;
    std::size_t i = 0;
    for (; i + 8 <= s.size(); i += 8) {
        std::uint64_t w;
        std::memcpy(&w, s.data() + i, 8);
        h1 = mix64(h1 ^ w);
        h2 = mix64(h2 + w);
    }
    std::uint64_t tail = 0;
    for (std::size_t j = i; j < s.size(); ++j)
        tail = (tail << 8) | static_cast<unsigned char>(s[j]);
    h1 = mix64(h1 ^ tail ^ s.size());
    h2 = mix64(h2 + tail);
    return {h1, h2};
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

}  // namespace detail

/// Canonical serialization of a decision query: node ids sorted, edge
/// triples (u, v, w_e) sorted, so logically identical queries collide.
/// The optional deleted pair drops two nodes and their incident edges.
class OracleQuery {
public:
    OracleQuery(const Minor& g, const WeightVector& w,
                std::optional<std::pair<NodeId, NodeId>> deleted = std::nullopt) {
        std::string& buf = scratch();
        buf.clear();
        buf += "n:";
        for (NodeId v : g.nodes()) {
            if (deleted && (v == deleted->first || v == deleted->second)) continue;
            buf += std::to_string(v);
            buf += ',';
        }
        buf += "|e:";
        std::vector<std::tuple<NodeId, NodeId, Weight>> tr;
        tr.reserve(g.edges().size());
        for (const MinorEdge& e : g.edges()) {
            if (deleted && (e.u == deleted->first || e.u == deleted->second ||
                            e.v == deleted->first || e.v == deleted->second))
                continue;
            tr.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v), w.at(e.id));
        }
        std::sort(tr.begin(), tr.end());
        for (const auto& [u, v, we] : tr) {
            buf += std::to_string(u);
            buf += '-';
            buf += std::to_string(v);
            buf += ':';
            buf += std::to_string(we);
            buf += ';';
        }
        key_ = detail::hash_bytes(buf);
    }

    explicit OracleQuery(const std::string& text) { key_ = detail::hash_bytes(text); }

    const detail::Key128& key() const { return key_; }
    /// Text of the most recently built query on this thread.
    static const std::string& last_text() { return scratch(); }

private:
    static std::string& scratch() {
        thread_local std::string buf;
        return buf;
    }
    detail::Key128 key_;
};

struct TranscriptStats {
    std::uint64_t queries = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t divergences = 0;  // racing recomputations that disagreed
};

/// Append-only memo of answered queries: the determinism anchor. Repeated
/// queries always return the first recorded answer.
class OracleTranscript {
public:
    static constexpr Weight kNoPM = std::numeric_limits<Weight>::min();

    explicit OracleTranscript(bool keep_text) : keep_text_(keep_text) {}

    std::optional<Weight> lookup(const detail::Key128& k) {
        std::lock_guard<std::mutex> lock(mu_);
        ++stats_.queries;
        auto it = map_.find(k);
        if (it == map_.end()) return std::nullopt;
        ++stats_.cache_hits;
        return it->second;
    }

    /// First writer wins. Exact oracles must never disagree with the record;
    /// randomized ones may, and the divergence is counted.
    Weight commit(const detail::Key128& k, Weight encoded, bool exact, const std::string& text) {
        std::lock_guard<std::mutex> lock(mu_);
        auto [it, inserted] = map_.emplace(k, encoded);
        if (inserted && keep_text_) text_.emplace(k, text);
        if (!inserted && it->second != encoded) {
            if (exact) throw OracleError("exact oracle disagreed with recorded transcript entry");
            ++stats_.divergences;
        }
        return it->second;
    }

    TranscriptStats stats() const {
        std::lock_guard<std::mutex> lock(mu_);
        return stats_;
    }

    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return map_.size();
    }

    /// Recorded (canonical text, encoded answer) pairs, sorted by text.
    /// Requires keep_query_text; the io module serializes these as JSON.
    std::vector<std::pair<std::string, Weight>> entries_text() const {
        std::lock_guard<std::mutex> lock(mu_);
        if (!keep_text_ && !map_.empty())
            throw Error("transcript export needs keep_query_text");
        std::vector<std::pair<std::string, Weight>> out;
        out.reserve(text_.size());
        for (const auto& [k, t] : text_) out.emplace_back(t, map_.at(k));
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Seed an answer from its canonical text (replay import).
    void preload(const std::string& text, Weight encoded) {
        detail::Key128 k = detail::hash_bytes(text);
        std::lock_guard<std::mutex> lock(mu_);
        map_[k] = encoded;
        if (keep_text_) text_[k] = text;
    }

private:
    friend class DecisionOracle;
    mutable std::mutex mu_;
    bool keep_text_;
    std::unordered_map<detail::Key128, Weight, detail::Key128Hash> map_;
    std::unordered_map<detail::Key128, std::string, detail::Key128Hash> text_;
    TranscriptStats stats_;
};

struct BatchAnswers {
    OracleAnswer base;
    std::vector<OracleAnswer> per_pair;
};

/// Decision oracle O(G, w) in the MWPM-weight form, memoized through the
/// transcript. Subqueries that delete a vertex pair are issued in batches so
/// implementations can share work across one logical parallel round.
class DecisionOracle {
public:
    explicit DecisionOracle(OracleOptions opt)
        : opt_(opt), transcript_(std::make_shared<OracleTranscript>(opt.keep_query_text)) {}
    virtual ~DecisionOracle() = default;

    OracleAnswer mwpm_weight(const Minor& g, const WeightVector& w) {
        return query_with_deleted_pairs(g, w, {}).base;
    }

    /// One batched round: the base query plus O(G - u - v, w) for each pair.
    BatchAnswers query_with_deleted_pairs(const Minor& g, const WeightVector& w,
                                          const std::vector<std::pair<NodeId, NodeId>>& pairs) {
        BatchAnswers out;
        out.per_pair.resize(pairs.size());
        OracleQuery base_q(g, w);
        std::string base_text = opt_.keep_query_text ? OracleQuery::last_text() : std::string();
        std::optional<Weight> base_hit = transcript_->lookup(base_q.key());
        std::vector<detail::Key128> pair_keys(pairs.size());
        std::vector<std::string> pair_text(opt_.keep_query_text ? pairs.size() : 0);
        std::vector<std::size_t> missing;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            OracleQuery q(g, w, pairs[i]);
            pair_keys[i] = q.key();
            if (opt_.keep_query_text) pair_text[i] = OracleQuery::last_text();
            auto hit = transcript_->lookup(pair_keys[i]);
            if (hit)
                out.per_pair[i] = decode(*hit);
            else
                missing.push_back(i);
        }
        if (base_hit && missing.empty()) {
            out.base = decode(*base_hit);
            return out;
        }
        std::vector<std::pair<NodeId, NodeId>> todo;
        todo.reserve(missing.size());
        for (std::size_t i : missing) todo.push_back(pairs[i]);
        std::vector<OracleAnswer> computed(todo.size());
        OracleAnswer base_computed = compute_batch(g, w, base_q.key(), todo, computed);
        Weight base_final =
            transcript_->commit(base_q.key(), encode(base_computed), exact(), base_text);
        out.base = decode(base_final);
        for (std::size_t j = 0; j < missing.size(); ++j) {
            std::size_t i = missing[j];
            Weight committed =
                transcript_->commit(pair_keys[i], encode(computed[j]), exact(),
                                    opt_.keep_query_text ? pair_text[i] : std::string());
            out.per_pair[i] = decode(committed);
        }
        if (base_hit) out.base = decode(*base_hit);
        return out;
    }

    /// Notation-1.1 adapter: is there a perfect matching of weight at most W?
    bool decide_at_most(const Minor& g, const WeightVector& w, Weight threshold) {
        OracleAnswer a = mwpm_weight(g, w);
        return a.has_value() && *a <= threshold;
    }

    OracleTranscript& transcript() { return *transcript_; }
    const OracleTranscript& transcript() const { return *transcript_; }
    const OracleOptions& options() const { return opt_; }

protected:
    /// Exact implementations must always commit identical answers for a key.
    virtual bool exact() const = 0;

    /// Answer the base query and all `pairs` subqueries. `batch_key` is the
    /// canonical key of the base query (randomized implementations derive
    /// their per-batch randomness from it).
    virtual OracleAnswer compute_batch(const Minor& g, const WeightVector& w,
                                       const detail::Key128& batch_key,
                                       const std::vector<std::pair<NodeId, NodeId>>& pairs,
                                       std::vector<OracleAnswer>& pair_answers) = 0;

    static Weight encode(OracleAnswer a) { return a ? *a : OracleTranscript::kNoPM; }
    static OracleAnswer decode(Weight v) {
        return v == OracleTranscript::kNoPM ? OracleAnswer{} : OracleAnswer{v};
    }

    OracleOptions opt_;
    std::shared_ptr<OracleTranscript> transcript_;
};

// ---------------------------------------------------------------------------
// Brute-force implementation: exact subset DP, intended for <= 24 vertices.
// One DP table per batch answers the base query and every vertex-deleted
// subquery (f(S) is the MWPM weight of the induced subgraph on S).
// ---------------------------------------------------------------------------

class BruteForceOracle : public DecisionOracle {
public:
    static constexpr int kMaxVertices = 24;

    explicit BruteForceOracle(OracleOptions opt = {}) : DecisionOracle(opt) {}

protected:
    bool exact() const override { return true; }

    OracleAnswer compute_batch(const Minor& g, const WeightVector& w, const detail::Key128&,
                               const std::vector<std::pair<NodeId, NodeId>>& pairs,
                               std::vector<OracleAnswer>& pair_answers) override {
        const int k = g.node_count();
        if (k > kMaxVertices)
            throw OracleError("BruteForceOracle supports at most " +
                              std::to_string(kMaxVertices) + " vertices, got " +
                              std::to_string(k));
        if (k == 0) {
            for (auto& a : pair_answers) a = OracleAnswer{};
            return OracleAnswer{0};
        }
        std::vector<NodeId> order = g.nodes();
        std::vector<std::int32_t> idx(order.back() + 1, -1);
        for (int i = 0; i < k; ++i) idx[order[i]] = i;

        constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
        std::vector<std::vector<std::pair<int, std::int64_t>>> nbr(k);
        {
            std::vector<std::int64_t> wmat(static_cast<std::size_t>(k) * k, kInf);
            for (const MinorEdge& e : g.edges()) {
                int a = idx[e.u], b = idx[e.v];
                std::int64_t& slot = wmat[static_cast<std::size_t>(a) * k + b];
                slot = std::min(slot, w.at(e.id));
                wmat[static_cast<std::size_t>(b) * k + a] = slot;
            }
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b)
                    if (wmat[static_cast<std::size_t>(a) * k + b] < kInf)
                        nbr[a].emplace_back(b, wmat[static_cast<std::size_t>(a) * k + b]);
        }

        std::vector<std::int64_t>& f = dp_buffer();
        const std::uint32_t full = (k == 32) ? ~0u : ((1u << k) - 1);
        f.assign(std::size_t{1} << k, kInf);
        f[0] = 0;
        for (std::uint32_t S = 1; S <= full; ++S) {
            int v = __builtin_ctz(S);
            std::int64_t best = kInf;
            const std::uint32_t rest = S ^ (1u << v);
            for (const auto& [u, wu] : nbr[v]) {
                if (rest & (1u << u)) {
                    std::int64_t c = f[rest ^ (1u << u)];
                    if (c < kInf && c + wu < best) best = c + wu;
                }
            }
            f[S] = best;
        }

        auto decode_mask = [&](std::uint32_t S) -> OracleAnswer {
            return f[S] >= kInf ? OracleAnswer{} : OracleAnswer{f[S]};
        };
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            int a = idx[pairs[i].first], b = idx[pairs[i].second];
            pair_answers[i] = decode_mask(full ^ (1u << a) ^ (1u << b));
        }
        return decode_mask(full);
    }

private:
    static std::vector<std::int64_t>& dp_buffer() {
        thread_local std::vector<std::int64_t> buf;
        return buf;
    }
};

// ---------------------------------------------------------------------------
// Randomized implementation after MVV87: skew-symmetric Tutte matrix with
// entries +-b_e x^{w_e} (random b_e, parallel edges summed). The lowest
// x-degree of det equals twice the MWPM weight with high probability; an
// identically zero determinant over all retrials signals no perfect
// matching (one-sided error). The determinant polynomial is recovered by
// evaluating at roots of unity and interpolating with an inverse NTT, and
// Jacobi's identity det(T[-uv,-uv]) = det(T) * (T^{-1}[u][v])^2 yields every
// pair-deleted subquery from the same point inversions.
// ---------------------------------------------------------------------------

class TutteOracle : public DecisionOracle {
public:
    explicit TutteOracle(OracleOptions opt = {}) : DecisionOracle(opt), field_(opt.field_prime) {}

protected:
    bool exact() const override { return false; }

    OracleAnswer compute_batch(const Minor& g, const WeightVector& w,
                               const detail::Key128& batch_key,
                               const std::vector<std::pair<NodeId, NodeId>>& pairs,
                               std::vector<OracleAnswer>& pair_answers) override {
        const int k = g.node_count();
        if (k == 0) {
            for (auto& a : pair_answers) a = OracleAnswer{};
            return OracleAnswer{0};
        }
        if (k % 2 == 1) {
            // Odd order: neither the base nor any pair-deleted graph can have
            // a perfect matching.
            for (auto& a : pair_answers) a = OracleAnswer{};
            return OracleAnswer{};
        }
        std::vector<NodeId> order = g.nodes();
        std::vector<std::int32_t> idx(order.back() + 1, -1);
        for (int i = 0; i < k; ++i) idx[order[i]] = i;

        // Shift weights to be nonnegative; a matching on 2t vertices picks up
        // an extra t * shift, undone per query below.
        Weight shift = 0;
        for (const MinorEdge& e : g.edges()) shift = std::min(shift, w.at(e.id));
        shift = -shift;
        std::vector<Weight> we;
        we.reserve(g.edges().size());
        Weight dmax = 0;
        {
            std::vector<Weight> sorted;
            for (const MinorEdge& e : g.edges()) {
                we.push_back(w.at(e.id) + shift);
                sorted.push_back(we.back());
            }
            std::sort(sorted.rbegin(), sorted.rend());
            for (int i = 0; i < k / 2 && i < static_cast<int>(sorted.size()); ++i)
                dmax += sorted[i];
            dmax *= 2;  // det degree bound
        }
        if (field_.prime() <= 4 * static_cast<std::uint64_t>(dmax))
            throw OracleError("field prime must exceed 4x the determinant degree bound");

        std::size_t points = 1;
        while (points < static_cast<std::size_t>(dmax) + 1) points <<= 1;
        if (points > opt_.max_points)
            throw OracleError("Tutte query needs " + std::to_string(points) +
                              " evaluation points, above the configured limit");
        const bool ntt_friendly = (field_.prime() - 1) % points == 0;
        if (!ntt_friendly && dmax > 2048)
            throw OracleError("non-NTT-friendly field prime: supported only up to degree 2048");

        std::vector<OracleAnswer> best_pairs(pairs.size());
        OracleAnswer best_base;
        for (int trial = 0; trial < std::max(1, opt_.retrials); ++trial) {
            OracleAnswer base;
            std::vector<OracleAnswer> per_pair(pairs.size());
            run_trial(g, we, idx, k, batch_key, trial, pairs, points, ntt_friendly,
                      static_cast<std::size_t>(dmax) + 1, base, per_pair);
            auto merge = [&](OracleAnswer& into, const OracleAnswer& add) {
                if (add && (!into || *add < *into)) into = add;
            };
            merge(best_base, base);
            for (std::size_t i = 0; i < pairs.size(); ++i) merge(best_pairs[i], per_pair[i]);
        }
        auto unshift = [&](OracleAnswer a, int vertices) -> OracleAnswer {
            if (!a) return a;
            return OracleAnswer{*a - shift * (vertices / 2)};
        };
        for (std::size_t i = 0; i < pairs.size(); ++i)
            pair_answers[i] = unshift(best_pairs[i], k - 2);
        return unshift(best_base, k);
    }

private:
    void run_trial(const Minor& g, const std::vector<Weight>& we,
                   const std::vector<std::int32_t>& idx, int k, const detail::Key128& batch_key,
                   int trial, const std::vector<std::pair<NodeId, NodeId>>& pairs,
                   std::size_t points, bool ntt_friendly, std::size_t needed, OracleAnswer& base,
                   std::vector<OracleAnswer>& per_pair) {
        const Fp& F = field_;
        detail::SplitMix64 rng(detail::mix64(batch_key.a ^ (batch_key.b << 1) ^ opt_.seed ^
                                             (0xa24baed4963ee407ull * (trial + 1))));
        const std::size_t m = g.edges().size();
        std::vector<std::uint32_t> b(m);
        for (std::size_t e = 0; e < m; ++e)
            b[e] = F.to_mont(1 + rng.next() % (F.prime() - 1));

        // Evaluation points: roots of unity when the field allows an NTT of
        // this size, otherwise powers of a generator with dense interpolation.
        std::size_t npts = ntt_friendly ? points : needed;
        std::uint32_t step_base =
            ntt_friendly ? F.root_of_unity(points) : F.primitive_root();
        std::vector<std::uint32_t> estep(m), eval(m);
        std::vector<std::uint32_t> xs(ntt_friendly ? 0 : npts);
        for (std::size_t e = 0; e < m; ++e) {
            estep[e] = F.pow(step_base, static_cast<std::uint64_t>(we[e]));
            eval[e] = b[e];  // b_e * x^{w_e} at x = 1
        }
        std::uint32_t x_cur = F.one();

        std::vector<std::uint32_t> det_vals(npts);
        std::vector<std::vector<std::uint32_t>> pair_vals(pairs.size(),
                                                          std::vector<std::uint32_t>(npts));
        std::vector<std::uint32_t> T(static_cast<std::size_t>(k) * k);
        std::vector<std::uint32_t> inv(static_cast<std::size_t>(k) * k);
        std::vector<std::uint32_t> scratch;
        std::vector<std::pair<int, int>> rel;
        rel.reserve(pairs.size());
        for (const auto& [u, v] : pairs) rel.emplace_back(idx[u], idx[v]);
        std::vector<std::pair<int, int>> eidx;
        eidx.reserve(m);
        for (const MinorEdge& e : g.edges()) eidx.emplace_back(idx[e.u], idx[e.v]);

        for (std::size_t j = 0; j < npts; ++j) {
            std::fill(T.begin(), T.end(), 0u);
            for (std::size_t e = 0; e < m; ++e) {
                auto [a, bb] = eidx[e];
                T[static_cast<std::size_t>(a) * k + bb] =
                    F.add(T[static_cast<std::size_t>(a) * k + bb], eval[e]);
                T[static_cast<std::size_t>(bb) * k + a] =
                    F.sub(T[static_cast<std::size_t>(bb) * k + a], eval[e]);
            }
            std::uint32_t det = invert_with_det(T, scratch, inv, k);
            det_vals[j] = det;
            if (det != 0) {
                for (std::size_t pi = 0; pi < rel.size(); ++pi) {
                    std::uint32_t iv = inv[static_cast<std::size_t>(rel[pi].first) * k +
                                           rel[pi].second];
                    pair_vals[pi][j] = F.mul(det, F.mul(iv, iv));
                }
            } else {
                // Singular point: evaluate the pair minors directly; T is
                // still intact.
                for (std::size_t pi = 0; pi < rel.size(); ++pi)
                    pair_vals[pi][j] = det_without(T, k, rel[pi].first, rel[pi].second);
            }
            if (!ntt_friendly) xs[j] = x_cur;
            x_cur = F.mul(x_cur, step_base);
            for (std::size_t e = 0; e < m; ++e) eval[e] = F.mul(eval[e], estep[e]);
        }

        auto lowest_degree = [&](std::vector<std::uint32_t>& vals) -> std::optional<std::size_t> {
            bool all_zero = true;
            for (std::uint32_t v : vals)
                if (v != 0) {
                    all_zero = false;
                    break;
                }
            if (all_zero) return std::nullopt;
            std::vector<std::uint32_t> coeff;
            if (ntt_friendly) {
                ntt(F, vals, /*inverse=*/true);
                coeff = std::move(vals);
            } else {
                coeff = interpolate_dense(xs, vals);
            }
            for (std::size_t d = 0; d < coeff.size(); ++d)
                if (coeff[d] != 0) return d;
            return std::nullopt;
        };

        auto to_answer = [&](std::optional<std::size_t> nu) -> OracleAnswer {
            if (!nu) return OracleAnswer{};
            if (*nu % 2 != 0)
                throw OracleError("Tutte determinant valuation came out odd");
            return OracleAnswer{static_cast<Weight>(*nu / 2)};
        };
        base = to_answer(lowest_degree(det_vals));
        for (std::size_t pi = 0; pi < pairs.size(); ++pi)
            per_pair[pi] = to_answer(lowest_degree(pair_vals[pi]));
    }

    /// Gauss-Jordan inverse over F_p; returns det (0 when singular, in which
    /// case `inv` is unspecified). `work` is reused scratch.
    std::uint32_t invert_with_det(const std::vector<std::uint32_t>& t,
                                  std::vector<std::uint32_t>& work,
                                  std::vector<std::uint32_t>& inv, int k) const {
        const Fp& F = field_;
        work.assign(t.begin(), t.end());
        std::vector<std::uint32_t>& a = work;
        inv.assign(static_cast<std::size_t>(k) * k, 0u);
        for (int i = 0; i < k; ++i) inv[static_cast<std::size_t>(i) * k + i] = F.one();
        std::uint32_t det = F.one();
        for (int col = 0; col < k; ++col) {
            int pivot = -1;
            for (int r = col; r < k; ++r)
                if (a[static_cast<std::size_t>(r) * k + col] != 0) {
                    pivot = r;
                    break;
                }
            if (pivot < 0) return 0;
            if (pivot != col) {
                for (int c = 0; c < k; ++c) {
                    std::swap(a[static_cast<std::size_t>(pivot) * k + c],
                              a[static_cast<std::size_t>(col) * k + c]);
                    std::swap(inv[static_cast<std::size_t>(pivot) * k + c],
                              inv[static_cast<std::size_t>(col) * k + c]);
                }
                det = F.neg(det);
            }
            std::uint32_t pv = a[static_cast<std::size_t>(col) * k + col];
            det = F.mul(det, pv);
            std::uint32_t pinv = F.inv(pv);
            for (int c = 0; c < k; ++c) {
                a[static_cast<std::size_t>(col) * k + c] =
                    F.mul(a[static_cast<std::size_t>(col) * k + c], pinv);
                inv[static_cast<std::size_t>(col) * k + c] =
                    F.mul(inv[static_cast<std::size_t>(col) * k + c], pinv);
            }
            for (int r = 0; r < k; ++r) {
                if (r == col) continue;
                std::uint32_t factor = a[static_cast<std::size_t>(r) * k + col];
                if (factor == 0) continue;
                for (int c = 0; c < k; ++c) {
                    a[static_cast<std::size_t>(r) * k + c] =
                        F.sub(a[static_cast<std::size_t>(r) * k + c],
                              F.mul(factor, a[static_cast<std::size_t>(col) * k + c]));
                    inv[static_cast<std::size_t>(r) * k + c] =
                        F.sub(inv[static_cast<std::size_t>(r) * k + c],
                              F.mul(factor, inv[static_cast<std::size_t>(col) * k + c]));
                }
            }
        }
        return det;
    }

    /// det of T with rows/columns u, v struck out (plain elimination).
    std::uint32_t det_without(const std::vector<std::uint32_t>& T, int k, int u, int v) const {
        const Fp& F = field_;
        std::vector<int> keep;
        keep.reserve(k - 2);
        for (int i = 0; i < k; ++i)
            if (i != u && i != v) keep.push_back(i);
        const int n = static_cast<int>(keep.size());
        if (n == 0) return F.one();
        std::vector<std::uint32_t> a(static_cast<std::size_t>(n) * n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                a[static_cast<std::size_t>(r) * n + c] =
                    T[static_cast<std::size_t>(keep[r]) * k + keep[c]];
        std::uint32_t det = F.one();
        for (int col = 0; col < n; ++col) {
            int pivot = -1;
            for (int r = col; r < n; ++r)
                if (a[static_cast<std::size_t>(r) * n + col] != 0) {
                    pivot = r;
                    break;
                }
            if (pivot < 0) return 0;
            if (pivot != col) {
                for (int c = col; c < n; ++c)
                    std::swap(a[static_cast<std::size_t>(pivot) * n + c],
                              a[static_cast<std::size_t>(col) * n + c]);
                det = F.neg(det);
            }
            std::uint32_t pv = a[static_cast<std::size_t>(col) * n + col];
            det = F.mul(det, pv);
            std::uint32_t pinv = F.inv(pv);
            for (int r = col + 1; r < n; ++r) {
                std::uint32_t factor =
                    F.mul(a[static_cast<std::size_t>(r) * n + col], pinv);
                if (factor == 0) continue;
                for (int c = col; c < n; ++c)
                    a[static_cast<std::size_t>(r) * n + c] =
                        F.sub(a[static_cast<std::size_t>(r) * n + c],
                              F.mul(factor, a[static_cast<std::size_t>(col) * n + c]));
            }
        }
        return det;
    }

    /// Newton-form interpolation for non-NTT primes (degree <= 2048 guard).
    std::vector<std::uint32_t> interpolate_dense(const std::vector<std::uint32_t>& xs,
                                                 const std::vector<std::uint32_t>& ys) const {
        const Fp& F = field_;
        const std::size_t n = xs.size();
        std::vector<std::uint32_t> coeff(n, 0);
        std::vector<std::uint32_t> dd = ys;  // divided differences, in place
        std::vector<std::uint32_t> top(n);
        top[0] = dd[0];
        for (std::size_t level = 1; level < n; ++level) {
            for (std::size_t i = 0; i + level < n; ++i) {
                std::uint32_t num = F.sub(dd[i + 1], dd[i]);
                std::uint32_t den = F.sub(xs[i + level], xs[i]);
                dd[i] = F.mul(num, F.inv(den));
            }
            top[level] = dd[0];
        }
        // Expand the Newton form into monomial coefficients.
        std::vector<std::uint32_t> basis(n, 0);
        basis[0] = F.one();
        std::size_t basis_len = 1;
        for (std::size_t level = 0; level < n; ++level) {
            for (std::size_t c = 0; c < basis_len; ++c)
                coeff[c] = F.add(coeff[c], F.mul(top[level], basis[c]));
            if (level + 1 < n) {
                // basis *= (x - xs[level])
                for (std::size_t c = basis_len; c-- > 0;) {
                    std::uint32_t keep = basis[c];
                    basis[c] = F.mul(basis[c], F.neg(xs[level]));
                    if (c + 1 < n) basis[c + 1] = F.add(basis[c + 1], keep);
                }
                ++basis_len;
            }
        }
        return coeff;
    }

    Fp field_;
};

// ---------------------------------------------------------------------------
// Replay and cross-checking wrappers.
// ---------------------------------------------------------------------------

/// Serves answers from an imported transcript only; a miss is an error.
class ReplayOracle : public DecisionOracle {
public:
    explicit ReplayOracle(OracleOptions opt = {}) : DecisionOracle(opt) {}

protected:
    bool exact() const override { return true; }
    OracleAnswer compute_batch(const Minor&, const WeightVector&, const detail::Key128&,
                               const std::vector<std::pair<NodeId, NodeId>>&,
                               std::vector<OracleAnswer>&) override {
        throw OracleError("replay transcript has no answer for a query issued by this run");
    }
};

struct OracleDisagreement {
    std::uint64_t compared = 0;
    std::uint64_t mismatches = 0;
};

/// Runs a primary oracle while checking every freshly computed answer against
/// a reference oracle. Primary answers win; mismatches are counted.
class CheckedOracle : public DecisionOracle {
public:
    CheckedOracle(std::shared_ptr<DecisionOracle> primary,
                  std::shared_ptr<DecisionOracle> reference, OracleOptions opt = {})
        : DecisionOracle(opt), primary_(std::move(primary)), reference_(std::move(reference)) {}

    const OracleDisagreement& disagreement() const { return report_; }

protected:
    bool exact() const override { return true; }  // answers are pinned by the primary's memo

    OracleAnswer compute_batch(const Minor& g, const WeightVector& w, const detail::Key128&,
                               const std::vector<std::pair<NodeId, NodeId>>& pairs,
                               std::vector<OracleAnswer>& pair_answers) override {
        BatchAnswers p = primary_->query_with_deleted_pairs(g, w, pairs);
        BatchAnswers r = reference_->query_with_deleted_pairs(g, w, pairs);
        std::lock_guard<std::mutex> lock(mu_);
        ++report_.compared;
        if (p.base != r.base) ++report_.mismatches;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            ++report_.compared;
            if (p.per_pair[i] != r.per_pair[i]) ++report_.mismatches;
        }
        pair_answers = p.per_pair;
        return p.base;
    }

private:
    std::shared_ptr<DecisionOracle> primary_;
    std::shared_ptr<DecisionOracle> reference_;
    std::mutex mu_;
    OracleDisagreement report_;
};

// ---------------------------------------------------------------------------
// NC primitives built on the oracle.
// ---------------------------------------------------------------------------

/// E[w]: edges participating in some MWPM (Lemma 4.1). All per-edge
/// subqueries form one batch. Throws NoPerfectMatchingInputError when the
/// minor has no perfect matching at all.
inline std::vector<EdgeId> allowed_edges(const Minor& g, const WeightVector& w,
                                         DecisionOracle& oracle, RoundCost* rc = nullptr) {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    std::map<std::pair<NodeId, NodeId>, std::size_t> pair_index;
    std::vector<std::size_t> edge_pair(g.edges().size());
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        const MinorEdge& e = g.edges()[i];
        auto key = std::minmax(e.u, e.v);
        auto [it, inserted] = pair_index.emplace(std::pair<NodeId, NodeId>(key.first, key.second),
                                                 pairs.size());
        if (inserted) pairs.emplace_back(key.first, key.second);
        edge_pair[i] = it->second;
    }
    BatchAnswers ans = oracle.query_with_deleted_pairs(g, w, pairs);
    if (rc) rc->step();
    if (!ans.base)
        throw NoPerfectMatchingInputError("allowed_edges: graph has no perfect matching");
    std::vector<EdgeId> out;
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        const MinorEdge& e = g.edges()[i];
        const OracleAnswer& rest = ans.per_pair[edge_pair[i]];
        if (rest && *ans.base == w.at(e.id) + *rest) out.push_back(e.id);
    }
    return out;
}

/// mu(v) over a minor already restricted to allowed edges: the cheapest way
/// to perfectly match everything except v and some partner u (Lemma 4.2,
/// restricted to E[w] as in Alg. 1). `restricted` must be the E[w]-subgraph.
inline std::vector<OracleAnswer> mu_all(const Minor& restricted, const WeightVector& w,
                                        const std::vector<NodeId>& component,
                                        DecisionOracle& oracle, RoundCost* rc = nullptr) {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (std::size_t i = 0; i < component.size(); ++i)
        for (std::size_t j = i + 1; j < component.size(); ++j)
            pairs.emplace_back(component[i], component[j]);
    BatchAnswers ans = oracle.query_with_deleted_pairs(restricted, w, pairs);
    if (rc) rc->step();
    std::vector<OracleAnswer> mu(component.size());
    std::size_t p = 0;
    for (std::size_t i = 0; i < component.size(); ++i) {
        for (std::size_t j = i + 1; j < component.size(); ++j, ++p) {
            const OracleAnswer& a = ans.per_pair[p];
            if (a) {
                if (!mu[i] || *a < *mu[i]) mu[i] = a;
                if (!mu[j] || *a < *mu[j]) mu[j] = a;
            }
        }
    }
    return mu;
}

/// Single-node mu as specified: restricts to E[w] internally.
inline Weight mu(const Minor& g, const WeightVector& w, NodeId v, DecisionOracle& oracle) {
    std::vector<EdgeId> allowed = allowed_edges(g, w, oracle);
    std::vector<char> keep(static_cast<std::size_t>(g.root()->m()), 0);
    for (EdgeId e : allowed) keep[e] = 1;
    Minor restricted = g.filter_edges([&](EdgeId e) { return keep[e] != 0; });
    std::vector<NodeId> comp;
    for (const auto& c : connected_components(restricted))
        if (std::find(c.begin(), c.end(), v) != c.end()) comp = c;
    if (comp.empty()) throw NoWitnessError("mu: node has no allowed edges");
    auto mus = mu_all(restricted, w, comp, oracle);
    for (std::size_t i = 0; i < comp.size(); ++i)
        if (comp[i] == v) {
            if (!mus[i]) throw NoWitnessError("mu: no partner vertex admits a perfect matching");
            return *mus[i];
        }
    throw NoWitnessError("mu: node not in its own component");
}

inline std::shared_ptr<DecisionOracle> make_oracle(const std::string& kind, OracleOptions opt) {
    if (kind == "brute") return std::make_shared<BruteForceOracle>(opt);
    if (kind == "tutte") return std::make_shared<TutteOracle>(opt);
    throw Error("unknown oracle kind: " + kind);
}

}  // namespace ncmatch
