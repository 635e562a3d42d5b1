#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ncmatch/errors.hpp"
#include "ncmatch/graph.hpp"

namespace ncmatch {

/// Integral edge weights indexed by root edge id.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(std::vector<Weight> w) : w_(std::move(w)) {}

    static WeightVector zero(std::int32_t m) { return WeightVector(std::vector<Weight>(m, 0)); }

    Weight at(EdgeId e) const { return w_[static_cast<std::size_t>(e)]; }
    Weight& at(EdgeId e) { return w_[static_cast<std::size_t>(e)]; }
    std::int32_t size() const { return static_cast<std::int32_t>(w_.size()); }
    const std::vector<Weight>& values() const { return w_; }

    Weight max_abs() const {
        Weight m = 0;
        for (Weight x : w_) m = std::max(m, x < 0 ? -x : x);
        return m;
    }

    void check_cap(Weight cap) const {
        if (max_abs() > cap)
            throw WeightCapError("weight magnitude " + std::to_string(max_abs()) +
                                 " exceeds cap " + std::to_string(cap));
    }

private:
    std::vector<Weight> w_;
};

namespace detail {

/// First `count` primes strictly greater than `floor`.
inline std::vector<std::int64_t> primes_above(std::int64_t floor, std::int64_t count) {
    std::vector<std::int64_t> out;
    if (count <= 0) return out;
    // Sieve with a generous bound; grow if the estimate falls short.
    std::int64_t hi = floor + 64;
    while (true) {
        double est = static_cast<double>(floor + count) *
                     (1.2 * std::max(2.0, std::log(static_cast<double>(floor + count + 16))));
        hi = std::max<std::int64_t>(hi, static_cast<std::int64_t>(est) + 64);
        std::vector<char> comp(static_cast<std::size_t>(hi) + 1, 0);
        out.clear();
        for (std::int64_t p = 2; p <= hi; ++p) {
            if (comp[p]) continue;
            if (p > floor) {
                out.push_back(p);
                if (static_cast<std::int64_t>(out.size()) == count) return out;
            }
            for (std::int64_t q = p * p; q <= hi; q += p) comp[q] = 1;
        }
        hi *= 2;
    }
}

}  // namespace detail

/// Weight-vector family that gives nonzero circulation to any collection of
/// at most `s` edge-disjoint even walks. Construction: base vector 5^i over
/// edge ranks (balanced base-5 digits make <b, sign(C)> nonzero for every
/// valid signature), reduced modulo each of the first K primes above
/// max(m^2, s). K defaults to 2*m*s.
class WeightFamily {
public:
    WeightFamily(std::int32_t m, std::int64_t s, std::int64_t k = 0)
        : m_(m), s_(std::max<std::int64_t>(1, s)) {
        if (m < 1) throw Error("weight_family: need at least one edge");
        k_ = k > 0 ? k : 2 * static_cast<std::int64_t>(m_) * s_;
        std::int64_t floorv = std::max<std::int64_t>(static_cast<std::int64_t>(m_) * m_, s_);
        primes_ = detail::primes_above(floorv, k_);
    }

    std::int64_t size() const { return k_; }
    std::int64_t prime(std::int64_t index) const { return primes_.at(index); }

    /// Member `index`, as weights over edge ranks 0..m-1.
    std::vector<Weight> member(std::int64_t index) const {
        std::int64_t p = primes_.at(static_cast<std::size_t>(index));
        std::vector<Weight> w(m_);
        std::int64_t pw = 1 % p;
        for (std::int32_t i = 0; i < m_; ++i) {
            w[i] = pw;
            pw = (pw * 5) % p;
        }
        return w;
    }

    std::vector<std::vector<Weight>> all_members() const {
        std::vector<std::vector<Weight>> out;
        out.reserve(k_);
        for (std::int64_t i = 0; i < k_; ++i) out.push_back(member(i));
        return out;
    }

private:
    std::int32_t m_;
    std::int64_t s_;
    std::int64_t k_;
    std::vector<std::int64_t> primes_;
};

/// Spec-level entry point: the full ordered family for (m, s).
inline std::vector<std::vector<Weight>> weight_family(std::int32_t m, std::int64_t s) {
    return WeightFamily(m, s).all_members();
}

/// Bind a rank-indexed family member to a minor's edges (ranked by root id).
inline WeightVector bind_to_minor(const std::vector<Weight>& by_rank, const Minor& g,
                                  std::int32_t root_m) {
    WeightVector w = WeightVector::zero(root_m);
    const auto& edges = g.edges();  // already sorted by root edge id
    for (std::size_t i = 0; i < edges.size(); ++i) w.at(edges[i].id) = by_rank.at(i);
    return w;
}

}  // namespace ncmatch
