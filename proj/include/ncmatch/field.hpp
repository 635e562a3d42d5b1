#pragma once

#include <cstdint>
#include <vector>

#include "ncmatch/errors.hpp"

namespace ncmatch {

/// Montgomery arithmetic over a prime p < 2^32. The default pipeline prime
/// is 3221225473 = 3 * 2^30 + 1, which is > 2^31 - 1 and supports radix-2
/// NTTs up to length 2^30.
class Fp {
public:
    explicit Fp(std::uint64_t p) : p_(static_cast<std::uint32_t>(p)) {
        if (p < 3 || p >= (1ull << 32) || p % 2 == 0)
            throw OracleError("field prime must be odd and < 2^32");
        // np_ = -p^{-1} mod 2^32 by Newton iteration.
        std::uint32_t inv = p_;
        for (int i = 0; i < 4; ++i) inv *= 2 - p_ * inv;
        np_ = ~inv + 1;  // == -inv
        r2_ = static_cast<std::uint32_t>(((__uint128_t{1} << 64) % p_));
        one_ = to_mont(1);
    }

    std::uint32_t prime() const { return p_; }
    std::uint32_t zero() const { return 0; }
    std::uint32_t one() const { return one_; }

    std::uint32_t to_mont(std::uint64_t x) const { return mul(static_cast<std::uint32_t>(x % p_), r2_); }
    std::uint32_t from_mont(std::uint32_t x) const { return reduce(x); }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
        std::uint32_t s = a + b;
        if (s >= p_ || s < a) s -= p_;
        return s;
    }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return a >= b ? a - b : a + p_ - b; }
    std::uint32_t neg(std::uint32_t a) const { return a == 0 ? 0 : p_ - a; }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        return mont_mul(static_cast<std::uint64_t>(a) * b);
    }

    std::uint32_t pow(std::uint32_t base_mont, std::uint64_t e) const {
        std::uint32_t acc = one_;
        while (e) {
            if (e & 1) acc = mul(acc, base_mont);
            base_mont = mul(base_mont, base_mont);
            e >>= 1;
        }
        return acc;
    }

    std::uint32_t inv(std::uint32_t a_mont) const {
        if (a_mont == 0) throw OracleError("division by zero in F_p");
        return pow(a_mont, p_ - 2);
    }

    /// A generator of the full multiplicative group.
    std::uint32_t primitive_root() const {
        std::uint64_t phi = p_ - 1;
        std::vector<std::uint64_t> factors;
        std::uint64_t x = phi;
        for (std::uint64_t d = 2; d * d <= x; ++d) {
            if (x % d == 0) {
                factors.push_back(d);
                while (x % d == 0) x /= d;
            }
        }
        if (x > 1) factors.push_back(x);
        for (std::uint32_t g = 2;; ++g) {
            std::uint32_t gm = to_mont(g);
            bool ok = true;
            for (std::uint64_t f : factors) {
                if (pow(gm, phi / f) == one_) {
                    ok = false;
                    break;
                }
            }
            if (ok) return gm;
        }
    }

    /// Primitive n-th root of unity; n must divide p-1.
    std::uint32_t root_of_unity(std::uint64_t n) const {
        if ((p_ - 1) % n != 0) throw OracleError("field has no root of unity of requested order");
        return pow(primitive_root(), (p_ - 1) / n);
    }

private:
    std::uint32_t mont_mul(std::uint64_t t) const {
        // t + m*p can overflow 64 bits for p close to 2^32; carry explicitly.
        std::uint32_t m = static_cast<std::uint32_t>(t) * np_;
        std::uint64_t mp = static_cast<std::uint64_t>(m) * p_;
        std::uint64_t lo = (t & 0xffffffffull) + (mp & 0xffffffffull);  // == 0 mod 2^32
        std::uint64_t u = (t >> 32) + (mp >> 32) + (lo >> 32);
        if (u >= p_) u -= p_;
        return static_cast<std::uint32_t>(u);
    }
    std::uint32_t reduce(std::uint32_t a) const { return mont_mul(a); }

    std::uint32_t p_;
    std::uint32_t np_;
    std::uint32_t r2_;
    std::uint32_t one_;
};

/// In-place radix-2 NTT over Montgomery values; size must be a power of two
/// dividing p-1.
inline void ntt(const Fp& f, std::vector<std::uint32_t>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw OracleError("ntt size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    std::uint32_t wn_root = f.root_of_unity(n);
    if (inverse) wn_root = f.inv(wn_root);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        std::uint32_t wlen = f.pow(wn_root, n / len);
        for (std::size_t i = 0; i < n; i += len) {
            std::uint32_t w = f.one();
            for (std::size_t j = 0; j < len / 2; ++j) {
                std::uint32_t x = a[i + j];
                std::uint32_t y = f.mul(a[i + j + len / 2], w);
                a[i + j] = f.add(x, y);
                a[i + j + len / 2] = f.sub(x, y);
                w = f.mul(w, wlen);
            }
        }
    }
    if (inverse) {
        std::uint32_t ninv = f.inv(f.to_mont(n));
        for (auto& x : a) x = f.mul(x, ninv);
    }
}

}  // namespace ncmatch
