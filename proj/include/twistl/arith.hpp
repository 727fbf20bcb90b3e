#pragma once

// Exact modular arithmetic on 64-bit integers. Products go through 128-bit
// intermediates, so every modulus below 2^62 is safe.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "twistl/errors.hpp"

namespace twistl {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Least non-negative residue of a modulo m (m >= 1).
constexpr i64 mod_floor(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

constexpr i64 mul_mod(i64 a, i64 b, i64 m) {
    return static_cast<i64>(static_cast<i128>(mod_floor(a, m)) * mod_floor(b, m) % m);
}

constexpr i64 pow_mod(i64 base, u64 exp, i64 m) {
    if (m == 1) return 0;
    i64 result = 1;
    base = mod_floor(base, m);
    while (exp > 0) {
        if (exp & 1U) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1U;
    }
    return result;
}

/// A residue class a mod m stored in canonical form 0 <= value < modulus.
class ResidueClass {
public:
    constexpr ResidueClass(i64 value, i64 modulus) : value_(0), modulus_(modulus) {
        if (modulus < 1) throw DomainError("ResidueClass: modulus must be >= 1");
        value_ = mod_floor(value, modulus);
    }

    constexpr i64 value() const noexcept { return value_; }
    constexpr i64 modulus() const noexcept { return modulus_; }

    constexpr bool operator==(const ResidueClass&) const = default;

private:
    i64 value_;
    i64 modulus_;
};

/// Inverse of a modulo m. For m == 1 every integer is a unit and the answer is 0.
constexpr ResidueClass mod_inverse(i64 a, i64 m) {
    if (m < 1) throw DomainError("mod_inverse: modulus must be >= 1");
    i64 old_r = mod_floor(a, m), r = m;
    i64 old_s = 1, s = 0;
    while (r != 0) {
        const i64 quot = old_r / r;
        i64 t = old_r - quot * r;
        old_r = r;
        r = t;
        t = old_s - quot * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1 && m != 1) throw NotCoprime(a, m);
    return ResidueClass(old_s, m);
}

/// Deterministic trial division; intended for n up to ~10^12.
constexpr bool is_prime(i64 n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    if (n % 3 == 0) return n == 3;
    for (i64 d = 5; d * d <= n; d += 6) {
        if (n % d == 0 || n % (d + 2) == 0) return false;
    }
    return true;
}

inline std::vector<i64> primes_up_to(i64 limit) {
    std::vector<i64> out;
    if (limit < 2) return out;
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    for (i64 i = 2; i <= limit; ++i) {
        if (composite[static_cast<std::size_t>(i)]) continue;
        out.push_back(i);
        for (i64 j = i * i; j <= limit; j += i) composite[static_cast<std::size_t>(j)] = true;
    }
    return out;
}

struct PrimePower {
    i64 prime;
    int exponent;
    i64 value;  // prime^exponent
};

inline std::vector<PrimePower> factorize(i64 n) {
    if (n < 1) throw DomainError("factorize: n must be >= 1");
    std::vector<PrimePower> out;
    for (i64 d = 2; d * d <= n; ++d) {
        if (n % d != 0) continue;
        PrimePower pp{d, 0, 1};
        while (n % d == 0) {
            n /= d;
            ++pp.exponent;
            pp.value *= d;
        }
        out.push_back(pp);
    }
    if (n > 1) out.push_back({n, 1, n});
    return out;
}

inline i64 divisor_count(i64 n) {
    i64 count = 1;
    for (const auto& pp : factorize(n)) count *= pp.exponent + 1;
    return count;
}

/// Least primitive root modulo the prime p (1 for p = 2).
inline i64 primitive_root(i64 p) {
    if (!is_prime(p)) throw DomainError("primitive_root: " + std::to_string(p) + " is not prime");
    if (p == 2) return 1;
    const auto factors = factorize(p - 1);
    for (i64 g = 2;; ++g) {
        bool generator = true;
        for (const auto& f : factors) {
            if (pow_mod(g, static_cast<u64>((p - 1) / f.prime), p) == 1) {
                generator = false;
                break;
            }
        }
        if (generator) return g;
    }
}

/// e(x) = exp(2 pi i x).
inline cplx unit_phase(double x) { return std::polar(1.0, two_pi * x); }

/// e(a/m) with the numerator reduced exactly before the division, so huge a
/// lose no precision.
inline cplx unit_phase(i64 a, i64 m) {
    const i64 r = mod_floor(a, m);
    return std::polar(1.0, two_pi * (static_cast<double>(r) / static_cast<double>(m)));
}

/// Factors of e(a/(m1 m2)) along Z/m1 x Z/m2:
/// first = e(a * inv(m2)/m1), second = e(a * inv(m1)/m2).
inline std::pair<cplx, cplx> split_additive_character(i64 a, i64 m1, i64 m2) {
    if (m1 < 1 || m2 < 1) throw DomainError("split_additive_character: moduli must be >= 1");
    if (std::gcd(m1, m2) != 1) throw NotCoprime(m1, m2);
    const i64 inv_m2 = mod_inverse(m2, m1).value();
    const i64 inv_m1 = mod_inverse(m1, m2).value();
    return {unit_phase(mul_mod(a, inv_m2, m1), m1), unit_phase(mul_mod(a, inv_m1, m2), m2)};
}

/// Prime level q and prime character modulus p with q != p.
class PrimePair {
public:
    PrimePair(i64 q, i64 p) : q_(q), p_(p) {
        if (!is_prime(q)) throw DomainError("PrimePair: q=" + std::to_string(q) + " is not prime");
        if (!is_prime(p) || p < 3)
            throw DomainError("PrimePair: p=" + std::to_string(p) + " must be an odd prime");
        if (q == p) throw DomainError("PrimePair: q and p must be distinct");
    }
    i64 q() const noexcept { return q_; }
    i64 p() const noexcept { return p_; }

private:
    i64 q_;
    i64 p_;
};

}  // namespace twistl
