#pragma once

// Kloosterman sums S(m,n;c) = sum over units b mod c of e((m b + n b^-1)/c).
//
// kloosterman() is the direct O(c) definition. KloostermanTable evaluates
// S(m_j, n_j; c q) for every c <= c_max and a batch of targets at once, which
// is what the geometric side of the trace formula needs. It splits c q into
// prime powers (twisted multiplicativity) and, for a prime r, walks a
// primitive root g: with U[i] = e(g^i / r),
//     S(1, g^e; r) = sum_i U[i] U[e - i],
// and the pairing x <-> -x halves the sum.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <vector>

#include "twistl/arith.hpp"

namespace twistl {

struct KloostermanValue {
    i64 m;
    i64 n;
    i64 c;
    double value;
};

/// tau(c) * sqrt(gcd(m,n,c)) * sqrt(c).
inline double weil_bound(i64 m, i64 n, i64 c) {
    const i64 g = std::gcd(std::gcd(mod_floor(m, c), mod_floor(n, c)), c);
    return static_cast<double>(divisor_count(c)) * std::sqrt(static_cast<double>(g)) *
           std::sqrt(static_cast<double>(c));
}

/// Inverses of every residue mod M (0 for non-units).
inline std::vector<i64> inverse_table(i64 M) {
    std::vector<i64> inv(static_cast<std::size_t>(M), 0);
    for (i64 x = 1; x < M; ++x) {
        if (std::gcd(x, M) == 1) inv[static_cast<std::size_t>(x)] = mod_inverse(x, M).value();
    }
    if (M == 1) inv[0] = 0;
    return inv;
}

inline KloostermanValue kloosterman(i64 m, i64 n, i64 c) {
    if (c < 1) throw DomainError("kloosterman: c must be >= 1");
    if (c == 1) return {m, n, c, 1.0};
    const i64 mr = mod_floor(m, c), nr = mod_floor(n, c);
    double s = 0.0;
    for (i64 b = 1; b < c; ++b) {
        if (std::gcd(b, c) != 1) continue;
        const i64 binv = mod_inverse(b, c).value();
        const i64 r = (mul_mod(mr, b, c) + mul_mod(nr, binv, c)) % c;
        s += std::cos(two_pi * static_cast<double>(r) / static_cast<double>(c));
    }
    return {m, n, c, s};
}

namespace detail {

// cos(2 pi k / M) for k < M plus the inverse table; reused for every c that
// shares the prime power M.
struct PowerModulusTables {
    i64 M = 0;
    std::vector<i64> inv;
    std::vector<double> cos_table;

    explicit PowerModulusTables(i64 modulus) : M(modulus), inv(inverse_table(modulus)) {
        cos_table.resize(static_cast<std::size_t>(M));
        for (i64 k = 0; k < M; ++k)
            cos_table[static_cast<std::size_t>(k)] =
                std::cos(two_pi * static_cast<double>(k) / static_cast<double>(M));
    }

    double sum(i64 a, i64 b) const {
        if (M == 1) return 1.0;
        a = mod_floor(a, M);
        b = mod_floor(b, M);
        double s = 0.0;
        i64 ax = 0;
        for (i64 x = 1; x < M; ++x) {
            ax += a;
            if (ax >= M) ax -= M;
            const i64 xi = inv[static_cast<std::size_t>(x)];
            if (xi == 0) continue;
            const i64 r = (ax + static_cast<i64>(static_cast<u64>(b) * static_cast<u64>(xi) % static_cast<u64>(M))) % M;
            s += cos_table[static_cast<std::size_t>(r)];
        }
        return s;
    }
};

// Tables for a prime r with primitive root g: T[i] = e(g^i / r) for i < h =
// (r-1)/2, split into real and imaginary parts. Since g^h = -1, U[i + h] is
// conj(T[i]), so half a period is enough. Discrete logs are kept only for
// residues below dlog_bound (dlog is additive, so callers need no more).
// Buffers are kept across primes; fresh allocations cost more than the walk.
struct PrimeWalkTables {
    i64 r = 0;
    i64 phi = 0;
    i64 h = 0;
    i64 dlog_bound = 0;
    std::vector<double> tr, ti;
    std::vector<std::int32_t> dlog;

    PrimeWalkTables() = default;
    explicit PrimeWalkTables(i64 prime) { reset(prime, prime); }

    void reset(i64 prime, i64 bound) {
        if (prime < 3) throw DomainError("PrimeWalkTables: prime must be odd");
        r = prime;
        phi = prime - 1;
        h = phi / 2;
        dlog_bound = std::min(bound, prime);
        const i64 g = primitive_root(r);
        const std::size_t n = static_cast<std::size_t>(h);
        if (tr.size() < n) {
            const std::size_t cap = std::max(n, 2 * tr.size());
            tr.resize(cap);
            ti.resize(cap);
        }
        dlog.assign(static_cast<std::size_t>(dlog_bound), -1);
        // e(x/r) = e(hi*1024/r) e(lo/r) with x = 1024 hi + lo
        constexpr i64 block = 1024;
        lo_tab.resize(static_cast<std::size_t>(std::min(block, r)));
        for (std::size_t k = 0; k < lo_tab.size(); ++k) lo_tab[k] = unit_phase(static_cast<i64>(k), r);
        hi_tab.resize(static_cast<std::size_t>(r / block + 1));
        for (std::size_t k = 0; k < hi_tab.size(); ++k) hi_tab[k] = unit_phase(static_cast<i64>(k) * block, r);

        // eight interleaved walks x_l = g^(l + 8k) break the multiply-reduce chain
        constexpr std::size_t lanes = 8;
        const double rd = static_cast<double>(r), rinv = 1.0 / rd;
        const i64 step = pow_mod(g, lanes, r);
        i64 x[lanes];
        for (std::size_t l = 0; l < lanes; ++l) x[l] = pow_mod(g, l, r);
        for (std::size_t base = 0; base < n; base += lanes) {
            const std::size_t width = std::min(lanes, n - base);
            for (std::size_t l = 0; l < width; ++l) {
                const std::size_t i = base + l;
                const i64 xv = x[l];
                if (xv < dlog_bound) dlog[static_cast<std::size_t>(xv)] = static_cast<std::int32_t>(i);
                if (r - xv < dlog_bound) dlog[static_cast<std::size_t>(r - xv)] = static_cast<std::int32_t>(i + n);
                const cplx hv = hi_tab[static_cast<std::size_t>(xv >> 10)];
                const cplx lo = lo_tab[static_cast<std::size_t>(xv & 1023)];
                // written out: std::complex operator* goes through __muldc3
                tr[i] = hv.real() * lo.real() - hv.imag() * lo.imag();
                ti[i] = hv.real() * lo.imag() + hv.imag() * lo.real();
            }
            for (std::size_t l = 0; l < lanes; ++l) {
                // x, step < r <= 2^26 keeps the product exact in a double
                const double prod = static_cast<double>(x[l]) * static_cast<double>(step);
                i64 rem = x[l] * step - static_cast<i64>(prod * rinv) * r;
                if (rem < 0) rem += r;
                if (rem >= r) rem -= r;
                x[l] = rem;
            }
        }
    }

    /// Discrete log of a unit below dlog_bound.
    i64 log_of(i64 t) const {
        if (t <= 0 || t >= dlog_bound) throw DomainError("PrimeWalkTables: residue outside the logged range");
        return dlog[static_cast<std::size_t>(t)];
    }

    // sum_{t < len} Re(U[i0 + t] U[e - i0 - t]), indices taken mod phi.
    double range_sum(i64 i0, i64 len, i64 e) const {
        double total = 0.0;
        while (len > 0) {
            const i64 ii = mod_floor(i0, phi), jj = mod_floor(e - i0, phi);
            const bool fa = ii >= h, fb = jj >= h;
            const i64 a = fa ? ii - h : ii, b = fb ? jj - h : jj;
            const i64 run = std::min({len, h - a, b + 1});
            const double* ar = tr.data() + a;
            const double* ai = ti.data() + a;
            const double* br = tr.data() + b;
            const double* bi = ti.data() + b;
            // independent partial sums so the loop vectorizes without -ffast-math
            double sr[4] = {0.0, 0.0, 0.0, 0.0}, si[4] = {0.0, 0.0, 0.0, 0.0};
            std::ptrdiff_t t = 0;
            const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(run);
            for (; t + 4 <= m; t += 4) {
                for (std::ptrdiff_t l = 0; l < 4; ++l) {
                    sr[l] += ar[t + l] * br[-(t + l)];
                    si[l] += ai[t + l] * bi[-(t + l)];
                }
            }
            for (; t < m; ++t) {
                sr[0] += ar[t] * br[-t];
                si[0] += ai[t] * bi[-t];
            }
            const double re = (sr[0] + sr[1]) + (sr[2] + sr[3]);
            const double im = (si[0] + si[1]) + (si[2] + si[3]);
            total += (fa == fb) ? re - im : re + im;
            i0 += run;
            len -= run;
        }
        return total;
    }

    /// S(1, g^e; r) = sum_{i mod phi} U[i] U[e - i]. The summand has period h
    /// in i and is symmetric under i -> e - i, so a quarter period suffices.
    double unit_sum_log(i64 e_log) const {
        const i64 e = mod_floor(e_log, phi);
        double per_h;
        if (e % 2 == 0) {
            per_h = range_sum(e / 2, 1, e) + 2.0 * range_sum(e / 2 + 1, (h - 1) / 2, e);
            if (h % 2 == 0) per_h += range_sum(e / 2 + h / 2, 1, e);
        } else {
            per_h = 2.0 * range_sum((e + 1) / 2, h / 2, e);
            if (h % 2 == 1) per_h += range_sum((e + h) / 2, 1, e);
        }
        return 2.0 * per_h;
    }

    /// S(1, t; r) for a unit t below dlog_bound.
    double unit_sum(i64 t) const { return unit_sum_log(log_of(t)); }

private:
    std::vector<cplx> lo_tab, hi_tab;
};

}  // namespace detail

struct KloostermanTarget {
    i64 m;
    i64 n;
};

/// S(m_j, n_j; c q) for c = 1..c_max, stored row-major as value(c, j).
class KloostermanTable {
public:
    /// Primes below this go through the generic prime-power path.
    static constexpr i64 walk_threshold = 40;

    KloostermanTable(i64 q, std::vector<KloostermanTarget> targets, i64 c_max)
        : q_(q), c_max_(c_max), targets_(std::move(targets)) {
        if (!is_prime(q)) throw DomainError("KloostermanTable: level must be prime");
        if (c_max < 1) throw DomainError("KloostermanTable: c_max must be >= 1");
        const std::size_t J = targets_.size();
        values_.assign(static_cast<std::size_t>(c_max) * J, 1.0);
        if (J == 0) return;
        build();
    }

    i64 level() const noexcept { return q_; }
    i64 c_max() const noexcept { return c_max_; }
    std::size_t target_count() const noexcept { return targets_.size(); }
    const std::vector<KloostermanTarget>& targets() const noexcept { return targets_; }

    double value(i64 c, std::size_t j) const {
        if (c < 1 || c > c_max_ || j >= targets_.size()) throw DomainError("KloostermanTable: index out of range");
        return values_[static_cast<std::size_t>(c - 1) * targets_.size() + j];
    }

private:
    void build() {
        const i64 C = c_max_;
        const std::size_t J = targets_.size();

        // distinct products m n; targets with equal products share S(1, mn t^2; r)
        std::map<i64, std::size_t> product_ids;
        std::vector<std::size_t> product_of(J);
        std::vector<i64> products;
        for (std::size_t j = 0; j < J; ++j) {
            const i64 mn = targets_[j].m * targets_[j].n;
            auto [it, inserted] = product_ids.emplace(mn, products.size());
            if (inserted) products.push_back(mn);
            product_of[j] = it->second;
        }
        std::vector<double> product_value(products.size());

        std::vector<i64> primes = primes_up_to(C);
        if (q_ > C) primes.push_back(q_);

        i64 max_product = 1;
        for (const i64 mn : products) max_product = std::max(max_product, mn);
        std::vector<i64> product_log(products.size());
        i64 q_log = 0;

        detail::PrimeWalkTables walk;
        for (const i64 r : primes) {
            bool walk_ready = false;
            std::map<i64, detail::PowerModulusTables> power_tables;
            const i64 c_step = (r == q_) ? 1 : r;
            for (i64 c = c_step; c <= C; c += c_step) {
                int e = (r == q_) ? 1 : 0;
                i64 M = (r == q_) ? r : 1;
                for (i64 t = c; t % r == 0; t /= r) {
                    ++e;
                    M *= r;
                }
                // c q / M, the part of c q prime to r
                const i64 cofactor = (r == q_) ? (c / (M / r)) : (c / M * q_);
                const i64 Ninv = mod_inverse(cofactor % M, M).value();
                double* row = values_.data() + static_cast<std::size_t>(c - 1) * J;

                if (e == 1 && r >= walk_threshold) {
                    if (!walk_ready) {
                        walk.reset(r, std::max({C / r, max_product, q_}) + 1);
                        walk_ready = true;
                        for (std::size_t k = 0; k < products.size(); ++k) {
                            const i64 t = mod_floor(products[k], r);
                            product_log[k] = (t == 0) ? -1 : walk.log_of(t);
                        }
                        q_log = (r == q_) ? 0 : walk.log_of(q_ % r);
                    }
                    // log of the cofactor: c q / r = (c / r) q, or c itself when r = q
                    const i64 n_log = (r == q_) ? walk.log_of(c % r) : walk.log_of((c / r) % r) + q_log;
                    for (std::size_t k = 0; k < products.size(); ++k)
                        product_value[k] = (product_log[k] < 0) ? 0.0 : walk.unit_sum_log(product_log[k] - 2 * n_log);
                    for (std::size_t j = 0; j < J; ++j) {
                        const bool m0 = mod_floor(targets_[j].m, r) == 0;
                        const bool n0 = mod_floor(targets_[j].n, r) == 0;
                        double v;
                        if (m0 && n0) v = static_cast<double>(r - 1);
                        else if (m0 || n0) v = -1.0;
                        else v = product_value[product_of[j]];
                        row[j] *= v;
                    }
                } else {
                    auto it = power_tables.find(M);
                    if (it == power_tables.end()) it = power_tables.emplace(M, detail::PowerModulusTables(M)).first;
                    for (std::size_t j = 0; j < J; ++j) {
                        const i64 a = mul_mod(targets_[j].m, Ninv, M);
                        const i64 b = mul_mod(targets_[j].n, Ninv, M);
                        row[j] *= it->second.sum(a, b);
                    }
                }
            }
        }
    }

    i64 q_;
    i64 c_max_;
    std::vector<KloostermanTarget> targets_;
    std::vector<double> values_;
};

}  // namespace twistl
