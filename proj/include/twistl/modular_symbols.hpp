#pragma once

// Weight-2 modular symbols for Gamma_0(q), q prime, in the plus quotient.
//
// Manin symbols are the q+1 points (c:d) of P^1(F_q). Relations:
//     x + x S = 0,   x + x T + x T^2 = 0,   x = x I,
// with (c:d)S = (d:-c), (c:d)T = (d:-c-d), (c:d)I = (-c:d). Two-term relations
// are solved by signed orbits, the three-term ones by exact rational row
// reduction. Hecke operators act through Heilbronn matrices (Cremona's set for
// l != q, Merel's for l = q).

#include <gmpxx.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "twistl/arith.hpp"
#include "twistl/errors.hpp"

namespace twistl {

/// Genus of X_0(q) for prime q.
inline i64 genus_x0(i64 q) {
    if (!is_prime(q)) throw DomainError("genus_x0: q must be prime");
    auto legendre = [](i64 a, i64 p) -> i64 {
        const i64 r = pow_mod(mod_floor(a, p), static_cast<u64>((p - 1) / 2), p);
        return r == 0 ? 0 : (r == 1 ? 1 : -1);
    };
    const i64 mu = q + 1;
    const i64 nu2 = (q == 2) ? 1 : 1 + legendre(-1, q);
    const i64 nu3 = (q == 3) ? 1 : (q == 2 ? 0 : 1 + legendre(-3, q));
    const i64 cusps = 2;
    // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 cusps
    return (12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps) / 12;
}

using HeilbronnMatrix = std::array<i64, 4>;  // a, b, c, d

/// Cremona's Heilbronn matrices for a prime l.
inline std::vector<HeilbronnMatrix> heilbronn_cremona(i64 l) {
    if (!is_prime(l)) throw DomainError("heilbronn_cremona: l must be prime");
    if (l == 2) return {{1, 0, 0, 2}, {2, 0, 0, 1}, {2, 1, 0, 1}, {1, 0, 1, 2}};
    std::vector<HeilbronnMatrix> out;
    out.push_back({1, 0, 0, l});
    const i64 half = l / 2;
    for (i64 r = -half; r <= half; ++r) {
        i64 x1 = l, x2 = -r, y1 = 0, y2 = 1, a = -l, b = r;
        out.push_back({x1, x2, y1, y2});
        while (b != 0) {
            // nearest integer to a/b, halves rounded away from zero
            const double ratio = static_cast<double>(a) / static_cast<double>(b);
            const i64 qq = static_cast<i64>(std::round(ratio));
            const i64 c = a - b * qq;
            a = -b;
            b = c;
            const i64 x3 = qq * x2 - x1;
            x1 = x2;
            x2 = x3;
            const i64 y3 = qq * y2 - y1;
            y1 = y2;
            y2 = y3;
            out.push_back({x1, x2, y1, y2});
        }
    }
    return out;
}

/// Merel's matrices of determinant l: a > b >= 0, d > c >= 0, ad - bc = l.
inline std::vector<HeilbronnMatrix> heilbronn_merel(i64 l) {
    std::vector<HeilbronnMatrix> out;
    for (i64 a = 1; a <= l; ++a) {
        for (i64 d = 1; d <= l; ++d) {
            const i64 bc = a * d - l;
            if (bc < 0) continue;
            if (bc == 0) {
                if (a * d == l)
                    for (i64 b = 0; b < a; ++b) out.push_back({a, b, 0, d});  // c = 0
                if (a * d == l)
                    for (i64 c = 1; c < d; ++c) out.push_back({a, 0, c, d});  // b = 0, c > 0
                continue;
            }
            for (i64 b = 1; b < a; ++b) {
                if (bc % b != 0) continue;
                const i64 c = bc / b;
                if (c < d) out.push_back({a, b, c, d});
            }
        }
    }
    return out;
}

using RationalMatrix = std::vector<std::vector<mpq_class>>;

class ModularSymbolSpace {
public:
    explicit ModularSymbolSpace(i64 q) : q_(q) {
        if (!is_prime(q)) throw DomainError("build_space: level must be prime");
        if (genus_x0(q) == 0) throw EmptySpace("build_space: X_0(" + std::to_string(q) + ") has genus 0");
        build_quotient();
        build_cuspidal();
    }

    i64 level() const noexcept { return q_; }
    std::size_t symbol_count() const noexcept { return static_cast<std::size_t>(q_ + 1); }
    std::size_t quotient_dimension() const noexcept { return free_.size(); }
    std::size_t dimension() const noexcept { return free_.size() - 1; }  // cuspidal

    /// Index of (c:d) in P^1(F_q); (0:1) is q.
    std::size_t index(i64 c, i64 d) const {
        c = mod_floor(c, q_);
        d = mod_floor(d, q_);
        if (c == 0) {
            if (d == 0) return npos;
            return static_cast<std::size_t>(q_);
        }
        return static_cast<std::size_t>(mul_mod(d, mod_inverse(c, q_).value(), q_));
    }

    std::pair<i64, i64> symbol(std::size_t i) const {
        if (i == static_cast<std::size_t>(q_)) return {0, 1};
        return {1, static_cast<i64>(i)};
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// Image of symbol i in quotient coordinates.
    const std::vector<mpq_class>& rep(std::size_t i) const { return rep_[i]; }
    const std::vector<double>& rep_double(std::size_t i) const { return rep_d_[i]; }

    /// Quotient-space vector of T_h applied to Manin symbol i (Heilbronn list h).
    std::vector<mpq_class> apply(std::size_t i, const std::vector<HeilbronnMatrix>& hs) const {
        std::vector<mpq_class> out(free_.size(), 0);
        const auto [u, v] = symbol(i);
        for (const auto& h : hs) {
            const std::size_t j = index(u * h[0] + v * h[2], u * h[1] + v * h[3]);
            if (j == npos) continue;
            for (std::size_t k = 0; k < out.size(); ++k)
                if (rep_[j][k] != 0) out[k] += rep_[j][k];
        }
        return out;
    }

    /// Heilbronn list for T_l, l prime (Merel's set when l = q).
    std::vector<HeilbronnMatrix> heilbronn(i64 l) const {
        return (l == q_) ? heilbronn_merel(l) : heilbronn_cremona(l);
    }

    /// Exact matrix of T_l (l prime) on the cuspidal basis; column i is T b_i.
    RationalMatrix hecke_prime_exact(i64 l) const {
        const auto hs = heilbronn(l);
        const std::size_t g = dimension();
        RationalMatrix m(g, std::vector<mpq_class>(g, 0));
        for (std::size_t i = 0; i < g; ++i) {
            // b_i = e_{f_i} - kappa_i e_{f0}
            std::vector<mpq_class> t = apply(rep_symbol_[cusp_free_[i]], hs);
            if (kappa_[i] != 0) {
                const std::vector<mpq_class> t0 = apply(rep_symbol_[pivot_free_], hs);
                for (std::size_t k = 0; k < t.size(); ++k) t[k] -= kappa_[i] * t0[k];
            }
            for (std::size_t r = 0; r < g; ++r) m[r][i] = t[cusp_free_[r]];
        }
        return m;
    }

    /// Linear functional on quotient coordinates that reads cuspidal coordinates.
    /// Only meaningful on vectors that lie in the cuspidal subspace.
    std::vector<double> cuspidal_reader(const Eigen::VectorXd& phi) const {
        std::vector<double> w(free_.size(), 0.0);
        for (std::size_t r = 0; r < dimension(); ++r) w[cusp_free_[r]] = phi[static_cast<Eigen::Index>(r)];
        return w;
    }

    /// Symbols whose images span the cuspidal basis vector i: (symbol, coefficient) pairs.
    std::vector<std::pair<std::size_t, double>> cuspidal_basis_symbols(std::size_t i) const {
        std::vector<std::pair<std::size_t, double>> out{{rep_symbol_[cusp_free_[i]], 1.0}};
        if (kappa_[i] != 0) out.push_back({rep_symbol_[pivot_free_], -kappa_[i].get_d()});
        return out;
    }

    /// Coefficient of [infinity] in the boundary of each quotient basis vector.
    const std::vector<mpq_class>& boundary() const noexcept { return boundary_; }

private:
    void build_quotient() {
        const std::size_t n = symbol_count();
        auto S = [&](std::size_t i) {
            auto [c, d] = symbol(i);
            return index(d, -c);
        };
        auto I = [&](std::size_t i) {
            auto [c, d] = symbol(i);
            return index(-c, d);
        };
        auto T = [&](std::size_t i) {
            auto [c, d] = symbol(i);
            return index(d, -c - d);
        };

        // signed orbits under S (sign -1) and I (sign +1)
        std::vector<long> cls(n, -1);
        std::vector<int> sgn(n, 0);
        std::vector<bool> zero_class;
        std::vector<std::size_t> class_rep;
        for (std::size_t s = 0; s < n; ++s) {
            if (cls[s] != -1) continue;
            const long id = static_cast<long>(class_rep.size());
            class_rep.push_back(s);
            zero_class.push_back(false);
            std::vector<std::size_t> stack{s};
            cls[s] = id;
            sgn[s] = 1;
            while (!stack.empty()) {
                const std::size_t x = stack.back();
                stack.pop_back();
                for (const auto& [y, rel] : {std::pair{S(x), -1}, std::pair{I(x), +1}}) {
                    const int want = sgn[x] * rel;
                    if (cls[y] == -1) {
                        cls[y] = id;
                        sgn[y] = want;
                        stack.push_back(y);
                    } else if (sgn[y] != want) {
                        zero_class[static_cast<std::size_t>(id)] = true;
                    }
                }
            }
        }
        const std::size_t nc = class_rep.size();

        // three-term relations in class variables, one row per T-orbit
        RationalMatrix rows;
        for (std::size_t x = 0; x < n; ++x) {
            const std::size_t y = T(x), z = T(y);
            if (x > y || x > z) continue;
            std::vector<mpq_class> row(nc, 0);
            for (const std::size_t s : {x, y, z}) {
                if (!zero_class[static_cast<std::size_t>(cls[s])]) row[static_cast<std::size_t>(cls[s])] += sgn[s];
            }
            rows.push_back(std::move(row));
        }
        for (std::size_t c = 0; c < nc; ++c) {
            if (!zero_class[c]) continue;
            std::vector<mpq_class> row(nc, 0);
            row[c] = 1;
            rows.push_back(std::move(row));
        }

        // reduced row echelon form
        std::vector<long> pivot_row(nc, -1);
        std::size_t r = 0;
        for (std::size_t col = 0; col < nc && r < rows.size(); ++col) {
            std::size_t piv = r;
            while (piv < rows.size() && rows[piv][col] == 0) ++piv;
            if (piv == rows.size()) continue;
            std::swap(rows[r], rows[piv]);
            const mpq_class inv = 1 / rows[r][col];
            for (auto& v : rows[r]) v *= inv;
            for (std::size_t k = 0; k < rows.size(); ++k) {
                if (k == r || rows[k][col] == 0) continue;
                const mpq_class f = rows[k][col];
                for (std::size_t j = col; j < nc; ++j)
                    if (rows[r][j] != 0) rows[k][j] -= f * rows[r][j];
            }
            pivot_row[col] = static_cast<long>(r);
            ++r;
        }
        std::vector<long> free_pos(nc, -1);
        for (std::size_t c = 0; c < nc; ++c) {
            if (pivot_row[c] == -1) {
                free_pos[c] = static_cast<long>(free_.size());
                free_.push_back(c);
            }
        }
        const std::size_t d = free_.size();
        // class vectors in quotient coordinates
        std::vector<std::vector<mpq_class>> class_vec(nc, std::vector<mpq_class>(d, 0));
        for (std::size_t c = 0; c < nc; ++c) {
            if (free_pos[c] >= 0) {
                class_vec[c][static_cast<std::size_t>(free_pos[c])] = 1;
            } else {
                const auto& row = rows[static_cast<std::size_t>(pivot_row[c])];
                for (std::size_t f = 0; f < d; ++f) class_vec[c][f] = -row[free_[f]];
            }
        }
        rep_.assign(n, std::vector<mpq_class>(d, 0));
        rep_d_.assign(n, std::vector<double>(d, 0.0));
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t f = 0; f < d; ++f) {
                rep_[s][f] = class_vec[static_cast<std::size_t>(cls[s])][f] * sgn[s];
                rep_d_[s][f] = rep_[s][f].get_d();
            }
        }
        rep_symbol_.resize(d);
        for (std::size_t f = 0; f < d; ++f) rep_symbol_[f] = class_rep[free_[f]];
    }

    void build_cuspidal() {
        const std::size_t d = free_.size();
        // boundary: (0:1) -> [inf] - [0], (1:0) -> [0] - [inf], others -> 0
        auto delta = [&](std::size_t s) -> int {
            if (s == static_cast<std::size_t>(q_)) return 1;
            if (s == 0) return -1;
            return 0;
        };
        boundary_.assign(d, 0);
        for (std::size_t f = 0; f < d; ++f) boundary_[f] = delta(rep_symbol_[f]);
        pivot_free_ = d;
        for (std::size_t f = 0; f < d; ++f) {
            if (boundary_[f] != 0) {
                pivot_free_ = f;
                break;
            }
        }
        if (pivot_free_ == d) throw InvariantViolation("boundary_nonzero", q_, "boundary map vanishes on the quotient");
        for (std::size_t f = 0; f < d; ++f) {
            if (f == pivot_free_) continue;
            cusp_free_.push_back(f);
            kappa_.push_back(boundary_[f] / boundary_[pivot_free_]);
        }
    }

    i64 q_;
    std::vector<std::size_t> free_;                  // class ids that are free variables
    std::vector<std::size_t> rep_symbol_;            // symbol representing each free variable
    std::vector<std::vector<mpq_class>> rep_;        // symbol -> quotient coordinates
    std::vector<std::vector<double>> rep_d_;
    std::vector<mpq_class> boundary_;
    std::size_t pivot_free_ = 0;
    std::vector<std::size_t> cusp_free_;             // cuspidal basis b_i = e_{f_i} - kappa_i e_{f0}
    std::vector<mpq_class> kappa_;
};

inline ModularSymbolSpace build_space(i64 q) {
    if (q < 11 || q > 1000) throw DomainError("build_space: level must be a prime in [11, 1000]");
    return ModularSymbolSpace(q);
}

inline RationalMatrix rational_product(const RationalMatrix& a, const RationalMatrix& b) {
    const std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
    RationalMatrix out(n, std::vector<mpq_class>(m, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l)
            if (a[i][l] != 0)
                for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][l] * b[l][j];
    return out;
}

inline RationalMatrix rational_identity(std::size_t n) {
    RationalMatrix out(n, std::vector<mpq_class>(n, 0));
    for (std::size_t i = 0; i < n; ++i) out[i][i] = 1;
    return out;
}

inline mpq_class rational_trace(const RationalMatrix& a) {
    mpq_class t = 0;
    for (std::size_t i = 0; i < a.size(); ++i) t += a[i][i];
    return t;
}

inline Eigen::MatrixXd to_double(const RationalMatrix& a) {
    const auto n = static_cast<Eigen::Index>(a.size());
    const auto m = static_cast<Eigen::Index>(a.empty() ? 0 : a[0].size());
    Eigen::MatrixXd out(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) out(i, j) = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get_d();
    return out;
}

/// Exact T_n on the cuspidal subspace for gcd(n, q) = 1 or n a power of q,
/// built from prime operators by T_mn = T_m T_n and
/// T_{l^{j+1}} = T_l T_{l^j} - l T_{l^{j-1}}.
inline RationalMatrix hecke_matrix_exact(const ModularSymbolSpace& space, i64 n) {
    if (n < 1) throw DomainError("hecke_matrix: n must be >= 1");
    const i64 q = space.level();
    if (std::gcd(n, q) != 1) {
        i64 t = n;
        while (t % q == 0) t /= q;
        if (t != 1) throw DomainError("hecke_matrix: n must be coprime to q or a power of q");
    }
    RationalMatrix out = rational_identity(space.dimension());
    for (const auto& pp : factorize(n)) {
        const RationalMatrix tl = space.hecke_prime_exact(pp.prime);
        RationalMatrix prev = rational_identity(space.dimension()), cur = tl;
        for (int j = 1; j < pp.exponent; ++j) {
            RationalMatrix next = rational_product(tl, cur);
            if (pp.prime != q) {
                for (std::size_t a = 0; a < next.size(); ++a)
                    for (std::size_t b = 0; b < next.size(); ++b) next[a][b] -= pp.prime * prev[a][b];
            }
            prev = std::move(cur);
            cur = std::move(next);
        }
        out = rational_product(out, cur);
    }
    return out;
}

inline Eigen::MatrixXd hecke_matrix(const ModularSymbolSpace& space, i64 n) {
    return to_double(hecke_matrix_exact(space, n));
}

}  // namespace twistl
