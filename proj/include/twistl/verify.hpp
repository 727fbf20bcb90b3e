#pragma once

// Oracle and identity batteries behind `twistl verify`. Each check returns one
// row (max residual over its parameter set against a budget) so the CLI report
// and the acceptance binary share the same code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "twistl/characters.hpp"
#include "twistl/eigendata.hpp"
#include "twistl/errors.hpp"
#include "twistl/identities.hpp"
#include "twistl/kloosterman.hpp"
#include "twistl/lfunctions.hpp"
#include "twistl/oscillatory.hpp"
#include "twistl/petersson.hpp"
#include "twistl/scan.hpp"
#include "twistl/special_functions.hpp"

namespace twistl {

struct CheckRow {
    std::string suite;
    std::string identity;
    std::string parameters;
    double residual = 0.0;
    double budget = 0.0;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    // truncation for the quick trace-formula check; the 1e-6 budget needs
    // c_max near 2^19..2^20 and minutes of CPU, so the quick suite uses a
    // looser budget matched to the ~1/c_max noise
    i64 petersson_c_max = 32768;
    double petersson_budget = 2e-4;
    i64 dual_c_max = default_dual_c_max;
    std::uint64_t seed = 0x7a15;
    std::string eigendata_path;
};

namespace detail {

template <typename F>
CheckRow run_check(std::string suite, std::string identity, std::string parameters, double budget, F&& body) {
    CheckRow row{std::move(suite), std::move(identity), std::move(parameters), 0.0, budget, false, {}, 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(row);
        if (!std::isfinite(row.residual)) throw NumericallyUnstable("non-finite residual");
        row.pass = row.residual < row.budget;
    } catch (const std::exception& e) {
        row.pass = false;
        row.residual = std::numeric_limits<double>::quiet_NaN();
        row.detail = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

inline std::string join_ints(const std::vector<i64>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// characters

inline CheckRow check_gauss_sums(i64 p_max = 101) {
    return detail::run_check("characters", "gauss_sum_modulus", "primitive chi mod p, 3 <= p <= " + std::to_string(p_max),
                             1e-9, [&](CheckRow& row) {
                                 std::size_t count = 0;
                                 for (const i64 p : primes_up_to(p_max)) {
                                     if (p < 3) continue;
                                     for (const auto& chi : characters_mod(p)) {
                                         const double r = std::abs(std::norm(gauss_sum(chi).value) - double(p));
                                         row.residual = std::max(row.residual, r);
                                         ++count;
                                     }
                                 }
                                 row.detail = std::to_string(count) + " characters";
                             });
}

inline CheckRow check_character_orthogonality(i64 p_max = 31) {
    return detail::run_check("characters", "orthogonality", "all chi mod p, p <= " + std::to_string(p_max), 1e-9,
                             [&](CheckRow& row) {
                                 for (const i64 p : primes_up_to(p_max)) {
                                     if (p < 3) continue;
                                     const auto chars = characters_mod(p, false);
                                     for (const auto& a : chars)
                                         for (const auto& b : chars) {
                                             cplx s{0.0, 0.0};
                                             for (i64 n = 1; n < p; ++n) s += a(n) * std::conj(b(n));
                                             const double expect = a.exponent() == b.exponent() ? double(p - 1) : 0.0;
                                             row.residual = std::max(row.residual, std::abs(s - expect));
                                         }
                                 }
                             });
}

// ---------------------------------------------------------------------------
// exponential sums

inline CheckRow check_twisted_sum_grid() {
    return detail::run_check(
        "exp-sums", "twisted_sum_identity", "c<=3 q,p in {3,5,7} q!=p n2 in [-2,3] m1 in [-5,7] all primitive chi", 1e-9,
        [&](CheckRow& row) {
            std::size_t count = 0;
            for (i64 c = 1; c <= 3; ++c)
                for (const i64 q : {3, 5, 7})
                    for (const i64 p : {3, 5, 7}) {
                        if (q == p || c % p == 0) continue;
                        for (const auto& chi : characters_mod(p))
                            for (i64 n2 = -2; n2 <= 3; ++n2)
                                for (i64 m1 = -5; m1 <= 7; ++m1) {
                                    const TwistedSumParams s{c, q, p, n2, m1, chi};
                                    if (c * p * q * c * q > twisted_sum_budget) continue;
                                    row.residual = std::max(row.residual, twisted_sum_identity(s).residual);
                                    ++count;
                                }
                    }
            row.detail = std::to_string(count) + " tuples; orientation " +
                         to_string(resolve_sign_conventions().twisted_sum);
        });
}

inline CheckRow check_reciprocity(std::size_t count = 100, std::uint64_t seed = 0x7a15) {
    return detail::run_check("exp-sums", "reciprocity_identity", std::to_string(count) + " random tuples", 1e-12,
                             [&](CheckRow& row) {
                                 std::mt19937_64 rng(seed);
                                 const std::vector<i64> primes{3, 5, 7, 11, 13, 17, 19, 23};
                                 std::uniform_int_distribution<std::size_t> pick(0, primes.size() - 1);
                                 std::uniform_int_distribution<i64> cdist(1, 30), mdist(-500, 500), ndist(-5000, 5000);
                                 std::size_t done = 0;
                                 while (done < count) {
                                     const i64 p = primes[pick(rng)], q = primes[pick(rng)];
                                     const i64 c = cdist(rng), m1 = mdist(rng), n2 = ndist(rng);
                                     if (p == q || m1 == 0 || std::gcd(m1 < 0 ? -m1 : m1, c * q) != 1) continue;
                                     row.residual = std::max(row.residual, reciprocity_identity(n2, p, c, q, m1));
                                     ++done;
                                 }
                             });
}

inline CheckRow check_poisson_n2_grid() {
    const auto& conv = resolve_sign_conventions();
    return detail::run_check(
        "exp-sums", "poisson_n2_identity",
        "m1<=12 coprime to cpq, c<=3, q,p in {3,5,7} q!=p, |m2|<=2 m1 p, congruence sign " +
            std::to_string(conv.poisson_n2_sign),
        1e-9, [&](CheckRow& row) {
            std::size_t count = 0;
            for (const i64 p : {3, 5, 7})
                for (const i64 q : {3, 5, 7}) {
                    if (p == q) continue;
                    for (i64 c = 1; c <= 3; ++c)
                        for (i64 m1 = 1; m1 <= 12; ++m1) {
                            if (std::gcd(m1, p) != 1 || std::gcd(m1, c * q) != 1) continue;
                            for (const auto& chi : characters_mod(p))
                                for (i64 m2 = -2 * m1 * p; m2 <= 2 * m1 * p; ++m2) {
                                    const auto r = poisson_n2_identity(m1, p, c, q, m2, chi, conv);
                                    row.residual = std::max(row.residual, r.residual);
                                    ++count;
                                }
                        }
                }
            row.detail = std::to_string(count) + " tuples; orientation " + to_string(conv.poisson_n2);
        });
}

inline CheckRow check_weil_bound(i64 c_max = 500, std::size_t per_c = 200, std::uint64_t seed = 0x7a15) {
    // residual is max |S| / bound; the budget allows rounding only
    return detail::run_check("exp-sums", "weil_bound",
                             "c<=" + std::to_string(c_max) + ", " + std::to_string(per_c) + " random (m,n) per c",
                             1.0 + 1e-9, [&](CheckRow& row) {
                                 std::mt19937_64 rng(seed);
                                 std::uniform_int_distribution<i64> mn(-100000, 100000);
                                 for (i64 c = 1; c <= c_max; ++c)
                                     for (std::size_t i = 0; i < per_c; ++i) {
                                         const i64 m = mn(rng), n = mn(rng);
                                         const double s = kloosterman(m, n, c).value;
                                         row.residual = std::max(row.residual, std::abs(s) / weil_bound(m, n, c));
                                     }
                                 row.detail = "max |S| / bound";
                             });
}

inline CheckRow check_kloosterman_table(i64 q = 11, i64 c_max = 400) {
    return detail::run_check("exp-sums", "kloosterman_table_vs_direct",
                             "q=" + std::to_string(q) + " c<=" + std::to_string(c_max), 1e-9, [&](CheckRow& row) {
                                 const std::vector<KloostermanTarget> targets{{1, 1}, {2, 3}, {5, 7}, {q, 2}, {q, q}};
                                 const KloostermanTable table(q, targets, c_max);
                                 for (i64 c = 1; c <= c_max; ++c)
                                     for (std::size_t j = 0; j < targets.size(); ++j) {
                                         const double direct = kloosterman(targets[j].m, targets[j].n, c * q).value;
                                         row.residual = std::max(row.residual, std::abs(table.value(c, j) - direct));
                                     }
                             });
}

inline CheckRow check_poisson_summation() {
    return detail::run_check("exp-sums", "poisson_summation", "gaussian r=1,3,7 and bump r=3", 1e-10,
                             [&](CheckRow& row) {
                                 for (const i64 r : {1, 3, 7})
                                     for (i64 a = 0; a < r; ++a)
                                         row.residual = std::max(
                                             row.residual, numeric_poisson_check(SchwartzFunction::gaussian(), a, r, 40).residual);
                                 for (i64 a = 0; a < 3; ++a)
                                     row.residual = std::max(
                                         row.residual, numeric_poisson_check(SchwartzFunction::bump(0.3, 2.5), a, 3, 200).residual);
                             });
}

// ---------------------------------------------------------------------------
// special functions

inline CheckRow check_weight_V() {
    return detail::run_check("special", "weight_V_vs_contour", "k in {2,4,12}, 20-point log grid on [1e-3, 10]", 1e-8,
                             [&](CheckRow& row) {
                                 for (const int k : {2, 4, 12})
                                     for (int i = 0; i < 20; ++i) {
                                         const double x = 1e-3 * std::pow(1e4, i / 19.0);
                                         const double sigma = x < 0.1 ? 0.5 : (x < 1.0 ? 1.0 : 2.0);
                                         const double d = std::abs(weight_V_oracle(k, x, sigma, 80.0) - weight_V(k, x));
                                         row.residual = std::max(row.residual, d);
                                     }
                             });
}

inline CheckRow check_weight_V_k2() {
    return detail::run_check("special", "weight_V_k2_exponential", "x on a 20-point log grid on [1e-3, 10]", 1e-14,
                             [&](CheckRow& row) {
                                 for (int i = 0; i < 20; ++i) {
                                     const double x = 1e-3 * std::pow(1e4, i / 19.0);
                                     row.residual = std::max(row.residual, std::abs(weight_V(2, x) - std::exp(-two_pi * x)));
                                 }
                             });
}

inline CheckRow check_bessel_crossover() {
    return detail::run_check("special", "bessel_series_vs_large", "orders 1,3,11 on [6,10] step 0.01", 1e-9,
                             [&](CheckRow& row) {
                                 for (const int n : {1, 3, 11})
                                     for (int i = 0; i <= 400; ++i) {
                                         const double x = 6.0 + 0.01 * i;
                                         const double d = std::abs(bessel_J_series(n, x).value - bessel_J_large(n, x));
                                         row.residual = std::max(row.residual, d);
                                     }
                             });
}

/// Small x: |J_n(x)| <= x/2 on (0, 1]. Large x: |J_n(x)| <= sqrt(2/pi) (x^2 - n^2)^(-1/4)
/// for x >= 2n. Residual is the largest ratio to the envelope.
inline CheckRow check_bessel_envelopes() {
    return detail::run_check("special", "bessel_envelopes", "orders 1,3,11; x in (0,1] and [2n, 300]", 1.0 + 1e-12,
                             [&](CheckRow& row) {
                                 for (const int n : {1, 3, 11}) {
                                     for (int i = 1; i <= 200; ++i) {
                                         const double x = i / 200.0;
                                         row.residual = std::max(row.residual, std::abs(bessel_J(n, x)) / (0.5 * x));
                                     }
                                     for (double x = 2.0 * n; x <= 300.0; x += 0.05) {
                                         const double env = std::sqrt(2.0 / std::numbers::pi) *
                                                            std::pow(x * x - double(n) * n, -0.25);
                                         row.residual = std::max(row.residual, std::abs(bessel_J(n, x)) / env);
                                     }
                                 }
                             });
}

inline CheckRow check_bessel_reference() {
    return detail::run_check("special", "bessel_vs_std", "orders 1,3,11,23 on [1e-3, 200]", 1e-11, [&](CheckRow& row) {
        for (const int n : {1, 3, 11, 23})
            for (double x = 1e-3; x < 200.0; x *= 1.01)
                row.residual = std::max(row.residual, std::abs(bessel_J(n, x) - std::cyl_bessel_j(double(n), x)));
    });
}

struct StationaryPhaseSetup {
    i64 p = 101;
    i64 q = 11;
    i64 c = 1;
    double y = 1.0;
};

inline std::vector<CheckRow> check_stationary_phase(const StationaryPhaseSetup& s = {}) {
    std::vector<CheckRow> rows;
    const auto V = Cutoff2D::product_bump();
    for (const double Y : {100.0, 1000.0}) {
        const std::string params = "N/(cq)=" + format_number(Y) + " p=" + std::to_string(s.p) + " q=" +
                                   std::to_string(s.q) + " m1=p y=" + format_number(s.y);
        OscillatorySpec spec{Y * double(s.c * s.q), s.c, s.q, s.p, s.p, s.y, +1, OscillatoryKind::v2};
        double scale = 0.0;
        rows.push_back(detail::run_check("special", "stationary_phase_relative_error", params, 0.1, [&](CheckRow& row) {
            const auto r = stationary_phase_compare(spec, V);
            scale = std::abs(r.quadrature);
            row.residual = r.relative_error;
        }));
        rows.push_back(detail::run_check("special", "stationary_point_location", params, 1e-6, [&](CheckRow& row) {
            const auto x0 = stationary_point_numeric(spec, V);
            if (!x0) throw StationaryPointOutsideSupport("no sign change of h'");
            row.residual = std::abs(*x0 - stationary_point(spec));
        }));
        rows.push_back(detail::run_check(
            "special", "outside_window_decay", params + " m1 in {3,-3,-p,10p}", 1e-6, [&](CheckRow& row) {
                if (!(scale > 0.0)) throw NumericallyUnstable("in-window scale unavailable");
                for (const i64 m1 : {i64{3}, i64{-3}, -s.p, 10 * s.p}) {
                    OscillatorySpec o = spec;
                    o.m1 = m1;
                    row.residual = std::max(row.residual, std::abs(oscillatory_V_integral(o, V)) / scale);
                }
                row.detail = "relative to |V2+| at m1 = p";
            }));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// eigendata

/// a_l = l - #{(x, y) mod l : y^2 + y = x^3 - x^2 - 10x - 20}, the curve of conductor 11.
inline i64 conductor11_trace(i64 l) {
    i64 count = 0;
    for (i64 x = 0; x < l; ++x) {
        const i64 rhs = mod_floor(x * x % l * x - x * x - 10 * x - 20, l);
        for (i64 y = 0; y < l; ++y)
            if ((y * y + y) % l == rhs) ++count;
    }
    return l - count;
}

inline CheckRow check_point_count_oracle(i64 l_max = 50) {
    return detail::run_check("eigendata", "point_count_oracle", "q=11 primes l<=" + std::to_string(l_max), 0.5,
                             [&](CheckRow& row) {
                                 const auto forms = newform_eigendata(11, std::max<i64>(l_max, 30));
                                 if (forms.size() != 1) throw InvariantViolation("dimension", 11, "expected one newform");
                                 if (!forms[0].integral()) throw InvariantViolation("integral", 11);
                                 for (const i64 l : primes_up_to(l_max)) {
                                     const double d = std::abs(forms[0].a[static_cast<std::size_t>(l)] -
                                                               double(conductor11_trace(l)));
                                     row.residual = std::max(row.residual, d);
                                 }
                                 row.detail = "exact integer match required";
                             });
}

inline std::vector<CheckRow> check_eigendata_batteries(const std::vector<i64>& levels = {11, 23, 37}, i64 n_max = 1000) {
    std::vector<CheckRow> rows;
    for (const i64 q : levels) {
        std::vector<NewformEigendata> forms;
        const std::string params = "q=" + std::to_string(q) + " n<=" + std::to_string(n_max);
        rows.push_back(detail::run_check("eigendata", "invariant_battery", params, 0.5, [&](CheckRow& row) {
            forms = newform_eigendata(q, n_max);
            for (const auto& f : forms) validate(f);
            row.residual = std::abs(double(forms.size()) - double(genus_x0(q)));
            row.detail = std::to_string(forms.size()) + " forms; dim vs genus";
        }));
        rows.push_back(detail::run_check("eigendata", "level_eigenvalue", "q=" + std::to_string(q), 1e-8, [&](CheckRow& row) {
            if (forms.empty()) throw EmptySpace("no forms computed");
            for (const auto& f : forms)
                row.residual = std::max(row.residual, std::abs(std::abs(f(q)) - 1.0 / std::sqrt(double(q))));
        }));
    }
    return rows;
}

inline CheckRow check_ingested_eigendata(const std::string& path) {
    return detail::run_check("eigendata", "ingest", path, 0.5, [&](CheckRow& row) {
        const auto forms = ingest_eigendata(path);
        row.detail = std::to_string(forms.size()) + " forms";
    });
}

// ---------------------------------------------------------------------------
// Petersson

struct PeterssonLevelSetup {
    i64 q;
    std::vector<std::pair<i64, i64>> held_out;
    i64 c_max;
};

inline std::vector<std::pair<i64, i64>> default_held_out(i64 q) {
    if (q == 11) return {{1, 2}, {2, 3}, {2, 5}, {3, 5}};
    return {{2, 3}, {2, 5}, {3, 5}, {1, 7}};
}

inline std::vector<CheckRow> check_petersson_level(const PeterssonLevelSetup& s, double budget) {
    std::vector<CheckRow> rows;
    std::string pairs;
    for (const auto& [m, n] : s.held_out) pairs += "(" + std::to_string(m) + "," + std::to_string(n) + ")";
    const std::string params = "q=" + std::to_string(s.q) + " k=2 c_max=" + std::to_string(s.c_max);
    std::optional<PeterssonVerification> v;
    rows.push_back(detail::run_check("petersson", "harmonic_weights_positive", params, 0.5, [&](CheckRow& row) {
        const auto forms = newform_eigendata(s.q, 60);
        v = verify_petersson(forms, s.q, 2, default_probes(forms.size(), s.q), s.held_out, s.c_max);
        std::ostringstream os;
        os.precision(10);
        os << "omega=";
        for (const double w : v->weights.omega) os << ' ' << w;
        os << "; L(1,sym2)=";
        for (const double l : v->weights.implied_symmetric_square()) os << ' ' << l;
        os << "; cond=" << v->weights.condition;
        row.detail = os.str();
        // weights_from_geometric throws NonPositiveWeight otherwise
        row.residual = 0.0;
    }));
    rows.push_back(detail::run_check("petersson", "held_out_trace_residual", params + " pairs " + pairs, budget,
                                     [&](CheckRow& row) {
                                         if (!v) throw NumericallyUnstable("weights unavailable");
                                         row.residual = v->max_residual;
                                         double emp = 0.0;
                                         for (const auto& t : v->held_out) emp = std::max(emp, t.empirical_tail);
                                         row.detail = "max empirical tail " + format_number(emp);
                                     }));
    return rows;
}

struct DualSetup {
    i64 q;
    i64 p;
    double N;
};

inline std::vector<CheckRow> check_dual_moment(const std::vector<DualSetup>& setups, i64 weight_c_max, i64 dual_c_max) {
    std::vector<CheckRow> rows;
    std::map<i64, std::pair<std::vector<NewformEigendata>, HarmonicWeights>> cache;
    for (const auto& s : setups) {
        const std::string params = "q=" + std::to_string(s.q) + " p=" + std::to_string(s.p) + " N=" + format_number(s.N) +
                                   " c_max=" + std::to_string(dual_c_max) + " all primitive chi";
        rows.push_back(detail::run_check("petersson", "dual_moment_check", params, 1e-4, [&](CheckRow& row) {
            auto it = cache.find(s.q);
            if (it == cache.end()) {
                auto forms = newform_eigendata(s.q, std::max<i64>(60, static_cast<i64>(2.0 * s.N) + 1));
                auto w = solve_harmonic_weights(forms, s.q, 2, default_probes(forms.size(), s.q), weight_c_max);
                it = cache.emplace(s.q, std::make_pair(std::move(forms), std::move(w))).first;
            }
            const auto& [forms, w] = it->second;
            double rel = 0.0;
            for (const auto& chi : characters_mod(s.p)) {
                const auto d = dual_moment_check(forms, w, chi, s.N, dyadic_afe_cutoff(2), dual_c_max);
                row.residual = std::max(row.residual, d.residual / std::max(1.0, d.spectral));
                rel = std::max(rel, d.residual / std::max(d.spectral, 1e-300));
            }
            row.detail = "relative to spectral " + format_number(rel);
        }));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// L-functions

inline std::vector<CheckRow> check_root_numbers(const std::vector<i64>& levels = {11, 23},
                                                const std::vector<i64>& moduli = {3, 5, 7, 13}) {
    std::vector<CheckRow> rows;
    const std::string params = "q in {" + detail::join_ints(levels) + "} p in {" + detail::join_ints(moduli) + "}";
    std::vector<std::pair<NewformEigendata, DirichletCharacter>> cases;
    auto collect = [&] {
        if (!cases.empty()) return;
        const i64 p_max = *std::max_element(moduli.begin(), moduli.end());
        for (const i64 q : levels)
            for (const auto& f : newform_eigendata(q, required_n_max(q, p_max, 2, 2.0)))
                for (const i64 p : moduli)
                    for (const auto& chi : characters_mod(p)) cases.emplace_back(f, chi);
    };
    rows.push_back(detail::run_check("lfunctions", "root_number_modulus", params, 1e-6, [&](CheckRow& row) {
        collect();
        for (const auto& [f, chi] : cases) row.residual = std::max(row.residual, std::abs(std::abs(root_number(f, chi)) - 1.0));
        row.detail = std::to_string(cases.size()) + " (f, chi) pairs";
    }));
    rows.push_back(detail::run_check("lfunctions", "root_number_third_balance", params, 1e-6, [&](CheckRow& row) {
        collect();
        for (const auto& [f, chi] : cases) row.residual = std::max(row.residual, root_number_consistency(f, chi));
    }));
    rows.push_back(detail::run_check("lfunctions", "root_number_conjugation", params, 1e-6, [&](CheckRow& row) {
        collect();
        for (const auto& [f, chi] : cases)
            row.residual = std::max(row.residual, std::abs(root_number(f, chi.conj()) - std::conj(root_number(f, chi))));
    }));
    rows.push_back(detail::run_check("lfunctions", "root_number_closed_form", params, 1e-6, [&](CheckRow& row) {
        collect();
        for (const auto& [f, chi] : cases)
            row.residual = std::max(row.residual, std::abs(root_number(f, chi) - root_number_candidate(f, chi)));
        row.detail = "i^k * fricke * chi(q) tau(chi)^2 / p against the two-point solve";
    }));
    return rows;
}

inline std::vector<CheckRow> check_central_values(i64 q = 11, i64 p = 3) {
    std::vector<CheckRow> rows;
    const std::string params = "q=" + std::to_string(q) + " p=" + std::to_string(p);
    std::vector<NewformEigendata> forms;
    auto load = [&] {
        if (forms.empty()) forms = newform_eigendata(q, required_n_max(q, p, 2, 2.0));
    };
    rows.push_back(detail::run_check("lfunctions", "afe_length_doubling", params, 1e-6, [&](CheckRow& row) {
        load();
        for (const auto& f : forms)
            for (const auto& chi : characters_mod(p))
                row.residual =
                    std::max(row.residual, std::abs(central_value(f, chi, 1.0).value - central_value(f, chi, 2.0).value));
    }));
    rows.push_back(detail::run_check("lfunctions", "conjugate_modulus", params, 1e-8, [&](CheckRow& row) {
        load();
        for (const auto& f : forms)
            for (const auto& chi : characters_mod(p))
                row.residual = std::max(row.residual, std::abs(std::abs(central_value(f, chi).value) -
                                                               std::abs(central_value(f, chi.conj()).value)));
    }));
    rows.push_back(detail::run_check("lfunctions", "functional_equation_swap", params, 1e-6, [&](CheckRow& row) {
        // the value at conj(chi), with its own solved eps, is the conjugate
        load();
        for (const auto& f : forms)
            for (const auto& chi : characters_mod(p)) {
                const cplx L = central_value(f, chi).value;
                row.residual = std::max(row.residual, std::abs(central_value(f, chi.conj()).value - std::conj(L)));
            }
    }));
    rows.push_back(detail::run_check("lfunctions", "moment_nonnegative", params + " all primitive chi", 0.5,
                                     [&](CheckRow& row) {
                                         load();
                                         for (const auto& chi : characters_mod(p)) {
                                             const auto m = twisted_moment(forms, chi, Weighting::natural);
                                             if (m.moment < 0.0) row.residual = 1.0;
                                             if (m.dim != static_cast<std::size_t>(genus_x0(q))) row.residual = 1.0;
                                         }
                                     }));
    return rows;
}

// ---------------------------------------------------------------------------
// suites

inline const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> names{"characters", "exp-sums", "special", "petersson", "lfunctions"};
    return names;
}

struct VerifyReport {
    std::vector<CheckRow> rows;
    SignConventions conventions;

    bool ok() const {
        return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
    }
    const CheckRow* first_failure() const {
        for (const auto& r : rows)
            if (!r.pass) return &r;
        return nullptr;
    }
};

inline std::vector<CheckRow> run_suite(const std::string& suite, const VerifyOptions& opt) {
    std::vector<CheckRow> rows;
    auto add = [&](std::vector<CheckRow> more) { rows.insert(rows.end(), more.begin(), more.end()); };
    if (suite == "characters") {
        rows.push_back(check_gauss_sums());
        rows.push_back(check_character_orthogonality());
    } else if (suite == "exp-sums") {
        rows.push_back(check_twisted_sum_grid());
        rows.push_back(check_reciprocity(100, opt.seed));
        rows.push_back(check_poisson_n2_grid());
        rows.push_back(check_weil_bound(500, 200, opt.seed));
        rows.push_back(check_kloosterman_table());
        rows.push_back(check_poisson_summation());
    } else if (suite == "special") {
        rows.push_back(check_weight_V());
        rows.push_back(check_weight_V_k2());
        rows.push_back(check_bessel_crossover());
        rows.push_back(check_bessel_envelopes());
        rows.push_back(check_bessel_reference());
        add(check_stationary_phase());
    } else if (suite == "petersson") {
        rows.push_back(check_point_count_oracle());
        add(check_eigendata_batteries());
        for (const i64 q : {11, 23, 37})
            add(check_petersson_level({q, default_held_out(q), opt.petersson_c_max}, opt.petersson_budget));
        add(check_dual_moment({{11, 3, 10.0}, {11, 5, 20.0}}, opt.petersson_c_max, opt.dual_c_max));
    } else if (suite == "lfunctions") {
        add(check_root_numbers());
        add(check_central_values());
    } else {
        throw ConfigError("unknown verify suite '" + suite + "'");
    }
    return rows;
}

inline VerifyReport run_verify(const std::string& suite, const VerifyOptions& opt = {},
                               const std::function<void(const CheckRow&)>& on_row = {}) {
    VerifyReport rep;
    std::vector<std::string> suites;
    if (suite == "all") suites = verify_suites();
    else if (std::find(verify_suites().begin(), verify_suites().end(), suite) != verify_suites().end()) suites = {suite};
    else throw ConfigError("unknown verify suite '" + suite + "'");
    rep.conventions = resolve_sign_conventions();
    if (!opt.eigendata_path.empty()) {
        rep.rows.push_back(check_ingested_eigendata(opt.eigendata_path));
        if (on_row) on_row(rep.rows.back());
    }
    for (const auto& s : suites)
        for (auto& r : run_suite(s, opt)) {
            if (on_row) on_row(r);
            rep.rows.push_back(std::move(r));
        }
    return rep;
}

inline void write_verify_csv(std::ostream& os, const VerifyReport& rep) {
    os << "# sign_conventions twisted_sum=" << to_string(rep.conventions.twisted_sum)
       << " poisson_n2=" << to_string(rep.conventions.poisson_n2)
       << " congruence_sign=" << (rep.conventions.poisson_n2_sign > 0 ? "+1" : "-1") << '\n';
    os << "suite,identity,parameters,residual,budget,status,detail\n";
    for (const auto& r : rep.rows)
        os << r.suite << ',' << r.identity << ',' << csv_field(r.parameters) << ',' << format_number(r.residual) << ','
           << format_number(r.budget) << ',' << (r.pass ? "pass" : "FAIL") << ',' << csv_field(r.detail) << '\n';
}

}  // namespace twistl
