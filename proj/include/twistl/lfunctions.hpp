#pragma once

// Central values L(1/2, f x chi) for a newform f of prime level q and a
// primitive character chi mod p, q != p. With Q = p sqrt(q), the completed
// function (Q/2pi)^s Gamma(s + (k-1)/2) L(s, f x chi) satisfies a functional
// equation with root number eps, and for every X > 0
//     L(1/2) = sum_n lambda(n) chi(n) n^-1/2 V(n / (Q X))
//            + eps sum_n lambda(n) conj(chi)(n) n^-1/2 V(n X / Q).
// eps is not taken from a formula: two values of X give two equations in the
// unknowns L(1/2) and eps.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "twistl/arith.hpp"
#include "twistl/characters.hpp"
#include "twistl/eigendata.hpp"
#include "twistl/errors.hpp"
#include "twistl/oscillatory.hpp"
#include "twistl/petersson.hpp"
#include "twistl/special_functions.hpp"

namespace twistl {

/// Smallest x (on a 1/64 grid) beyond which V(x) < eps.
inline double weight_V_cutoff(int k, double eps = 1e-12) {
    double x = 1.0 / 64.0;
    while (weight_V(k, x) >= eps) x += 1.0 / 64.0;
    return x;
}

/// p sqrt(q).
inline double analytic_scale(i64 q, i64 p) { return static_cast<double>(p) * std::sqrt(static_cast<double>(q)); }

struct AfeSums {
    cplx first;   // sum lambda chi n^-1/2 V(n/(QX))
    cplx second;  // sum lambda conj(chi) n^-1/2 V(nX/Q)
    i64 length;   // largest n used
};

namespace detail {

inline void require_twist(const NewformEigendata& f, const DirichletCharacter& chi) {
    if (std::gcd(f.level, chi.modulus()) != 1)
        throw DomainError("twist: level " + std::to_string(f.level) + " and modulus " +
                          std::to_string(chi.modulus()) + " must be coprime");
}

// sum_{n <= len} a(n) n^-1/2 V(n / scale)
inline cplx smoothed_sum(const NewformEigendata& f, const DirichletCharacter& chi, bool conjugate, double scale,
                         i64 len) {
    if (len > f.n_max()) throw EigendataTooShort(len, f.n_max());
    cplx s{0.0, 0.0};
    for (i64 n = 1; n <= len; ++n) {
        const cplx c = conjugate ? std::conj(chi(n)) : chi(n);
        if (c == cplx{0.0, 0.0}) continue;
        s += f.lambda[static_cast<std::size_t>(n)] * c * weight_V(f.weight, static_cast<double>(n) / scale) /
             std::sqrt(static_cast<double>(n));
    }
    return s;
}

}  // namespace detail

/// Truncation length for balance parameter X: V is below 1e-12 past it.
inline i64 afe_length(const NewformEigendata& f, const DirichletCharacter& chi, double X, double multiplier = 1.0) {
    const double Q = analytic_scale(f.level, chi.modulus());
    const double reach = weight_V_cutoff(f.weight) * Q * std::max(X, 1.0 / X) * multiplier;
    return static_cast<i64>(std::ceil(reach));
}

inline AfeSums afe_sums(const NewformEigendata& f, const DirichletCharacter& chi, double X, double multiplier = 1.0) {
    detail::require_twist(f, chi);
    if (!(X > 0.0)) throw DomainError("afe: X must be positive");
    const double Q = analytic_scale(f.level, chi.modulus());
    const i64 len = afe_length(f, chi, X, multiplier);
    return {detail::smoothed_sum(f, chi, false, Q * X, len), detail::smoothed_sum(f, chi, true, Q / X, len), len};
}

/// eps from the balance parameters X1 and X2.
inline cplx root_number(const NewformEigendata& f, const DirichletCharacter& chi, double X1 = 1.0, double X2 = 1.2) {
    if (!(std::abs(std::log(X1 / X2)) > 1e-3)) throw SystemSingular("root_number: X1 and X2 too close");
    const AfeSums a = afe_sums(f, chi, X1), b = afe_sums(f, chi, X2);
    const cplx den = a.second - b.second;
    if (std::abs(den) < 1e-10 * std::max(std::abs(a.second), 1.0))
        throw SystemSingular("root_number: the two balance equations are dependent");
    const cplx eps = (b.first - a.first) / den;
    if (std::abs(std::abs(eps) - 1.0) > 1e-4)
        throw NumericallyUnstable("root_number: |eps| = " + std::to_string(std::abs(eps)));
    return eps;
}

/// |L(1/2) at X3 - L(1/2) at X1| with eps from (X1, X2).
inline double root_number_consistency(const NewformEigendata& f, const DirichletCharacter& chi, double X1 = 1.0,
                                      double X2 = 1.2, double X3 = 1.0 / 1.2) {
    const cplx eps = root_number(f, chi, X1, X2);
    const AfeSums a = afe_sums(f, chi, X1), c = afe_sums(f, chi, X3);
    return std::abs((a.first + eps * a.second) - (c.first + eps * c.second));
}

/// Closed-form candidate i^k w chi(q) tau(chi)^2 / p, w the Fricke sign. Only a cross-check.
inline cplx root_number_candidate(const NewformEigendata& f, const DirichletCharacter& chi) {
    const cplx ik = (f.weight / 2) % 2 == 0 ? cplx{1.0, 0.0} : cplx{-1.0, 0.0};
    const cplx tau = gauss_sum(chi).value;
    return ik * static_cast<double>(f.fricke_sign) * chi(f.level) * tau * tau / static_cast<double>(chi.modulus());
}

struct CentralValue {
    int form;
    std::string character;
    cplx value;
    cplx root_number;
    i64 afe_length;
    double error_estimate;
};

/// Bound on the terms past len from |lambda(n)| <= tau(n), both sums.
inline double afe_tail_bound(int k, double scale, i64 len) {
    double s = 0.0;
    for (i64 n = len + 1;; ++n) {
        const double v = weight_V(k, static_cast<double>(n) / scale);
        s += static_cast<double>(divisor_count(n)) * v / std::sqrt(static_cast<double>(n));
        if (v < 1e-20) break;
    }
    return 2.0 * s;
}

inline CentralValue central_value(const NewformEigendata& f, const DirichletCharacter& chi,
                                  double afe_length_multiplier = 1.0) {
    if (!(afe_length_multiplier >= 1.0)) throw DomainError("central_value: length multiplier must be >= 1");
    const cplx eps = root_number(f, chi);
    const AfeSums s = afe_sums(f, chi, 1.0, afe_length_multiplier);
    const double Q = analytic_scale(f.level, chi.modulus());
    return {f.form, chi.label(), s.first + eps * s.second, eps, s.length, afe_tail_bound(f.weight, Q, s.length)};
}

/// n_max that central_value and root_number need for forms of level q twisted mod p.
inline i64 required_n_max(i64 q, i64 p, int k, double multiplier = 1.0) {
    const double Q = analytic_scale(q, p);
    return static_cast<i64>(std::ceil(weight_V_cutoff(k) * Q * 1.2 * std::max(multiplier, 1.0))) + 1;
}

// ---------------------------------------------------------------------------
// Moments over the newforms of level q.

enum class Weighting { natural, harmonic };

inline const char* to_string(Weighting w) { return w == Weighting::natural ? "natural" : "harmonic"; }

struct MomentValue {
    i64 q;
    i64 p;
    int k;
    std::string character;
    double moment;
    Weighting weighting;
    std::size_t dim;
};

/// V(x) of the approximate functional equation restricted to 1/2 < x < 2.
inline std::function<double(double)> dyadic_afe_cutoff(int k) {
    return [k](double x) {
        const double b = log_bump(x * x);
        return b == 0.0 ? 0.0 : weight_V(k, x) * b;
    };
}

/// sum_n chi(n) lambda(n) V(n/N) over the support of the cutoff.
inline cplx smoothed_twisted_sum(const NewformEigendata& f, const DirichletCharacter& chi, double N,
                                 const std::function<double(double)>& cutoff, double support_hi = 2.0) {
    const i64 top = static_cast<i64>(std::floor(support_hi * N));
    if (top > f.n_max()) throw EigendataTooShort(top, f.n_max());
    cplx s{0.0, 0.0};
    for (i64 n = 1; n <= top; ++n) {
        const double v = cutoff(static_cast<double>(n) / N);
        if (v != 0.0) s += chi(n) * f.lambda[static_cast<std::size_t>(n)] * v;
    }
    return s;
}

/// Natural: sum_f |L(1/2, f x chi)|^2. Harmonic: (1/N) sum_f w_f |sum_n chi(n) lambda_f(n) V(n/N)|^2
/// with N = sqrt(q) p and V the dyadic AFE cutoff.
inline MomentValue twisted_moment(const std::vector<NewformEigendata>& forms, const DirichletCharacter& chi,
                                  Weighting weighting, const HarmonicWeights* weights = nullptr,
                                  double afe_length_multiplier = 1.0) {
    if (forms.empty()) throw DomainError("twisted_moment: no forms");
    const i64 q = forms.front().level;
    const int k = forms.front().weight;
    MomentValue out{q, chi.modulus(), k, chi.label(), 0.0, weighting, forms.size()};
    if (weighting == Weighting::natural) {
        for (const auto& f : forms) out.moment += std::norm(central_value(f, chi, afe_length_multiplier).value);
        return out;
    }
    if (weights == nullptr || weights->omega.size() != forms.size())
        throw DomainError("twisted_moment: harmonic weighting needs one weight per form");
    const double N = analytic_scale(q, chi.modulus());
    const auto V = dyadic_afe_cutoff(k);
    for (std::size_t i = 0; i < forms.size(); ++i)
        out.moment += weights->omega[i] * std::norm(smoothed_twisted_sum(forms[i], chi, N, V));
    out.moment /= N;
    return out;
}

struct DualMomentCheck {
    double spectral;
    double geometric;
    double diagonal;
    double residual;
    double tail_bound;      // rigorous bound on the dropped c-terms
    double empirical_tail;  // change between c_max/2 and c_max
    i64 c_max;
};

inline constexpr i64 default_dual_c_max = 20'000;

/// Spectral side (1/N) sum_f w_f |sum_n chi(n) lambda_f(n) V(n/N)|^2 against the
/// Petersson expansion (1/N) sum_{n1,n2} chi(n1) conj(chi)(n2) V V Delta(n1, n2),
/// the Bessel argument being the exact 4 pi sqrt(n1 n2)/(cq).
inline DualMomentCheck dual_moment_check(const std::vector<NewformEigendata>& forms, const HarmonicWeights& weights,
                                         const DirichletCharacter& chi, double N,
                                         const std::function<double(double)>& cutoff, i64 c_max = default_dual_c_max,
                                         double certify_tolerance = 0.0) {
    if (forms.empty()) throw DomainError("dual_moment_check: no forms");
    if (!(N > 0.0)) throw DomainError("dual_moment_check: N must be positive");
    const i64 q = forms.front().level;
    const int k = forms.front().weight;
    if (weights.omega.size() != forms.size()) throw DomainError("dual_moment_check: one weight per form");
    if (std::gcd(q, chi.modulus()) != 1) throw DomainError("dual_moment_check: q and p must be coprime");

    std::vector<i64> ns;
    std::vector<double> vs;
    const i64 top = static_cast<i64>(std::floor(2.0 * N));
    for (i64 n = 1; n <= top; ++n) {
        const double v = cutoff(static_cast<double>(n) / N);
        if (v != 0.0 && chi(n) != cplx{0.0, 0.0}) {
            ns.push_back(n);
            vs.push_back(v);
        }
    }

    double spectral = 0.0;
    for (std::size_t f = 0; f < forms.size(); ++f) {
        cplx s{0.0, 0.0};
        for (std::size_t i = 0; i < ns.size(); ++i) s += chi(ns[i]) * forms[f](ns[i]) * vs[i];
        spectral += weights.omega[f] * std::norm(s);
    }
    spectral /= N;

    std::vector<KloostermanTarget> targets;
    std::vector<double> coef;  // real part of chi(n1) conj(chi)(n2) V V, doubled off the diagonal
    double diagonal = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        diagonal += std::norm(chi(ns[i])) * vs[i] * vs[i];
        for (std::size_t j = i; j < ns.size(); ++j) {
            const cplx c = chi(ns[i]) * std::conj(chi(ns[j])) * vs[i] * vs[j];
            targets.push_back({ns[i], ns[j]});
            coef.push_back(i == j ? c.real() : 2.0 * c.real());
        }
    }
    diagonal /= N;
    double tail = 0.0;
    for (std::size_t t = 0; t < targets.size(); ++t)
        tail += std::abs(coef[t]) * petersson_tail_bound(targets[t].m, targets[t].n, q, k, c_max);
    tail /= N;
    if (certify_tolerance > 0.0 && tail > certify_tolerance)
        throw TailBudgetExceeded("dual_moment_check: tail bound " + std::to_string(tail) + " above " +
                                 std::to_string(certify_tolerance));

    const auto geo = geometric_side_batch(q, k, targets, c_max);
    double geometric = 0.0, emp = 0.0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        geometric += coef[t] * geo[t].value;
        emp += std::abs(coef[t]) * geo[t].empirical_tail;
    }
    geometric /= N;
    emp /= N;
    return {spectral, geometric, diagonal, std::abs(spectral - geometric), tail, emp, c_max};
}

}  // namespace twistl
