#pragma once

// Petersson trace formula at prime level q and even weight k:
//     sum_f w_f lambda_f(m) lambda_f(n)
//         = delta(m = n) + 2 pi i^-k sum_{c >= 1} S(m, n; cq)/(cq) J_{k-1}(4 pi sqrt(mn)/(cq)).
// The c-sum is truncated at c_max; the harmonic weights w_f are solved from
// the formula at a few probe indices and the rest of the formula is then a
// held-out check.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twistl/arith.hpp"
#include "twistl/eigendata.hpp"
#include "twistl/errors.hpp"
#include "twistl/kloosterman.hpp"
#include "twistl/special_functions.hpp"

namespace twistl {

struct GeometricSideValue {
    i64 m;
    i64 n;
    i64 q;
    int k;
    i64 c_max;
    double value;
    double tail_bound;      // rigorous: Weil bound times the Bessel envelope
    double empirical_tail;  // |partial sum at c_max - partial sum at c_max/2|
};

/// Dimension of S_k(1); nonzero means oldforms at level q.
inline int level_one_cusp_dimension(int k) {
    if (k < 2 || k % 2 != 0) throw DomainError("weight must be even and >= 2");
    const int base = k / 12;
    return (k % 12 == 2) ? base - 1 + (k == 2 ? 1 : 0) : base;
}

namespace detail {

inline void require_petersson_inputs(i64 m, i64 n, i64 q, int k) {
    if (m < 1 || n < 1) throw DomainError("geometric_side: m and n must be positive");
    if (!is_prime(q)) throw DomainError("geometric_side: q must be prime");
    if (k < 2 || k % 2 != 0) throw DomainError("geometric_side: k must be even and >= 2");
    if (level_one_cusp_dimension(k) != 0)
        throw DomainError("geometric_side: S_k(1) is nonzero at k = " + std::to_string(k) +
                          ", so level q has oldforms outside the newform basis");
}

inline double i_pow_minus_k(int k) { return (k / 2) % 2 == 0 ? 1.0 : -1.0; }

}  // namespace detail

/// Bound on the dropped terms c > C, from
///   |S(m,n;cq)| <= tau(cq) sqrt(gcd(m,n,cq)) sqrt(cq),  tau(cq) <= 2 tau(c),
///   |J_v(x)| <= (x/2)^v / v!,
///   sum_{c > C} tau(c) c^-s <= s C^(1-s) [(log C + 1)/(s-1) + 1/(s-1)^2],
/// the last by partial summation with sum_{c <= x} tau(c) <= x (log x + 1).
inline double petersson_tail_bound(i64 m, i64 n, i64 q, int k, i64 C) {
    if (C < 1) throw DomainError("petersson_tail_bound: C must be >= 1");
    const double nu = k - 1;
    const double s = nu + 0.5;
    const double g = static_cast<double>(std::gcd(m, n));
    const double qd = static_cast<double>(q);
    const double x_unit = 2.0 * std::numbers::pi * std::sqrt(static_cast<double>(m) * static_cast<double>(n)) / qd;
    const double A = 2.0 * std::numbers::pi * 2.0 * std::sqrt(g) / std::sqrt(qd) *
                     std::exp(nu * std::log(x_unit) - std::lgamma(nu + 1.0));
    const double Cd = static_cast<double>(C);
    const double tail = s * std::pow(Cd, 1.0 - s) * ((std::log(Cd) + 1.0) / (s - 1.0) + 1.0 / ((s - 1.0) * (s - 1.0)));
    return A * tail;
}

/// Smallest power-of-two multiple of 64 with tail bound below tol, up to limit.
inline i64 certified_c_max(i64 m, i64 n, i64 q, int k, double tol = 1e-8, i64 limit = 1'000'000) {
    detail::require_petersson_inputs(m, n, q, k);
    for (i64 C = 64; C <= limit; C *= 2)
        if (petersson_tail_bound(m, n, q, k, C) < tol) return C;
    if (petersson_tail_bound(m, n, q, k, limit) < tol) return limit;
    throw TailBudgetExceeded("geometric_side: tail bound at c_max = " + std::to_string(limit) + " is " +
                             std::to_string(petersson_tail_bound(m, n, q, k, limit)) + ", above " +
                             std::to_string(tol));
}

/// Geometric side for several (m, n) at once, sharing one Kloosterman table.
inline std::vector<GeometricSideValue> geometric_side_batch(i64 q, int k, const std::vector<KloostermanTarget>& targets,
                                                            i64 c_max) {
    for (const auto& t : targets) detail::require_petersson_inputs(t.m, t.n, q, k);
    if (c_max < 2) throw DomainError("geometric_side: c_max must be >= 2");
    const std::size_t J = targets.size();
    std::vector<GeometricSideValue> out(J);
    if (J == 0) return out;
    const KloostermanTable table(q, targets, c_max);
    const double pref = 2.0 * std::numbers::pi * detail::i_pow_minus_k(k);
    for (std::size_t j = 0; j < J; ++j) {
        const auto [m, n] = targets[j];
        const double root = 4.0 * std::numbers::pi * std::sqrt(static_cast<double>(m) * static_cast<double>(n));
        // small terms are added first-to-last in blocks to limit drift
        double sum = 0.0, half = 0.0;
        for (i64 c = 1; c <= c_max; ++c) {
            const double cq = static_cast<double>(c * q);
            sum += table.value(c, j) / cq * bessel_J(k - 1, root / cq);
            if (c == c_max / 2) half = sum;
        }
        const double delta = (m == n) ? 1.0 : 0.0;
        out[j] = {m, n, q, k, c_max, delta + pref * sum, petersson_tail_bound(m, n, q, k, c_max),
                  std::abs(pref * (sum - half))};
    }
    return out;
}

inline GeometricSideValue geometric_side(i64 m, i64 n, i64 q, int k, i64 c_max) {
    return geometric_side_batch(q, k, {{m, n}}, c_max).front();
}

/// geometric_side with c_max chosen so the rigorous tail bound is below tol.
inline GeometricSideValue geometric_side_certified(i64 m, i64 n, i64 q, int k, double tol = 1e-8) {
    return geometric_side(m, n, q, k, certified_c_max(m, n, q, k, tol));
}

struct HarmonicWeights {
    i64 q = 0;
    int k = 2;
    std::vector<double> omega;
    std::vector<i64> probes;
    double condition = 0.0;  // 2-norm condition number of the eigenvalue matrix
    i64 c_max = 0;
    double probe_tail = 0.0;  // largest empirical tail among the probe equations

    /// L(1, sym^2 f) implied by w_f = 2 pi^2 / (q (k-1) L(1, sym^2 f)).
    std::vector<double> implied_symmetric_square() const {
        std::vector<double> out;
        for (const double w : omega)
            out.push_back(2.0 * std::numbers::pi * std::numbers::pi / (static_cast<double>(q) * (k - 1) * w));
        return out;
    }
};

/// The first |forms| integers among 1 and the primes not dividing q.
inline std::vector<i64> default_probes(std::size_t count, i64 q) {
    std::vector<i64> out;
    if (count == 0) return out;
    out.push_back(1);
    for (i64 l = 2; out.size() < count; ++l)
        if (is_prime(l) && l != q) out.push_back(l);
    return out;
}

inline constexpr i64 default_petersson_c_max = 300'000;

namespace detail {

inline void require_weight_inputs(const std::vector<NewformEigendata>& forms, i64 q, int k, const std::vector<i64>& probes) {
    if (forms.empty()) throw DomainError("solve_harmonic_weights: no forms");
    if (probes.size() != forms.size()) throw DomainError("solve_harmonic_weights: need one probe per form");
    for (const auto& f : forms)
        if (f.level != q || f.weight != k) throw DomainError("solve_harmonic_weights: form level or weight mismatch");
    for (const i64 n : probes)
        if (n < 1 || std::gcd(n, q) != 1) throw DomainError("solve_harmonic_weights: probes must be coprime to q");
}

// Weights from geometric values at the probes, geo[j] = Delta(probes[j], 1).
inline HarmonicWeights weights_from_geometric(const std::vector<NewformEigendata>& forms, i64 q, int k,
                                              const std::vector<i64>& probes,
                                              const std::vector<GeometricSideValue>& geo, i64 c_max) {
    const auto F = static_cast<Eigen::Index>(forms.size());
    Eigen::MatrixXd A(F, F);
    for (Eigen::Index j = 0; j < F; ++j)
        for (Eigen::Index f = 0; f < F; ++f) A(j, f) = forms[static_cast<std::size_t>(f)](probes[static_cast<std::size_t>(j)]);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto sv = svd.singularValues();
    const double cond = sv[F - 1] > 0.0 ? sv[0] / sv[F - 1] : std::numeric_limits<double>::infinity();
    if (!(cond < 1e6)) throw IllConditioned("solve_harmonic_weights: condition number " + std::to_string(cond));
    Eigen::VectorXd b(F);
    double tail = 0.0;
    for (Eigen::Index j = 0; j < F; ++j) {
        b[j] = geo[static_cast<std::size_t>(j)].value;
        tail = std::max(tail, geo[static_cast<std::size_t>(j)].empirical_tail);
    }
    const Eigen::VectorXd w = A.fullPivLu().solve(b);

    HarmonicWeights out;
    out.q = q;
    out.k = k;
    out.probes = probes;
    out.condition = cond;
    out.c_max = c_max;
    out.probe_tail = tail;
    for (Eigen::Index f = 0; f < F; ++f) {
        if (!(w[f] > 0.0))
            throw NonPositiveWeight("solve_harmonic_weights: weight of form " + std::to_string(f) + " is " +
                                    std::to_string(w[f]));
        out.omega.push_back(w[f]);
    }
    return out;
}

}  // namespace detail

/// Solves sum_f w_f lambda_f(n_j) = Delta(n_j, 1) for the weights.
inline HarmonicWeights solve_harmonic_weights(const std::vector<NewformEigendata>& forms, i64 q, int k,
                                              const std::vector<i64>& probes, i64 c_max = default_petersson_c_max) {
    detail::require_weight_inputs(forms, q, k, probes);
    std::vector<KloostermanTarget> targets;
    for (const i64 n : probes) targets.push_back({n, 1});
    return detail::weights_from_geometric(forms, q, k, probes, geometric_side_batch(q, k, targets, c_max), c_max);
}

inline double spectral_side(const HarmonicWeights& w, const std::vector<NewformEigendata>& forms, i64 m, i64 n) {
    double s = 0.0;
    for (std::size_t f = 0; f < forms.size(); ++f) s += w.omega[f] * forms[f](m) * forms[f](n);
    return s;
}

struct TraceResidual {
    i64 m;
    i64 n;
    double spectral;
    double geometric;
    double residual;
    double empirical_tail;
};

inline std::vector<TraceResidual> trace_residuals(const HarmonicWeights& w, const std::vector<NewformEigendata>& forms,
                                                  const std::vector<std::pair<i64, i64>>& pairs, i64 c_max = 0) {
    if (c_max == 0) c_max = w.c_max;
    std::vector<KloostermanTarget> targets;
    for (const auto& [m, n] : pairs) {
        for (const i64 j : w.probes)
            if ((m == j && n == 1) || (m == 1 && n == j))
                throw DomainError("trace_residual: pair (" + std::to_string(m) + "," + std::to_string(n) +
                                  ") is a probe equation");
        targets.push_back({m, n});
    }
    const auto geo = geometric_side_batch(w.q, w.k, targets, c_max);
    std::vector<TraceResidual> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double spec = spectral_side(w, forms, pairs[i].first, pairs[i].second);
        out.push_back({pairs[i].first, pairs[i].second, spec, geo[i].value, std::abs(spec - geo[i].value),
                       geo[i].empirical_tail});
    }
    return out;
}

/// Largest |spectral - geometric| over held-out pairs.
inline double trace_residual(const HarmonicWeights& w, const std::vector<NewformEigendata>& forms,
                             const std::vector<std::pair<i64, i64>>& pairs, i64 c_max = 0) {
    double r = 0.0;
    for (const auto& t : trace_residuals(w, forms, pairs, c_max)) r = std::max(r, t.residual);
    return r;
}

struct PeterssonVerification {
    HarmonicWeights weights;
    std::vector<TraceResidual> held_out;
    double max_residual = 0.0;
};

/// Weights and held-out residuals from a single Kloosterman table.
inline PeterssonVerification verify_petersson(const std::vector<NewformEigendata>& forms, i64 q, int k,
                                              const std::vector<i64>& probes,
                                              const std::vector<std::pair<i64, i64>>& pairs,
                                              i64 c_max = default_petersson_c_max) {
    detail::require_weight_inputs(forms, q, k, probes);
    std::vector<KloostermanTarget> targets;
    for (const i64 n : probes) targets.push_back({n, 1});
    for (const auto& [m, n] : pairs) {
        for (const i64 j : probes)
            if ((m == j && n == 1) || (m == 1 && n == j))
                throw DomainError("verify_petersson: pair (" + std::to_string(m) + "," + std::to_string(n) +
                                  ") is a probe equation");
        targets.push_back({m, n});
    }
    const auto geo = geometric_side_batch(q, k, targets, c_max);
    PeterssonVerification out;
    out.weights = detail::weights_from_geometric(
        forms, q, k, probes, std::vector<GeometricSideValue>(geo.begin(), geo.begin() + static_cast<std::ptrdiff_t>(probes.size())),
        c_max);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& g = geo[probes.size() + i];
        const double spec = spectral_side(out.weights, forms, pairs[i].first, pairs[i].second);
        out.held_out.push_back({pairs[i].first, pairs[i].second, spec, g.value, std::abs(spec - g.value), g.empirical_tail});
        out.max_residual = std::max(out.max_residual, std::abs(spec - g.value));
    }
    return out;
}

}  // namespace twistl
