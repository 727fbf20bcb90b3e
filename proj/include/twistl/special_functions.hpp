#pragma once

// The approximate-functional-equation weight
//     V(x) = (1/2 pi i) int_(sigma) (2 pi x)^(-u) Gamma(k/2 + u)/Gamma(k/2) du/u
// and the Bessel function J_n for integer order.
//
// Shifting the contour left picks up residues at u = 0, -1, ..., which gives
// the normalized upper incomplete gamma Q(k/2, 2 pi x); for even k that is a
// finite sum. The contour integral itself is kept as an independent oracle.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "twistl/errors.hpp"
#include "twistl/quadrature.hpp"

namespace twistl {

namespace detail {

inline void require_even_weight(int k) {
    if (k < 2 || k % 2 != 0) throw DomainError("weight must be an even integer >= 2");
}

}  // namespace detail

/// Q(k/2, 2 pi x) = e^{-y} sum_{j < k/2} y^j / j!, y = 2 pi x.
inline double weight_V(int k, double x) {
    detail::require_even_weight(k);
    if (!(x > 0.0)) throw DomainError("weight_V: x must be positive");
    const double y = 2.0 * std::numbers::pi * x;
    double term = 1.0, sum = 1.0;
    for (int j = 1; j < k / 2; ++j) {
        term *= y / j;
        sum += term;
    }
    return std::exp(-y) * sum;
}

/// log Gamma(z) for Re z > 0 (Lanczos, g = 7, n = 9).
inline std::complex<double> lgamma_complex(std::complex<double> z) {
    static constexpr double coef[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                       771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                       -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.real() < 0.5) {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * z)) - lgamma_complex(1.0 - z);
    }
    z -= 1.0;
    std::complex<double> x = coef[0];
    for (int i = 1; i < 9; ++i) x += coef[i] / (z + static_cast<double>(i));
    const std::complex<double> t = z + 7.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

/// V(x) by quadrature along Re u = sigma, |Im u| <= T.
inline double weight_V_oracle(int k, double x, double sigma, double T) {
    detail::require_even_weight(k);
    if (!(x > 0.0)) throw DomainError("weight_V_oracle: x must be positive");
    if (!(sigma > 0.0)) throw DomainError("weight_V_oracle: sigma must be positive");
    if (!(T > 0.0)) throw DomainError("weight_V_oracle: T must be positive");
    const double half_k = 0.5 * k;
    const double log_gamma_k = std::lgamma(half_k);
    const double log_y = std::log(2.0 * std::numbers::pi * x);
    auto integrand = [&](double t) {
        const std::complex<double> u(sigma, t);
        const std::complex<double> lg = lgamma_complex(half_k + u) - log_gamma_k - u * log_y;
        return (std::exp(lg) / u).real();
    };
    const double edge = std::abs(integrand(T)) + std::abs(integrand(0.9 * T));
    if (edge > 1e-13) throw DomainError("weight_V_oracle: T too small, integrand still " + std::to_string(edge));
    // the integrand is conjugate-symmetric in t, so fold onto [0, T]
    QuadratureOptions opt;
    opt.abs_tol = 1e-13;
    opt.max_panel_width = 1.0;
    return integrate<double>(integrand, 0.0, T, opt).value / std::numbers::pi;
}

// ---------------------------------------------------------------------------
// Bessel J_n, integer n >= 0.

struct BesselSeriesValue {
    double value;
    double tail_bound;  // bound on the dropped terms
    int terms;
};

/// sum_l (-1)^l (x/2)^(n+2l) / (l! (n+l)!), stopped once the rigorous tail
/// bound drops below 1e-17 of the largest term seen.
inline BesselSeriesValue bessel_J_series(int n, double x) {
    if (n < 0) throw DomainError("bessel_J: order must be >= 0");
    if (x < 0.0) throw DomainError("bessel_J: x must be >= 0");
    if (x == 0.0) return {n == 0 ? 1.0 : 0.0, 0.0, 1};
    const double h = 0.5 * x, h2 = h * h;
    // (x/2)^n / n! in log space keeps large n from overflowing
    double term = std::exp(n * std::log(h) - std::lgamma(n + 1.0));
    double sum = term, biggest = std::abs(term);
    int l = 0;
    for (;;) {
        ++l;
        const double ratio = h2 / (static_cast<double>(l) * (n + l));
        term *= -ratio;
        sum += term;
        biggest = std::max(biggest, std::abs(term));
        const double next_ratio = h2 / (static_cast<double>(l + 1) * (n + l + 1));
        if (next_ratio < 1.0) {
            // remaining terms shrink geometrically by at most next_ratio
            const double tail = std::abs(term) * next_ratio / (1.0 - next_ratio);
            if (tail < 1e-17 * biggest || tail < std::numeric_limits<double>::min()) {
                return {sum, tail, l + 1};
            }
        }
        if (l > 10000) throw NumericallyUnstable("bessel_J_series: no convergence");
    }
}

struct HankelValue {
    double value;
    double error;  // size of the first omitted term, scaled
};

/// Large-argument Hankel expansion truncated at its smallest term.
inline HankelValue bessel_J_hankel(int n, double x) {
    const double mu = 4.0 * n * n;
    double a = 1.0;  // a_k(n) / x^k
    double P = 1.0, Q = 0.0;
    double last = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = a * (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(next) >= std::abs(a) && k > 1) break;
        a = next;
        last = std::abs(a);
        // P gets even k with sign (-1)^(k/2), Q odd k with sign (-1)^((k-1)/2)
        if (k % 2 == 0) P += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * a;
        else Q += (((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * a;
        if (last < 1e-17) break;
    }
    const double w = x - (0.5 * n + 0.25) * std::numbers::pi;
    const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
    return {amp * (P * std::cos(w) - Q * std::sin(w)), amp * last};
}

/// Bessel's integral (1/2 pi) int_0^{2 pi} cos(n t - x sin t) dt by the
/// trapezoid rule; the rule's aliasing error is J_{M-n}(x) + J_{M+n}(x).
inline double bessel_J_integral(int n, double x) {
    const int M = static_cast<int>(std::ceil(n + x + 10.0 * std::cbrt(x) + 40.0));
    double s = 0.0;
    for (int j = 0; j < M; ++j) {
        const double t = 2.0 * std::numbers::pi * j / M;
        s += std::cos(n * t - x * std::sin(t));
    }
    return s / M;
}

/// Large-argument branch: Hankel where its truncation error is below 1e-13,
/// otherwise Bessel's integral.
inline double bessel_J_large(int n, double x) {
    const HankelValue hv = bessel_J_hankel(n, x);
    if (hv.error < 1e-13) return hv.value;
    return bessel_J_integral(n, x);
}

inline constexpr double default_bessel_crossover = 8.0;

/// J_n(x): power series for x <= crossover, large-argument branch beyond.
inline double bessel_J(int n, double x, double crossover = default_bessel_crossover) {
    if (n < 0) throw DomainError("bessel_J: order must be >= 0");
    if (x < 0.0) throw DomainError("bessel_J: x must be >= 0");
    if (x <= crossover) return bessel_J_series(n, x).value;
    return bessel_J_large(n, x);
}

/// |J_n(x)| <= (x/2)^n / n!, valid for all x >= 0 and n >= 0.
inline double bessel_J_envelope(int n, double x) {
    return std::exp(n * std::log(0.5 * x) - std::lgamma(n + 1.0));
}

}  // namespace twistl
