#pragma once

// The x-integrals left after Poisson summation in n1,
//     V1(m1, y)   = int e(-x m1 N / (c p q)) V(x, y) dx,
//     V2+-(m1, y) = int e(+-2 sqrt(x y) N / (c q)) e(-x m1 N / (c p q)) V(x, y) dx,
// their leading-order stationary-phase prediction, and a numerical check of
// Poisson summation over a residue class.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>

#include "twistl/arith.hpp"
#include "twistl/errors.hpp"
#include "twistl/quadrature.hpp"

namespace twistl {

/// Smooth bump on (1/4, 4), symmetric in log x, equal to 1 at x = 1.
inline double log_bump(double x) {
    if (!(x > 0.25 && x < 4.0)) return 0.0;
    const double u = std::log(x) / std::log(4.0);
    const double d = 1.0 - u * u;
    if (d <= 0.0) return 0.0;
    return std::exp(1.0 - 1.0 / d);
}

/// Compactly supported smooth cutoff V(x, y) on the positive quadrant.
struct Cutoff2D {
    std::function<double(double, double)> value;
    double x_lo;
    double x_hi;

    double operator()(double x, double y) const { return value(x, y); }

    static Cutoff2D product_bump() {
        return {[](double x, double y) { return log_bump(x) * log_bump(y); }, 0.25, 4.0};
    }
};

enum class OscillatoryKind { v1, v2 };

struct OscillatorySpec {
    double N;
    i64 c;
    i64 q;
    i64 p;
    i64 m1;
    double y;
    int sign = +1;  // only used by V2
    OscillatoryKind kind = OscillatoryKind::v2;

    double ratio() const { return N / static_cast<double>(c * q); }  // N / (c q)

    void validate() const {
        if (!(N > 0.0)) throw DomainError("OscillatorySpec: N must be positive");
        if (c < 1) throw DomainError("OscillatorySpec: c must be >= 1");
        if (!is_prime(q) || !is_prime(p)) throw DomainError("OscillatorySpec: q and p must be prime");
        if (sign != 1 && sign != -1) throw DomainError("OscillatorySpec: sign must be +1 or -1");
        if (!(y > 0.0)) throw DomainError("OscillatorySpec: y must be positive");
    }

    /// Phase h(x) of the integrand, in radians.
    double phase(double x) const {
        const double Y = ratio(), mp = static_cast<double>(m1) / static_cast<double>(p);
        const double lin = -x * mp * Y;
        if (kind == OscillatoryKind::v1) return two_pi * lin;
        return two_pi * (sign * 2.0 * Y * std::sqrt(x * y) + lin);
    }

    double phase_derivative(double x) const {
        const double Y = ratio(), mp = static_cast<double>(m1) / static_cast<double>(p);
        if (kind == OscillatoryKind::v1) return -two_pi * mp * Y;
        return two_pi * Y * (sign * std::sqrt(y / x) - mp);
    }
};

/// Adaptive quadrature of V1 or V2+-; initial panels span 1.5 of the shortest periods.
inline std::complex<double> oscillatory_V_integral(const OscillatorySpec& spec, const Cutoff2D& V) {
    spec.validate();
    const double lo = V.x_lo, hi = V.x_hi;
    const double Y = spec.ratio();
    const double mp = std::abs(static_cast<double>(spec.m1)) / static_cast<double>(spec.p);
    const double max_freq =
        Y * (mp + (spec.kind == OscillatoryKind::v2 ? std::sqrt(spec.y / lo) : 0.0)) + 1.0;
    double scale = 0.0;
    for (int i = 0; i <= 64; ++i) scale = std::max(scale, std::abs(V(lo + (hi - lo) * i / 64.0, spec.y)));
    QuadratureOptions opt;
    opt.abs_tol = 1e-10 * std::max(scale, 1e-300);
    opt.max_panel_width = 1.5 / max_freq;
    auto f = [&](double x) { return std::polar(V(x, spec.y), spec.phase(x)); };
    return integrate<std::complex<double>>(f, lo, hi, opt).value;
}

struct StationaryPhaseComparison {
    std::complex<double> quadrature;
    std::complex<double> prediction;
    double relative_error;
    double x0;
};

/// x0 = p^2 y / m1^2 from m1 sqrt(x0) = +-p sqrt(y).
inline double stationary_point(const OscillatorySpec& spec) {
    const double r = static_cast<double>(spec.p) / static_cast<double>(spec.m1);
    return r * r * spec.y;
}

/// Root of h' on the cutoff support by bisection, for checking x0.
inline std::optional<double> stationary_point_numeric(const OscillatorySpec& spec, const Cutoff2D& V) {
    double a = V.x_lo, b = V.x_hi;
    double fa = spec.phase_derivative(a), fb = spec.phase_derivative(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = spec.phase_derivative(m);
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

/// Quadrature of V2+- against V(x0, y) sqrt(2 pi / |h''(x0)|) e^{i h(x0) + i sgn(h'') pi/4}.
inline StationaryPhaseComparison stationary_phase_compare(const OscillatorySpec& spec, const Cutoff2D& V) {
    spec.validate();
    if (spec.kind != OscillatoryKind::v2) throw DomainError("stationary_phase_compare: needs a V2 spec");
    if (spec.m1 == 0 || (spec.m1 > 0) != (spec.sign > 0))
        throw StationaryPointOutsideSupport("stationary_phase_compare: sign of m1 admits no stationary point");
    const double x0 = stationary_point(spec);
    if (!(x0 > V.x_lo && x0 < V.x_hi) || V(x0, spec.y) == 0.0)
        throw StationaryPointOutsideSupport("stationary_phase_compare: x0 = " + std::to_string(x0) +
                                            " outside the cutoff support");
    const double Y = spec.ratio();
    const double m = static_cast<double>(spec.m1), p = static_cast<double>(spec.p);
    const double h0 = two_pi * Y * p * spec.y / m;
    const double h2 = -std::numbers::pi * Y * m * m * m / (p * p * p * spec.y);
    const double amp = V(x0, spec.y) * std::sqrt(two_pi / std::abs(h2));
    const std::complex<double> pred = std::polar(amp, h0 + (h2 > 0 ? 1.0 : -1.0) * 0.25 * std::numbers::pi);
    const std::complex<double> quad = oscillatory_V_integral(spec, V);
    return {quad, pred, std::abs(quad - pred) / std::abs(pred), x0};
}

// ---------------------------------------------------------------------------
// Poisson summation over n == a (mod r).

struct SchwartzFunction {
    std::function<double(double)> f;
    /// Fourier transform int f(t) e(-t xi) dt; computed by quadrature when empty.
    std::function<std::complex<double>(double)> transform;
    /// Support for the quadrature fallback (must be finite when transform is empty).
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    std::complex<double> hat(double xi) const {
        if (transform) return transform(xi);
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw DomainError("SchwartzFunction: no transform and no finite support");
        QuadratureOptions opt;
        opt.abs_tol = 1e-14;
        opt.max_panel_width = std::min(hi - lo, 0.25 / (std::abs(xi) + 1.0));
        auto g = [&](double t) { return std::polar(f(t), -two_pi * t * xi); };
        return integrate<std::complex<double>>(g, lo, hi, opt).value;
    }

    static SchwartzFunction gaussian() {
        return {[](double t) { return std::exp(-std::numbers::pi * t * t); },
                [](double xi) { return std::complex<double>(std::exp(-std::numbers::pi * xi * xi), 0.0); }};
    }

    /// exp(1 - 1/(1 - ((t - centre)/radius)^2)) on |t - centre| < radius.
    static SchwartzFunction bump(double centre, double radius) {
        SchwartzFunction s;
        s.f = [=](double t) {
            const double u = (t - centre) / radius;
            const double d = 1.0 - u * u;
            return d > 0.0 ? std::exp(1.0 - 1.0 / d) : 0.0;
        };
        s.lo = centre - radius;
        s.hi = centre + radius;
        return s;
    }
};

struct PoissonCheck {
    std::complex<double> direct;
    std::complex<double> dual;
    double residual;
};

/// |sum_{n == a mod r} psi(n) - (1/r) sum_m e(a m / r) psi^(m / d)| with
/// |n|, |m| <= M. d defaults to r; any other d rescales the transform wrongly.
inline PoissonCheck numeric_poisson_check(const SchwartzFunction& psi, i64 a, i64 r, i64 M, i64 d = 0) {
    if (r < 1) throw DomainError("numeric_poisson_check: r must be >= 1");
    if (M < r) throw TruncationTooSmall("numeric_poisson_check: M must be at least r");
    if (d == 0) d = r;
    const i64 a0 = mod_floor(a, r);
    // decay at the truncation edges
    double edge = 0.0;
    for (i64 n = M - r + 1; n <= M; ++n) edge = std::max({edge, std::abs(psi.f(double(n))), std::abs(psi.f(double(-n)))});
    edge = std::max({edge, std::abs(psi.hat(double(M) / double(d))), std::abs(psi.hat(-double(M) / double(d)))});
    if (edge > 1e-12) throw TruncationTooSmall("numeric_poisson_check: terms at |n| = M are still " + std::to_string(edge));

    std::complex<double> direct{0.0, 0.0}, dual{0.0, 0.0};
    for (i64 n = -M; n <= M; ++n) {
        if (mod_floor(n, r) == a0) direct += psi.f(static_cast<double>(n));
    }
    for (i64 m = -M; m <= M; ++m) dual += unit_phase(mul_mod(a0, m, r), r) * psi.hat(static_cast<double>(m) / double(d));
    dual /= static_cast<double>(r);
    return {direct, dual, std::abs(direct - dual)};
}

}  // namespace twistl
