#pragma once

// Adaptive Gauss-Kronrod (7, 15) quadrature. The interval is first cut into
// panels no wider than the caller's oscillation scale, then the panel with the
// largest error estimate is bisected until the total estimate meets the
// tolerance or the panel budget runs out.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <string>
#include <vector>

#include "twistl/errors.hpp"

namespace twistl {

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 0.0;
    double max_panel_width = 0.0;  // <= 0 means one initial panel
    std::size_t panel_budget = std::size_t{1} << 18;
};

template <typename T>
struct QuadratureResult {
    T value;
    double error;
    std::size_t panels;
};

namespace detail {

inline constexpr std::array<double, 8> gk15_nodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk15_weights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss 7-point weights on the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> g7_weights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <typename T, typename F>
struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename T, typename F>
Panel<T, F> gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const T fc = f(c);
    T kron = fc * gk15_weights[7];
    T gauss = fc * g7_weights[3];
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = h * gk15_nodes[i];
        const T fsum = f(c - dx) + f(c + dx);
        kron += fsum * gk15_weights[i];
        if (i % 2 == 1) gauss += fsum * g7_weights[i / 2];
    }
    return {a, b, kron * h, magnitude((kron - gauss) * h)};
}

}  // namespace detail

/// Integrates f over [a, b]; T is double or std::complex<double>.
template <typename T, typename F>
QuadratureResult<T> integrate(const F& f, double a, double b, const QuadratureOptions& opt = {}) {
    if (!(b > a)) return {T{}, 0.0, 0};
    std::size_t initial = 1;
    if (opt.max_panel_width > 0.0) initial = static_cast<std::size_t>(std::ceil((b - a) / opt.max_panel_width));
    initial = std::max<std::size_t>(initial, 1);
    if (initial > opt.panel_budget)
        throw QuadratureNonConvergence("integrate: " + std::to_string(initial) +
                                       " initial panels exceed the budget");

    using P = detail::Panel<T, F>;
    std::priority_queue<P> heap;
    T total{};
    double err = 0.0;
    for (std::size_t i = 0; i < initial; ++i) {
        const double lo = a + (b - a) * static_cast<double>(i) / static_cast<double>(initial);
        const double hi = (i + 1 == initial) ? b : a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(initial);
        P p = detail::gk15<T, F>(f, lo, hi);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    std::size_t panels = initial;
    auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total)); };
    while (err > target()) {
        if (panels + 1 > opt.panel_budget)
            throw QuadratureNonConvergence("integrate: panel budget exhausted with error estimate " +
                                           std::to_string(err));
        P worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        P left = detail::gk15<T, F>(f, worst.a, mid);
        P right = detail::gk15<T, F>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
        if (mid <= worst.a || mid >= worst.b) break;  // interval cannot be split further
    }
    // re-add from scratch to shed accumulated cancellation in the running sums
    T fresh{};
    double fresh_err = 0.0;
    while (!heap.empty()) {
        fresh += heap.top().value;
        fresh_err += heap.top().error;
        heap.pop();
    }
    return {fresh, fresh_err, panels};
}

}  // namespace twistl
