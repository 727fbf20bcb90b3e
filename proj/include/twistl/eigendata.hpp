#pragma once

// Normalized Hecke eigenvalues lambda(n) = a(n) / n^((k-1)/2) of newforms of
// prime level: computed from modular symbols at weight 2, or read from text
// files at any even weight. Either way the invariant battery runs before the
// data is handed out.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twistl/arith.hpp"
#include "twistl/errors.hpp"
#include "twistl/modular_symbols.hpp"

namespace twistl {

enum class Provenance { computed, ingested };

struct NewformEigendata {
    i64 level = 0;
    int weight = 2;
    int form = 0;
    int fricke_sign = 1;
    Provenance provenance = Provenance::computed;
    std::vector<double> a;       // a[n], unnormalized; a[0] unused
    std::vector<double> lambda;  // lambda[n]; lambda[0] unused

    i64 n_max() const noexcept { return a.empty() ? 0 : static_cast<i64>(a.size()) - 1; }

    double operator()(i64 n) const {
        if (n < 1) throw DomainError("eigendata: index must be >= 1");
        if (n > n_max()) throw EigendataTooShort(n, n_max());
        return lambda[static_cast<std::size_t>(n)];
    }

    /// True when every stored a(n) is an exact integer.
    bool integral() const {
        for (std::size_t n = 1; n < a.size(); ++n)
            if (a[n] != std::round(a[n])) return false;
        return true;
    }
};

inline constexpr double eigendata_tolerance = 1e-8;

/// Runs the invariant battery in ascending n; at each n the checks run in the
/// order lambda1, hecke_recursion, multiplicativity, deligne, level_eigenvalue.
/// Throws InvariantViolation naming the first failure.
inline void validate(const NewformEigendata& f) {
    const double tol = eigendata_tolerance;
    if (!is_prime(f.level)) throw DomainError("eigendata: level must be prime");
    if (f.weight < 2 || f.weight % 2 != 0) throw DomainError("eigendata: weight must be even and >= 2");
    if (f.fricke_sign != 1 && f.fricke_sign != -1) throw DomainError("eigendata: fricke sign must be +1 or -1");
    const i64 q = f.level;
    const auto& L = f.lambda;
    auto close = [&](double x, double y) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(y)); };
    for (i64 n = 1; n <= f.n_max(); ++n) {
        const double ln = L[static_cast<std::size_t>(n)];
        if (!std::isfinite(ln)) throw InvariantViolation("finite", n, "non-finite eigenvalue");
        if (n == 1) {
            if (std::abs(ln - 1.0) > 1e-12) throw InvariantViolation("lambda1", 1);
            continue;
        }
        const auto fac = factorize(n);
        if (fac.size() == 1 && fac[0].exponent >= 2) {
            const i64 l = fac[0].prime;
            const i64 lower = n / l;
            const double lp = L[static_cast<std::size_t>(l)];
            const double lj = L[static_cast<std::size_t>(lower)];
            const double expect = (l == q) ? lp * lj : lp * lj - L[static_cast<std::size_t>(lower / l)];
            if (!close(ln, expect)) throw InvariantViolation("hecke_recursion", n);
        }
        if (fac.size() >= 2) {
            double prod = 1.0;
            for (const auto& pp : fac) prod *= L[static_cast<std::size_t>(pp.value)];
            if (!close(ln, prod)) throw InvariantViolation("multiplicativity", n);
        }
        if (std::abs(ln) > static_cast<double>(divisor_count(n)) + tol) throw InvariantViolation("deligne", n);
        if (n == q) {
            const double target = 1.0 / std::sqrt(static_cast<double>(q));
            if (std::abs(std::abs(ln) - target) > tol) throw InvariantViolation("level_eigenvalue", n);
            if (std::abs(ln + f.fricke_sign * target) > tol)
                throw InvariantViolation("level_eigenvalue", n, "sign disagrees with the Fricke sign");
        }
    }
}

/// Fills lambda from a.
inline void normalize(NewformEigendata& f) {
    f.lambda.assign(f.a.size(), 0.0);
    const double e = 0.5 * (f.weight - 1);
    for (std::size_t n = 1; n < f.a.size(); ++n) f.lambda[n] = f.a[n] / std::pow(static_cast<double>(n), e);
}

namespace detail {

// a(n) for n <= n_max from a(l) at primes, via the Hecke relations.
inline std::vector<double> extend_multiplicatively(const std::vector<double>& a_prime, i64 q, int weight, i64 n_max) {
    std::vector<double> a(static_cast<std::size_t>(n_max + 1), 0.0);
    a[1] = 1.0;
    for (i64 n = 2; n <= n_max; ++n) {
        const auto fac = factorize(n);
        double v = 1.0;
        for (const auto& pp : fac) {
            const i64 l = pp.prime;
            const double al = a_prime[static_cast<std::size_t>(l)];
            // a(l^e): a(l^{j+1}) = a(l) a(l^j) - l^{k-1} a(l^{j-1}), or a(l)^e at l = q
            double prev = 1.0, cur = al;
            const double lk = std::pow(static_cast<double>(l), weight - 1);
            for (int j = 1; j < pp.exponent; ++j) {
                const double next = (l == q) ? al * cur : al * cur - lk * prev;
                prev = cur;
                cur = next;
            }
            v *= cur;
        }
        a[static_cast<std::size_t>(n)] = v;
    }
    return a;
}

}  // namespace detail

/// Weight-2 newforms of level q with lambda(n) for n <= n_max.
inline std::vector<NewformEigendata> newform_eigendata(const ModularSymbolSpace& space, i64 n_max) {
    if (n_max < 30) throw DomainError("newform_eigendata: n_max must be >= 30");
    const i64 q = space.level();
    const std::size_t g = space.dimension();
    const auto G = static_cast<Eigen::Index>(g);

    // random combinations of T_l until the eigenvalues separate
    std::mt19937_64 rng(0x5eed + static_cast<unsigned long long>(q));
    std::uniform_int_distribution<int> coef(1, 9);
    Eigen::MatrixXd comb = Eigen::MatrixXd::Zero(G, G);
    Eigen::MatrixXd left;  // columns are left eigenvectors
    bool separated = false;
    int used = 0;
    for (i64 l = 2; l < 200 && !separated; ++l) {
        if (!is_prime(l) || l == q) continue;
        comb += static_cast<double>(used == 0 ? 1 : coef(rng)) * to_double(space.hecke_prime_exact(l));
        ++used;
        Eigen::EigenSolver<Eigen::MatrixXd> es(comb.transpose());
        if (es.info() != Eigen::Success) continue;
        const Eigen::VectorXcd ev = es.eigenvalues();
        const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
        bool ok = ev.imag().cwiseAbs().maxCoeff() < 1e-9 * scale;
        for (Eigen::Index i = 0; ok && i < G; ++i)
            for (Eigen::Index j = i + 1; ok && j < G; ++j)
                if (std::abs(ev[i] - ev[j]) < 1e-6 * scale) ok = false;
        if (ok) {
            left = es.eigenvectors().real();
            separated = true;
        }
        if (used >= 12) break;
    }
    if (!separated) throw EigenspaceDegenerate("newform_eigendata: Hecke eigenvalues did not separate at level " +
                                               std::to_string(q));

    // per-form symbol weights: w[s] = phi(image of symbol s)
    const std::size_t nsym = space.symbol_count();
    struct FormState {
        std::vector<double> w;
        std::vector<std::pair<std::size_t, double>> basis_symbols;
        double pivot;
    };
    std::vector<FormState> states(g);
    for (std::size_t f = 0; f < g; ++f) {
        const Eigen::VectorXd phi = left.col(static_cast<Eigen::Index>(f));
        Eigen::Index i_star = 0;
        phi.cwiseAbs().maxCoeff(&i_star);
        const std::vector<double> reader = space.cuspidal_reader(phi);
        auto& st = states[f];
        st.w.assign(nsym, 0.0);
        for (std::size_t s = 0; s < nsym; ++s) {
            const auto& r = space.rep_double(s);
            double acc = 0.0;
            for (std::size_t k = 0; k < r.size(); ++k) acc += reader[k] * r[k];
            st.w[s] = acc;
        }
        st.basis_symbols = space.cuspidal_basis_symbols(static_cast<std::size_t>(i_star));
        st.pivot = phi[i_star];
    }

    // a(q) fixes the Fricke sign, so primes run to q even when n_max < q
    const i64 top = std::max(n_max, q);
    std::vector<std::vector<double>> a_prime(g, std::vector<double>(static_cast<std::size_t>(top + 1), 0.0));
    for (i64 l = 2; l <= top; ++l) {
        if (!is_prime(l)) continue;
        const auto hs = space.heilbronn(l);
        // images of the basis symbols under each matrix, shared by every form
        for (std::size_t f = 0; f < g; ++f) {
            const auto& st = states[f];
            double total = 0.0;
            for (const auto& [sym, c] : st.basis_symbols) {
                const auto [u, v] = space.symbol(sym);
                double acc = 0.0;
                for (const auto& h : hs) {
                    const std::size_t j = space.index(u * h[0] + v * h[2], u * h[1] + v * h[3]);
                    if (j != ModularSymbolSpace::npos) acc += st.w[j];
                }
                total += c * acc;
            }
            a_prime[f][static_cast<std::size_t>(l)] = total / st.pivot;
        }
    }

    std::vector<NewformEigendata> out;
    for (std::size_t f = 0; f < g; ++f) {
        auto& ap = a_prime[f];
        // forms with rational Hecke field get exact integers
        bool rational = true;
        for (i64 l = 2; l <= top; ++l)
            if (is_prime(l) && std::abs(ap[static_cast<std::size_t>(l)] - std::round(ap[static_cast<std::size_t>(l)])) > 1e-6)
                rational = false;
        if (rational)
            for (auto& v : ap) v = std::round(v);
        const double aq = ap[static_cast<std::size_t>(q)];
        if (std::abs(std::abs(aq) - 1.0) > 1e-6)
            throw InvariantViolation("level_eigenvalue", q, "a(q) = " + std::to_string(aq));
        ap[static_cast<std::size_t>(q)] = std::round(aq);

        NewformEigendata d;
        d.level = q;
        d.weight = 2;
        d.fricke_sign = aq > 0 ? -1 : 1;
        d.provenance = Provenance::computed;
        d.a = detail::extend_multiplicatively(ap, q, 2, n_max);
        normalize(d);
        out.push_back(std::move(d));
    }
    // deterministic order: lexicographic in a(2), a(3), a(5), ...
    std::sort(out.begin(), out.end(), [&](const NewformEigendata& x, const NewformEigendata& y) {
        for (i64 l = 2; l <= n_max; ++l) {
            if (!is_prime(l)) continue;
            const double dx = x.a[static_cast<std::size_t>(l)], dy = y.a[static_cast<std::size_t>(l)];
            if (std::abs(dx - dy) > 1e-6) return dx < dy;
        }
        return false;
    });
    for (std::size_t f = 0; f < out.size(); ++f) {
        out[f].form = static_cast<int>(f);
        validate(out[f]);
    }
    return out;
}

/// Convenience: build the space and compute its newforms.
inline std::vector<NewformEigendata> newform_eigendata(i64 q, i64 n_max) {
    return newform_eigendata(build_space(q), n_max);
}

/// Sum over forms of a_f(n) minus the exact rational trace of T_n.
inline double trace_discrepancy(const ModularSymbolSpace& space, const std::vector<NewformEigendata>& forms, i64 n) {
    const mpq_class exact = rational_trace(hecke_matrix_exact(space, n));
    double s = 0.0;
    for (const auto& f : forms) s += f.a.at(static_cast<std::size_t>(n));
    return std::abs(s - exact.get_d());
}

// ---------------------------------------------------------------------------
// Text format:
//   # level=<q> weight=<k> form=<index> fricke=<+1|-1>
//   n,a_n            (n = 1, 2, ..., consecutive)
// Several blocks may share a file. Integers are written exactly; forms with
// irrational Hecke field are written with 17 significant digits.

inline std::string format_coefficient(double v) {
    if (v == std::round(v) && std::abs(v) < 9e15) {
        std::ostringstream os;
        os << static_cast<long long>(v);
        return os.str();
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void export_eigendata(std::ostream& os, const NewformEigendata& f) {
    os << "# level=" << f.level << " weight=" << f.weight << " form=" << f.form
       << " fricke=" << (f.fricke_sign > 0 ? "+1" : "-1") << '\n';
    for (std::size_t n = 1; n < f.a.size(); ++n) os << n << ',' << format_coefficient(f.a[n]) << '\n';
}

inline void export_eigendata(const std::string& path, const std::vector<NewformEigendata>& forms) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open " + path + " for writing");
    for (const auto& f : forms) export_eigendata(os, f);
}

namespace detail {

inline bool parse_int(const std::string& s, long long& out) {
    if (s.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stoll(s, &pos);
    } catch (...) {
        return false;
    }
    return pos == s.size();
}

inline NewformEigendata parse_header(const std::string& line, std::size_t lineno) {
    NewformEigendata f;
    f.provenance = Provenance::ingested;
    std::istringstream is(line.substr(1));
    std::string tok;
    bool have_level = false, have_weight = false, have_form = false, have_fricke = false;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw FormatError("line " + std::to_string(lineno) + ": malformed header field '" + tok + "'");
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        long long v = 0;
        if (!parse_int(val, v)) throw FormatError("line " + std::to_string(lineno) + ": non-integer value for " + key);
        if (key == "level") {
            f.level = v;
            have_level = true;
        } else if (key == "weight") {
            f.weight = static_cast<int>(v);
            have_weight = true;
        } else if (key == "form") {
            f.form = static_cast<int>(v);
            have_form = true;
        } else if (key == "fricke") {
            if (v != 1 && v != -1) throw FormatError("line " + std::to_string(lineno) + ": fricke must be +1 or -1");
            f.fricke_sign = static_cast<int>(v);
            have_fricke = true;
        } else {
            throw FormatError("line " + std::to_string(lineno) + ": unknown header field " + key);
        }
    }
    if (!(have_level && have_weight && have_form && have_fricke))
        throw FormatError("line " + std::to_string(lineno) + ": header needs level, weight, form and fricke");
    if (!is_prime(f.level)) throw FormatError("line " + std::to_string(lineno) + ": level must be prime");
    if (f.weight < 2 || f.weight % 2 != 0) throw FormatError("line " + std::to_string(lineno) + ": weight must be even and >= 2");
    f.a.push_back(0.0);
    return f;
}

}  // namespace detail

inline std::vector<NewformEigendata> ingest_eigendata(std::istream& is) {
    std::vector<NewformEigendata> out;
    std::string line;
    std::size_t lineno = 0;
    auto finish = [&] {
        if (out.empty()) return;
        auto& f = out.back();
        if (f.a.size() < 2) throw FormatError("form " + std::to_string(f.form) + ": no coefficients (n=1 missing)");
        normalize(f);
        validate(f);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            finish();
            out.push_back(detail::parse_header(line, lineno));
            continue;
        }
        if (out.empty()) throw FormatError("line " + std::to_string(lineno) + ": data before header");
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw FormatError("line " + std::to_string(lineno) + ": expected n,a_n");
        long long n = 0;
        if (!detail::parse_int(line.substr(0, comma), n)) throw FormatError("line " + std::to_string(lineno) + ": bad index");
        auto& f = out.back();
        const long long expected = static_cast<long long>(f.a.size());
        if (n != expected)
            throw FormatError("line " + std::to_string(lineno) + ": expected n=" + std::to_string(expected) + ", got n=" +
                              std::to_string(n));
        const std::string val = line.substr(comma + 1);
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(val, &pos);
        } catch (...) {
            throw FormatError("line " + std::to_string(lineno) + ": bad coefficient '" + val + "'");
        }
        if (pos != val.size() || !std::isfinite(v))
            throw FormatError("line " + std::to_string(lineno) + ": bad coefficient '" + val + "'");
        f.a.push_back(v);
    }
    finish();
    if (out.empty()) throw FormatError("no eigendata blocks found");
    return out;
}

inline std::vector<NewformEigendata> ingest_eigendata(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path);
    return ingest_eigendata(is);
}

}  // namespace twistl
