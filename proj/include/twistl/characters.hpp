#pragma once

// Dirichlet characters of prime modulus, labelled by (p, a) where
// chi(g^j) = e(a j / (p-1)) and g is the least primitive root of p.

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "twistl/arith.hpp"

namespace twistl {

/// Discrete-log table for a prime modulus, shared by every character mod p.
class IndexTable {
public:
    explicit IndexTable(i64 p) : p_(p), g_(primitive_root(p)), ind_(static_cast<std::size_t>(p), -1) {
        i64 x = 1;
        for (i64 j = 0; j < p - 1; ++j) {
            ind_[static_cast<std::size_t>(x)] = j;
            x = x * g_ % p;
        }
    }

    i64 modulus() const noexcept { return p_; }
    i64 generator() const noexcept { return g_; }

    /// ind_g(n) in [0, p-1), or -1 when p | n.
    i64 index(i64 n) const noexcept { return ind_[static_cast<std::size_t>(mod_floor(n, p_))]; }

private:
    i64 p_;
    i64 g_;
    std::vector<i64> ind_;
};

class DirichletCharacter {
public:
    DirichletCharacter(i64 p, i64 a)
        : DirichletCharacter(std::make_shared<const IndexTable>(p), a) {}

    DirichletCharacter(std::shared_ptr<const IndexTable> table, i64 a) : table_(std::move(table)) {
        const i64 p = table_->modulus();
        if (p < 3) throw DomainError("DirichletCharacter: modulus must be an odd prime");
        a_ = mod_floor(a, p - 1);
        values_.assign(static_cast<std::size_t>(p), cplx{0.0, 0.0});
        for (i64 n = 1; n < p; ++n) {
            const i64 j = table_->index(n);
            values_[static_cast<std::size_t>(n)] = unit_phase(a_ * j, p - 1);
        }
    }

    i64 modulus() const noexcept { return table_->modulus(); }
    i64 generator() const noexcept { return table_->generator(); }
    i64 exponent() const noexcept { return a_; }
    bool is_primitive() const noexcept { return a_ != 0; }
    bool is_real() const noexcept { return 2 * a_ % (modulus() - 1) == 0; }

    cplx operator()(i64 n) const noexcept {
        return values_[static_cast<std::size_t>(mod_floor(n, modulus()))];
    }

    DirichletCharacter conj() const { return DirichletCharacter(table_, modulus() - 1 - a_); }

    /// "p:a", the label used in CSV output.
    std::string label() const { return std::to_string(modulus()) + ":" + std::to_string(a_); }

    const std::shared_ptr<const IndexTable>& table() const noexcept { return table_; }

private:
    std::shared_ptr<const IndexTable> table_;
    i64 a_ = 0;
    std::vector<cplx> values_;
};

/// All characters mod p in exponent order, optionally without the trivial one.
inline std::vector<DirichletCharacter> characters_mod(i64 p, bool primitive_only = true) {
    auto table = std::make_shared<const IndexTable>(p);
    std::vector<DirichletCharacter> out;
    for (i64 a = primitive_only ? 1 : 0; a < p - 1; ++a) out.emplace_back(table, a);
    return out;
}

/// Parses "p:a".
inline DirichletCharacter parse_character(const std::string& label) {
    const auto colon = label.find(':');
    if (colon == std::string::npos) throw ConfigError("character label must look like p:a, got '" + label + "'");
    try {
        const i64 p = std::stoll(label.substr(0, colon));
        const i64 a = std::stoll(label.substr(colon + 1));
        if (!is_prime(p) || p < 3) throw ConfigError("character modulus must be an odd prime: " + label);
        return DirichletCharacter(p, a);
    } catch (const std::logic_error&) {
        throw ConfigError("bad character label '" + label + "'");
    }
}

struct GaussSumValue {
    cplx value;
    DirichletCharacter character;
};

inline GaussSumValue gauss_sum(const DirichletCharacter& chi) {
    const i64 p = chi.modulus();
    cplx s{0.0, 0.0};
    for (i64 a = 1; a < p; ++a) s += chi(a) * unit_phase(a, p);
    return {s, chi};
}

}  // namespace twistl
