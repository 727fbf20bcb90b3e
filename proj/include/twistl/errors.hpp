#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace twistl {

// Every failure the library reports derives from Error so callers (the CLI in
// particular) can map the whole family onto exit codes in one place.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotCoprime : public Error {
public:
    NotCoprime(std::int64_t a, std::int64_t m)
        : Error("not coprime: gcd(" + std::to_string(a) + ", " + std::to_string(m) + ") > 1"),
          a_(a), m_(m) {}
    std::int64_t a() const noexcept { return a_; }
    std::int64_t modulus() const noexcept { return m_; }

private:
    std::int64_t a_;
    std::int64_t m_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class OverflowBudget : public Error {
public:
    using Error::Error;
};

class QuadratureNonConvergence : public Error {
public:
    using Error::Error;
};

class StationaryPointOutsideSupport : public Error {
public:
    using Error::Error;
};

class TruncationTooSmall : public Error {
public:
    using Error::Error;
};

class EmptySpace : public Error {
public:
    using Error::Error;
};

class EigenspaceDegenerate : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class InvariantViolation : public Error {
public:
    InvariantViolation(std::string invariant, std::int64_t n, const std::string& detail = {})
        : Error("InvariantViolation(" + invariant + ", n=" + std::to_string(n) + ")" +
                (detail.empty() ? std::string{} : ": " + detail)),
          invariant_(std::move(invariant)), n_(n) {}
    const std::string& invariant() const noexcept { return invariant_; }
    std::int64_t index() const noexcept { return n_; }

private:
    std::string invariant_;
    std::int64_t n_;
};

class TailBudgetExceeded : public Error {
public:
    using Error::Error;
};

class IllConditioned : public Error {
public:
    using Error::Error;
};

class NonPositiveWeight : public Error {
public:
    using Error::Error;
};

class SystemSingular : public Error {
public:
    using Error::Error;
};

class NumericallyUnstable : public Error {
public:
    using Error::Error;
};

class EigendataTooShort : public Error {
public:
    EigendataTooShort(std::int64_t required, std::int64_t available)
        : Error("eigendata too short: need n_max >= " + std::to_string(required) + ", have " +
                std::to_string(available)),
          required_(required) {}
    std::int64_t required() const noexcept { return required_; }

private:
    std::int64_t required_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace twistl
