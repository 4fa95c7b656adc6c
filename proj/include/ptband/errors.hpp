#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace ptband {

using cplx = std::complex<double>;

/// Broad failure categories. Each maps to one CLI exit code.
enum class ErrorKind { Domain, Configuration, ModelViolation, Numerical };

const char* to_string(ErrorKind kind) noexcept;

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }
    /// Short machine-readable tag, e.g. "degeneracy".
    virtual const char* tag() const noexcept { return to_string(kind_); }

private:
    ErrorKind kind_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Configuration, what) {}
};

class ModelViolation : public Error {
public:
    explicit ModelViolation(const std::string& what) : Error(ErrorKind::ModelViolation, what) {}
};

class NumericalFailure : public Error {
public:
    explicit NumericalFailure(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

/// Pole of a series term too close to the evaluation point.
class SingularityError : public DomainError {
public:
    SingularityError(const std::string& what, double pole) : DomainError(what), pole_(pole) {}
    double pole() const noexcept { return pole_; }
    const char* tag() const noexcept override { return "singularity"; }

private:
    double pole_;
};

/// An eigenvalue escaped every localization disc, or the truncation cannot
/// resolve the requested region.
class TruncationError : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
    const char* tag() const noexcept override { return "truncation"; }
};

/// Two eigenvalues of different classes coincide where the model forbids it.
class DegeneracyError : public NumericalFailure {
public:
    DegeneracyError(const std::string& what, cplx first, cplx second)
        : NumericalFailure(what), first_(first), second_(second) {}
    cplx first() const noexcept { return first_; }
    cplx second() const noexcept { return second_; }
    const char* tag() const noexcept override { return "degeneracy"; }

private:
    cplx first_, second_;
};

class IntegrationFailure : public NumericalFailure {
public:
    IntegrationFailure(const std::string& what, cplx lambda) : NumericalFailure(what), lambda_(lambda) {}
    cplx lambda() const noexcept { return lambda_; }
    const char* tag() const noexcept override { return "integration"; }

private:
    cplx lambda_;
};

class MissedRootError : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
    const char* tag() const noexcept override { return "missed_root"; }
};

class PrecisionError : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
    const char* tag() const noexcept override { return "precision"; }
};

class TracingError : public NumericalFailure {
public:
    TracingError(const std::string& what, double t_lo, double t_hi)
        : NumericalFailure(what), t_lo_(t_lo), t_hi_(t_hi) {}
    double t_lo() const noexcept { return t_lo_; }
    double t_hi() const noexcept { return t_hi_; }
    const char* tag() const noexcept override { return "tracing"; }

private:
    double t_lo_, t_hi_;
};

/// A search interval contained no sign change.
class NotFoundError : public ModelViolation {
public:
    NotFoundError(const std::string& what, double lo, double hi) : ModelViolation(what), lo_(lo), hi_(hi) {}
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    const char* tag() const noexcept override { return "not_found"; }

private:
    double lo_, hi_;
};

}  // namespace ptband
