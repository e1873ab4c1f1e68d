#pragma once

#include <stdexcept>
#include <string>

namespace sigma2 {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A spectrum (or a Hermitian form) left the Garding cone Γ₂.
class ConeViolation : public Error {
public:
    ConeViolation(const std::string& what, double sigma1, double sigma2)
        : Error(what + " (sigma1=" + std::to_string(sigma1) +
                ", sigma2=" + std::to_string(sigma2) + ")"),
          sigma1_(sigma1), sigma2_(sigma2) {}

    double sigma1() const noexcept { return sigma1_; }
    double sigma2() const noexcept { return sigma2_; }

private:
    double sigma1_;
    double sigma2_;
};

class SamplingFailure : public Error {
public:
    using Error::Error;
};

class NumericFailure : public Error {
public:
    using Error::Error;
};

/// Structured elimination hit a vanishing pivot; use generic kernel extraction instead.
class EliminationDegenerate : public Error {
public:
    using Error::Error;
};

/// The top eigenvalue is not simple, so λ₁ is not differentiable there.
class MultiplicityError : public Error {
public:
    using Error::Error;
};

class UnsupportedMetric : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class AdmissibilityError : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace sigma2
