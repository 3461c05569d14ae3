#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

#include "dirac_isp/types.hpp"

namespace dirac_isp {

/// Base class for solver failures. Input-shape mistakes use
/// std::invalid_argument directly; everything domain-specific derives
/// from here so callers can map failures to exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Validation failures: the problem data violates a model invariant.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Numerical failures: the data was admissible but a computation degenerated.
class NumericalError : public Error {
  public:
    using Error::Error;
};

namespace detail {
inline std::string complex_str(Complex z) {
    std::ostringstream os;
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}
}  // namespace detail

/// sigma(beta) meets sigma(beta*): the Sylvester identity may be unsolvable.
class SpectraOverlap : public ValidationError {
  public:
    SpectraOverlap(Complex mu, Complex nu, double margin)
        : ValidationError("SpectraOverlap: eigenvalue pair (" + detail::complex_str(mu) + ", " +
                          detail::complex_str(nu) + ") has |mu - conj(nu)| = " + std::to_string(margin)),
          mu(mu),
          nu(nu),
          margin(margin) {}
    Complex mu, nu;
    double margin;
};

class NonHermitianQ : public ValidationError {
  public:
    explicit NonHermitianQ(double deviation)
        : ValidationError("NonHermitianQ: right-hand side deviates from Hermitian by " +
                          std::to_string(deviation)),
          deviation(deviation) {}
    double deviation;
};

class NonUnitaryR : public ValidationError {
  public:
    explicit NonUnitaryR(double deviation)
        : ValidationError("NonUnitaryR: |R*R - I| = " + std::to_string(deviation)), deviation(deviation) {}
    double deviation;
};

class UnsortedDelays : public ValidationError {
  public:
    UnsortedDelays(std::size_t index, double prev, double next)
        : ValidationError("UnsortedDelays: D[" + std::to_string(index) + "] = " + std::to_string(next) +
                          " below predecessor " + std::to_string(prev)) {}
};

/// Linear solve hit a pivot below tolerance; carries the rcond estimate.
class Singular : public NumericalError {
  public:
    explicit Singular(double rcond)
        : NumericalError("Singular: reciprocal condition estimate " + std::to_string(rcond)), rcond(rcond) {}
    double rcond;
};

class ResolventSingular : public ValidationError {
  public:
    explicit ResolventSingular(Complex lambda)
        : ValidationError("ResolventSingular: lambda = " + detail::complex_str(lambda) +
                          " is an eigenvalue of beta") {}
};

class SigmaSingular : public NumericalError {
  public:
    SigmaSingular(double x, double smallest_sv)
        : NumericalError("SigmaSingular: Sigma(" + std::to_string(x) + ") has smallest singular value " +
                         std::to_string(smallest_sv)) {}
};

/// k(x) has a jump at a delay; the caller must pick a one-sided limit.
class OnBreakpoint : public Error {
  public:
    explicit OnBreakpoint(double x)
        : Error("OnBreakpoint: x = " + std::to_string(x) + " is a delay breakpoint; evaluate one-sided") {}
};

/// U22(l) not invertible: S_l fails to invert. Admissible data has S_l >= I
/// and an invertible U22, so this signals a conditioning breakdown.
class U22Singular : public NumericalError {
  public:
    explicit U22Singular(double rcond)
        : NumericalError("U22Singular: reciprocal condition estimate " + std::to_string(rcond)),
          rcond(rcond) {}
    double rcond;
};

class ConfigError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

}  // namespace dirac_isp
