#pragma once

#include <stdexcept>
#include <string>

namespace qmeas {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent input data (CLI exit code 2).
struct ValidationError : Error {
    using Error::Error;
};

// Operands whose shapes/grids do not line up (CLI exit code 3).
struct DimensionError : Error {
    using Error::Error;
};

// Exhaustive searches that would exceed the configured cap (CLI exit code 4).
struct SearchCapError : Error {
    using Error::Error;
};

struct NotHermitian : ValidationError {
    double residual;
    explicit NotHermitian(double r)
        : ValidationError("matrix is not Hermitian: residual " + std::to_string(r)), residual(r) {}
};

struct NotPsd : ValidationError {
    double min_eigenvalue;
    explicit NotPsd(double lam)
        : ValidationError("matrix is not positive semi-definite: min eigenvalue " + std::to_string(lam)),
          min_eigenvalue(lam) {}
};

struct TraceNotOne : ValidationError {
    double trace;
    explicit TraceNotOne(double t)
        : ValidationError("matrix trace is not 1: trace " + std::to_string(t)), trace(t) {}
};

struct PovmIncomplete : ValidationError {
    double residual;
    explicit PovmIncomplete(double r)
        : ValidationError("POVM effects do not sum to identity: residual " + std::to_string(r)),
          residual(r) {}
};

struct DimensionMismatch : DimensionError {
    using DimensionError::DimensionError;
    DimensionMismatch() : DimensionError("operand dimensions do not match") {}
};

struct GridMismatch : DimensionError {
    using DimensionError::DimensionError;
    GridMismatch() : DimensionError("parameter grids do not match") {}
};

struct StatesEqual : ValidationError {
    StatesEqual() : ValidationError("states are equal within tolerance; no informative discrimination exists") {}
};

struct OutcomeImpossible : ValidationError {
    double probability;
    explicit OutcomeImpossible(double p)
        : ValidationError("outcome probability " + std::to_string(p) +
                          " is below tolerance; post-measurement state undefined"),
          probability(p) {}
};

struct OutOfDomain : ValidationError {
    using ValidationError::ValidationError;
};

struct WrongLoss : ValidationError {
    using ValidationError::ValidationError;
};

struct RankDeficientAverage : ValidationError {
    int kernel_dim;
    explicit RankDeficientAverage(int k)
        : ValidationError("prior-averaged state is rank deficient (kernel dimension " +
                          std::to_string(k) + "); solver requires full rank"),
          kernel_dim(k) {}
};

struct MultiParameterUnsupported : ValidationError {
    MultiParameterUnsupported()
        : ValidationError("operation is defined for single-parameter families only") {}
};

struct NotClassicalState : ValidationError {
    std::size_t witness_a, witness_b;
    double commutator_norm;
    NotClassicalState(std::size_t a, std::size_t b, double nrm)
        : ValidationError("state family is not classical: states at grid indices " + std::to_string(a) +
                          " and " + std::to_string(b) + " fail to commute (norm " + std::to_string(nrm) + ")"),
          witness_a(a), witness_b(b), commutator_norm(nrm) {}
};

struct NotClassicalReference : ValidationError {
    using ValidationError::ValidationError;
    NotClassicalReference() : ValidationError("reference family is not classical") {}
};

struct NotRefineable : ValidationError {
    NotRefineable() : ValidationError("measurement is not refineable on this family") {}
};

struct StateConstant : ValidationError {
    StateConstant() : ValidationError("state family is constant on the grid") {}
};

struct MeasurementInformative : ValidationError {
    MeasurementInformative() : ValidationError("measurement outcome probabilities depend on the parameter") {}
};

struct EstimatorsEqual : ValidationError {
    EstimatorsEqual() : ValidationError("estimators are equal with probability 1") {}
};

struct ProfilesDiffer : ValidationError {
    double max_deviation;
    explicit ProfilesDiffer(double d)
        : ValidationError("risk profiles differ by " + std::to_string(d)), max_deviation(d) {}
};

struct InvalidRange : ValidationError {
    using ValidationError::ValidationError;
};

struct UnsupportedDimension : ValidationError {
    using ValidationError::ValidationError;
};

struct SearchSpaceTooLarge : SearchCapError {
    explicit SearchSpaceTooLarge(double requested, double cap)
        : SearchCapError("search space of " + std::to_string(requested) +
                         " candidate evaluations exceeds cap " + std::to_string(cap)) {}
};

}  // namespace qmeas
