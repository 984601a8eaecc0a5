#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qmeas {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Numerical tolerances used throughout. Defaults are tuned for
// double-precision eigensolvers on dim <= 64 matrices.
struct Tolerances {
    double herm = 1e-10;   // Hermiticity residual, entrywise
    double trace = 1e-10;  // |Tr - 1|
    double psd = 1e-9;     // allowed negative eigenvalue magnitude
    double povm = 1e-9;    // completeness residual
    double comm = 1e-8;    // commutator norm for classicality
    double prob = 1e-12;   // smallest probability treated as possible
    double rank = 1e-10;   // eigenvalues below rank*lambda_max are kernel
    double dom = 1e-9;     // slack when comparing risk profiles
    double eq = 1e-8;      // trace-distance below which states count as equal
    double group = 1e-8;   // relative gap merging eigenvalues into one eigenspace
};

// Entrywise Chebyshev norm, used for validation residuals.
double max_abs(const CMatrix& a);

// Schatten-infinity norm (largest singular value), used for operator witnesses.
double operator_norm(const CMatrix& a);

double hermiticity_residual(const CMatrix& a);

bool all_finite(const CMatrix& a);
bool all_finite(const RVector& v);

}  // namespace qmeas
