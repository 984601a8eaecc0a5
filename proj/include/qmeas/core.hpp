#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qmeas/errors.hpp"
#include "qmeas/types.hpp"

namespace qmeas {

/// A validated density matrix: Hermitian, positive semi-definite, unit trace.
class DensityMatrix {
public:
    /// Validates all three invariants; throws NotHermitian / NotPsd / TraceNotOne.
    explicit DensityMatrix(CMatrix mat, const Tolerances& tol = {});

    /// Wraps a matrix whose invariants hold by construction (convex mixtures,
    /// normalized projections). Residuals may exceed the validation tolerances
    /// when the construction is badly conditioned; callers own that trade-off.
    static DensityMatrix unchecked(CMatrix mat);

    const CMatrix& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }

private:
    struct UncheckedTag {};
    DensityMatrix(CMatrix mat, UncheckedTag) : mat_(std::move(mat)) {}
    CMatrix mat_;
};

/// Validates a raw matrix as a density matrix. Same checks as the constructor;
/// kept as a free function so call sites read like the operation they perform.
DensityMatrix validate_state(const CMatrix& rho, const Tolerances& tol = {});

/// A POVM: effects are Hermitian PSD and sum to the identity.
class Povm {
public:
    explicit Povm(std::vector<CMatrix> effects, const Tolerances& tol = {});

    /// Rank-1 projective measurement from orthonormal basis columns.
    static Povm projective_from_basis(const CMatrix& basis, const Tolerances& tol = {});

    std::size_t outcomes() const { return effects_.size(); }
    const CMatrix& effect(std::size_t k) const { return effects_[k]; }
    const std::vector<CMatrix>& effects() const { return effects_; }
    Eigen::Index dim() const { return effects_.empty() ? 0 : effects_.front().rows(); }

private:
    std::vector<CMatrix> effects_;
};

/// A measurement given by Kraus operators {F_i}, sum_i F_i^dag F_i = 1.
/// Unlike a bare POVM this fixes the post-measurement states.
class KrausMeasurement {
public:
    explicit KrausMeasurement(std::vector<CMatrix> kraus, const Tolerances& tol = {});

    std::size_t outcomes() const { return kraus_.size(); }
    const CMatrix& kraus(std::size_t i) const { return kraus_[i]; }
    Eigen::Index dim() const { return kraus_.empty() ? 0 : kraus_.front().rows(); }

    /// The induced POVM {F_i^dag F_i}.
    Povm povm(const Tolerances& tol = {}) const;

private:
    std::vector<CMatrix> kraus_;
};

/// A family rho(theta) over a finite grid of parameter points in R^N,
/// with quadrature weights standing in for the measure on Theta.
struct ParametrisedState {
    int param_dim = 1;
    std::vector<RVector> grid;
    std::vector<DensityMatrix> states;
    std::vector<double> cell_volumes;

    ParametrisedState() = default;
    ParametrisedState(int n, std::vector<RVector> pts, std::vector<DensityMatrix> st,
                      std::vector<double> vols);

    std::size_t size() const { return grid.size(); }
    Eigen::Index hilbert_dim() const { return states.empty() ? 0 : states.front().dim(); }
    double total_volume() const;

    /// Sub-family over the given grid indices (kept in the given order).
    ParametrisedState restricted_to(const std::vector<std::size_t>& indices) const;
};

/// p_k = Tr(rho M_k), clipped to [0,1].
std::vector<double> outcome_distribution(const DensityMatrix& rho, const Povm& m);

/// Schatten-1 norm, Tr sqrt(A^dag A).
double trace_norm(const CMatrix& a);

/// Half the trace norm of the difference.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Max-relative entropy D_max(rho||sigma) = inf{gamma : rho <= e^gamma sigma}.
/// Returns +infinity when rho has support outside sigma's.
double d_max(const DensityMatrix& rho, const DensityMatrix& sigma, const Tolerances& tol = {});

/// Optimal two-outcome discrimination of rho1 vs rho2: outcome 1 projects onto
/// the nonnegative eigenspace of rho1 - rho2, outcome 2 onto the complement.
/// Zero eigenvalues go to outcome 1. Throws StatesEqual when the states
/// coincide within tol.eq in trace norm.
Povm helstrom_measurement(const DensityMatrix& rho1, const DensityMatrix& rho2,
                          const Tolerances& tol = {});

/// rho_i = F_i rho F_i^dag / Tr(F_i rho F_i^dag). Throws OutcomeImpossible when
/// the outcome probability is below tol.prob.
DensityMatrix post_measurement_state(const DensityMatrix& rho, const KrausMeasurement& f,
                                     std::size_t outcome, const Tolerances& tol = {});

struct ClassicalityCertificate {
    bool classical = false;
    /// Common eigenbasis (columns), meaningful when classical.
    CMatrix common_basis;
    /// Maximizing grid pair, meaningful when not classical.
    std::size_t witness_a = 0;
    std::size_t witness_b = 0;
    double max_commutator_norm = 0.0;
};

/// Classical iff all pairwise commutators vanish within tol_comm; the common
/// basis is built by refining the eigenspaces of the first state against every
/// other state in the family.
ClassicalityCertificate classicality_certificate(const ParametrisedState& s, double tol_comm);

/// Columns of the orthonormal basis underlying a rank-1 projective POVM.
/// Throws ValidationError when the measurement is not of that form.
CMatrix basis_from_projective(const Povm& m, const Tolerances& tol = {});

/// Runs of indices whose sorted eigenvalues lie within rel_gap of each other
/// (relative to max(1, |lambda|_max)). Returned as (start, count) pairs.
std::vector<std::pair<int, int>> group_eigenvalues(const RVector& sorted_eigenvalues,
                                                   double rel_gap);

}  // namespace qmeas
