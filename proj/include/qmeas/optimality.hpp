#pragma once

#include <optional>
#include <vector>

#include "qmeas/core.hpp"
#include "qmeas/estimation.hpp"

namespace qmeas {

/// Projective measurement in the family's common eigenbasis; optimal for every
/// convex loss when the family is classical. Throws NotClassicalState with the
/// witnessing pair otherwise.
Povm optimal_measurement_for_classical(const ParametrisedState& s,
                                       const Tolerances& tol = {});

struct NoGoResult {
    bool no_go = false;
    std::size_t witness_a = 0;
    std::size_t witness_b = 0;
    double commutator_norm = 0.0;
};

/// Least-squares no-go witness: a non-commuting pair of states rules out an
/// optimal measurement on any convex parameter space containing the grid.
/// Inconclusive means the family is classical within tolerance, where the
/// classical-optimality construction applies instead. Throws WrongLoss for
/// anything other than least squares.
NoGoResult no_go_witness(const ParametrisedState& s, const LossFunction& loss, double tol_comm);

struct AdditiveBoundResult {
    double epsilon;   // max_theta ||rho(theta) - sigma(theta)||_1
    double diameter;  // sup of pairwise losses over the grid
    double bound;     // 2 * diameter * epsilon
    Povm measurement; // optimal measurement of the classical reference
};

/// Additive approximate-optimality certificate against a classical reference
/// family on the same grid. The diameter is computed from the grid unless an
/// override is supplied.
AdditiveBoundResult additive_bound(const ParametrisedState& s, const ParametrisedState& classical,
                                   const LossFunction& loss,
                                   std::optional<double> diameter_override = {},
                                   const Tolerances& tol = {});

/// eta = max_theta exp(D_max(rho||sigma) + D_max(sigma||rho)) - 1; +infinity
/// when supports differ either way at some grid point.
double multiplicative_bound(const ParametrisedState& s, const ParametrisedState& classical,
                            const Tolerances& tol = {});

struct LocalBoundResult {
    std::vector<std::size_t> gamma;  // grid indices of the classical subset
    double gamma_volume;
    double delta;      // excluded volume
    Povm measurement;  // optimal measurement on gamma
    bool singleton;    // no two grid points commute
};

/// Greedily grows the heaviest mutually-commuting subset of the grid and
/// certifies local optimality outside it. The returned delta upper-bounds the
/// best achievable one, which keeps the certificate sound.
LocalBoundResult local_bound(const ParametrisedState& s, double tol_comm);

/// Empirical additive gap max_theta [R(transferred, theta) - R(est_f, theta)]
/// of the transferred estimator against a competitor pair (f, est_f), for
/// comparison with the 2*d*epsilon bound.
double check_additive_risk_gap(const ParametrisedState& s, const ParametrisedState& classical,
                               const Povm& m_opt, const Povm& f, const Estimator& est_f,
                               const LossFunction& loss);

}  // namespace qmeas
