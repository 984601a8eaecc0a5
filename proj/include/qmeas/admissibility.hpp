#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qmeas/bayes.hpp"
#include "qmeas/core.hpp"
#include "qmeas/estimation.hpp"

namespace qmeas {

struct RefinabilityWitness {
    std::size_t outcome;
    std::size_t theta_a;
    std::size_t theta_b;
    double post_state_gap;  // trace distance of the two post-measurement states
    double prob_a;
    double prob_b;
};

/// Scans outcomes (ascending) and grid pairs (lexicographic) for an outcome
/// whose post-measurement state still depends on the parameter. Both outcome
/// probabilities must exceed tol.prob for the post states to be defined.
std::optional<RefinabilityWitness> find_refinability(const ParametrisedState& s,
                                                     const KrausMeasurement& f,
                                                     const Tolerances& tol = {});

struct RefinedMeasurement {
    KrausMeasurement measurement;
    std::size_t source_outcome;
    /// new outcome -> (original outcome, sub-label). Sub-label 0 marks an
    /// untouched outcome, 1 and 2 the two Helstrom branches of the refined one.
    std::vector<std::pair<std::size_t, int>> labels;
};

/// Follows the witnessed outcome with the Helstrom discrimination of its two
/// post-measurement states: kraus list F_1..F_{i-1}, P_1 F_i, P_2 F_i, F_{i+1}..
RefinedMeasurement refine_measurement(const KrausMeasurement& f, const RefinabilityWitness& w,
                                      const ParametrisedState& s, const Tolerances& tol = {});

/// Copies an F-estimator onto the refined measurement; risk profiles agree
/// exactly by construction.
Estimator lift_estimator(const RefinedMeasurement& mf, const Estimator& est_f);

struct RefinementDomination {
    RefinedMeasurement refined;
    Estimator estimator;  // posterior mean on MF under the two-point prior
    std::size_t theta_a;
    std::size_t theta_b;
    double estimator_split;      // distance between the two refined estimates
    double bayes_risk_refined;   // our estimator under the two-point prior
    double bayes_risk_original;  // best F estimator under the same prior
    double improvement;          // original - refined
    double lift_max_deviation;   // worst lift-identity residual over the sweep
    RiskProfile profile;         // full grid, for inspection
};

/// Inadmissibility evidence for a refineable measurement: the refined
/// measurement matches every F-estimator exactly (lift identity) and its
/// two-point Bayes estimator strictly improves on the best F-estimator.
RefinementDomination dominate_refineable(const ParametrisedState& s, const KrausMeasurement& f,
                                         const LossFunction& loss, const Tolerances& tol = {},
                                         std::uint64_t seed = 0, std::size_t sweep_size = 64);

/// True iff every outcome probability is parameter-independent within tol.
bool is_uninformative(const ParametrisedState& s, const Povm& f,
                      double tol = Tolerances{}.eq);

struct UninformativeDomination {
    Povm measurement;     // Helstrom discrimination of the witness pair
    Estimator estimator;  // two-point posterior means
    std::size_t theta_a;
    std::size_t theta_b;
    RVector best_constant;  // prior mean under the two-point prior
    double risk_ours_a;
    double risk_ours_b;
    double risk_const_a;
    double risk_const_b;
    Domination verdict;  // ours vs the best constant on the two-point sub-grid
    double margin;       // min pointwise improvement over the two points
    /// sup over sampled F-estimators of max_theta [L(theta_0, theta) - R(est, theta)]
    /// with theta_0 the probability-weighted mean; Jensen keeps it below zero.
    double reduction_max_violation;
    RiskProfile profile;  // full grid, for inspection
};

/// Inadmissibility evidence for an uninformative measurement: any estimator on
/// it reduces to a constant, and the Helstrom pair with the two-point Bayes
/// estimator dominates the best constant on the witness sub-grid.
UninformativeDomination dominate_uninformative(const ParametrisedState& s, const Povm& f,
                                               const LossFunction& loss,
                                               const Tolerances& tol = {},
                                               std::uint64_t seed = 0,
                                               std::size_t sweep_size = 64);

struct AveragedEstimator {
    Estimator estimator;  // outcome-wise midpoint
    RiskProfile profile;
};

/// Midpoint of two distinct estimators with equal risk profiles; strictly
/// convex losses make the midpoint at least as good everywhere and strictly
/// better wherever a differing outcome has positive probability.
AveragedEstimator bregman_average_improvement(const Estimator& a, const Estimator& b,
                                              const Povm& m, const ParametrisedState& s,
                                              const LossFunction& loss,
                                              const Tolerances& tol = {});

}  // namespace qmeas
