#pragma once

#include <vector>

#include "qmeas/core.hpp"
#include "qmeas/estimation.hpp"

namespace qmeas {

/// A discrete prior over the grid points of a ParametrisedState.
struct Prior {
    std::vector<double> weights;

    explicit Prior(std::vector<double> w);
    static Prior uniform(std::size_t n);
    static Prior point_mass(std::size_t n, std::size_t at);
    static Prior two_point(std::size_t n, std::size_t a, std::size_t b);

    /// Prior mean sum_theta w(theta) theta.
    RVector mean(const ParametrisedState& s) const;
};

/// R_pi = sum_theta w(theta) R(est, theta).
double bayes_risk(const ParametrisedState& s, const Povm& m, const Estimator& est,
                  const LossFunction& loss, const Prior& prior);

struct PosteriorMeanResult {
    Estimator estimator;
    /// Outcomes whose marginal probability under the prior is below tol.prob;
    /// their estimate defaults to the prior mean and is reported here.
    std::vector<std::size_t> never_occurring;
};

/// theta(k) = sum_theta w p_k(theta) theta / sum_theta w p_k(theta); the unique
/// Bayes estimator for Bregman losses.
PosteriorMeanResult posterior_mean_estimator(const ParametrisedState& s, const Povm& m,
                                             const Prior& prior, const Tolerances& tol = {});

struct StateMoments {
    DensityMatrix average;  // rho-bar
    CMatrix first_moment;   // rho-bar', single-parameter families only
};

StateMoments average_state_moments(const ParametrisedState& s, const Prior& prior);

struct BayesSolution {
    CMatrix lambda;
    Povm measurement;     // projective onto lambda's (grouped) eigenspaces
    Estimator estimator;  // lambda's eigenvalues, grouped to match
    double bayes_risk;
    double anticommutator_residual;  // ||lambda rho-bar + rho-bar lambda - 2 rho-bar'||
};

/// Solves {Lambda, rho-bar} = 2 rho-bar' in rho-bar's eigenbasis and returns
/// the projective measurement onto Lambda's eigenspaces together with the
/// eigenvalue estimator — the Bayes-optimal pair under least-squares loss.
/// fine_grained = true returns one rank-1 outcome per eigenvector instead of
/// the coarsest grouping.
BayesSolution solve_bayes_measurement(const ParametrisedState& s, const Prior& prior,
                                      const Tolerances& tol = {}, bool fine_grained = false);

struct BayesRiskTerms {
    double lambda2_term;         // Tr(Lambda_2 rho-bar)
    double cross_term;           // Tr(Lambda rho-bar')
    double prior_second_moment;  // sum w theta^2
    double combined() const { return lambda2_term - 2.0 * cross_term + prior_second_moment; }
};

/// The operator decomposition of the least-squares Bayes risk,
/// R_pi = Tr(Lambda_2 rho-bar) - 2 Tr(Lambda rho-bar') + sum w theta^2.
BayesRiskTerms bayes_risk_terms(const Povm& f, const Estimator& est, const ParametrisedState& s,
                                const Prior& prior);

}  // namespace qmeas
