#include "qmeas/bayes.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>

namespace qmeas {

Prior::Prior(std::vector<double> w) : weights(std::move(w)) {
    if (weights.empty()) throw ValidationError("prior needs at least one weight");
    double sum = 0.0;
    for (double x : weights) {
        if (!(x >= 0.0)) throw ValidationError("prior weights must be nonnegative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ValidationError("prior weights must sum to 1, got " + std::to_string(sum));
}

Prior Prior::uniform(std::size_t n) {
    return Prior(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Prior Prior::point_mass(std::size_t n, std::size_t at) {
    std::vector<double> w(n, 0.0);
    w.at(at) = 1.0;
    return Prior(std::move(w));
}

Prior Prior::two_point(std::size_t n, std::size_t a, std::size_t b) {
    std::vector<double> w(n, 0.0);
    w.at(a) = 0.5;
    w.at(b) = 0.5;
    return Prior(std::move(w));
}

RVector Prior::mean(const ParametrisedState& s) const {
    if (weights.size() != s.size()) throw GridMismatch();
    RVector mu = RVector::Zero(s.param_dim);
    for (std::size_t i = 0; i < s.size(); ++i) mu += weights[i] * s.grid[i];
    return mu;
}

double bayes_risk(const ParametrisedState& s, const Povm& m, const Estimator& est,
                  const LossFunction& loss, const Prior& prior) {
    if (prior.weights.size() != s.size()) throw GridMismatch();
    double r = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (prior.weights[i] > 0.0) r += prior.weights[i] * risk(s, m, est, loss, i);
    }
    return r;
}

PosteriorMeanResult posterior_mean_estimator(const ParametrisedState& s, const Povm& m,
                                             const Prior& prior, const Tolerances& tol) {
    if (prior.weights.size() != s.size()) throw GridMismatch();
    if (s.hilbert_dim() != m.dim()) throw DimensionMismatch();
    const RVector prior_mean = prior.mean(s);
    PosteriorMeanResult result;
    std::vector<RVector> values;
    values.reserve(m.outcomes());
    std::vector<std::vector<double>> probs(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) probs[i] = outcome_distribution(s.states[i], m);
    for (std::size_t k = 0; k < m.outcomes(); ++k) {
        double marginal = 0.0;
        RVector num = RVector::Zero(s.param_dim);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double w = prior.weights[i] * probs[i][k];
            marginal += w;
            num += w * s.grid[i];
        }
        if (marginal <= tol.prob) {
            // No posterior exists for an outcome that never occurs; default to
            // the prior mean and flag it instead of choosing silently.
            result.never_occurring.push_back(k);
            values.push_back(prior_mean);
        } else {
            values.push_back(num / marginal);
        }
    }
    result.estimator = Estimator(std::move(values));
    return result;
}

StateMoments average_state_moments(const ParametrisedState& s, const Prior& prior) {
    if (prior.weights.size() != s.size()) throw GridMismatch();
    if (s.param_dim != 1) throw MultiParameterUnsupported();
    const Eigen::Index d = s.hilbert_dim();
    CMatrix avg = CMatrix::Zero(d, d);
    CMatrix first = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < s.size(); ++i) {
        avg += prior.weights[i] * s.states[i].matrix();
        first += prior.weights[i] * s.grid[i](0) * s.states[i].matrix();
    }
    return StateMoments{validate_state(avg), std::move(first)};
}

BayesSolution solve_bayes_measurement(const ParametrisedState& s, const Prior& prior,
                                      const Tolerances& tol, bool fine_grained) {
    const auto moments = average_state_moments(s, prior);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(moments.average.matrix());
    const RVector lam = es.eigenvalues();
    const CMatrix u = es.eigenvectors();
    const double lam_max = lam.maxCoeff();
    int kernel = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        if (lam(i) <= tol.rank * lam_max) ++kernel;
    if (kernel > 0) throw RankDeficientAverage(kernel);

    // Solve {Lambda, rho-bar} = 2 rho-bar' componentwise in rho-bar's eigenbasis.
    const CMatrix rhs = u.adjoint() * moments.first_moment * u;
    CMatrix lambda_eig(lam.size(), lam.size());
    for (Eigen::Index a = 0; a < lam.size(); ++a)
        for (Eigen::Index b = 0; b < lam.size(); ++b)
            lambda_eig(a, b) = 2.0 * rhs(a, b) / (lam(a) + lam(b));
    CMatrix lambda = u * lambda_eig * u.adjoint();
    lambda = 0.5 * (lambda + lambda.adjoint().eval());

    Eigen::SelfAdjointEigenSolver<CMatrix> el(lambda);
    const RVector mu = el.eigenvalues();
    const CMatrix v = el.eigenvectors();

    std::vector<CMatrix> effects;
    std::vector<RVector> estimates;
    if (fine_grained) {
        for (Eigen::Index i = 0; i < mu.size(); ++i) {
            const CVector col = v.col(i);
            effects.push_back(col * col.adjoint());
            estimates.push_back(RVector::Constant(1, mu(i)));
        }
    } else {
        for (const auto& [start, count] : group_eigenvalues(mu, tol.group)) {
            const CMatrix cols = v.middleCols(start, count);
            effects.push_back(cols * cols.adjoint());
            estimates.push_back(RVector::Constant(1, mu.segment(start, count).mean()));
        }
    }

    BayesSolution sol{
        lambda,
        Povm(std::move(effects), tol),
        Estimator(std::move(estimates)),
        0.0,
        0.0,
    };
    double second_moment = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        second_moment += prior.weights[i] * s.grid[i](0) * s.grid[i](0);
    sol.bayes_risk = (lambda * lambda * moments.average.matrix()).trace().real() -
                     2.0 * (lambda * moments.first_moment).trace().real() + second_moment;
    sol.anticommutator_residual = operator_norm(lambda * moments.average.matrix() +
                                                moments.average.matrix() * lambda -
                                                2.0 * moments.first_moment);
    return sol;
}

BayesRiskTerms bayes_risk_terms(const Povm& f, const Estimator& est, const ParametrisedState& s,
                                const Prior& prior) {
    if (est.outcomes() != f.outcomes())
        throw DimensionMismatch("estimator outcome count != measurement outcome count");
    if (s.param_dim != 1) throw MultiParameterUnsupported();
    if (s.hilbert_dim() != f.dim()) throw DimensionMismatch();
    const Eigen::Index d = f.dim();
    CMatrix lambda = CMatrix::Zero(d, d);
    CMatrix lambda2 = CMatrix::Zero(d, d);
    for (std::size_t k = 0; k < f.outcomes(); ++k) {
        const double t = est.values[k](0);
        lambda += t * f.effect(k);
        lambda2 += t * t * f.effect(k);
    }
    const auto moments = average_state_moments(s, prior);
    BayesRiskTerms terms{};
    terms.lambda2_term = (lambda2 * moments.average.matrix()).trace().real();
    terms.cross_term = (lambda * moments.first_moment).trace().real();
    terms.prior_second_moment = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        terms.prior_second_moment += prior.weights[i] * s.grid[i](0) * s.grid[i](0);
    return terms;
}

}  // namespace qmeas
