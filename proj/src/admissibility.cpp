#include "qmeas/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qmeas/random.hpp"

namespace qmeas {

std::optional<RefinabilityWitness> find_refinability(const ParametrisedState& s,
                                                     const KrausMeasurement& f,
                                                     const Tolerances& tol) {
    if (s.hilbert_dim() != f.dim()) throw DimensionMismatch();
    const std::size_t n = s.size();
    // Post states cached lazily per (outcome, grid point).
    std::vector<std::vector<std::optional<DensityMatrix>>> post(
        f.outcomes(), std::vector<std::optional<DensityMatrix>>(n));
    auto post_state = [&](std::size_t i, std::size_t t) -> const DensityMatrix& {
        if (!post[i][t]) post[i][t] = post_measurement_state(s.states[t], f, i, tol);
        return *post[i][t];
    };
    const Povm induced = f.povm(tol);
    for (std::size_t i = 0; i < f.outcomes(); ++i) {
        std::vector<double> prob(n);
        for (std::size_t t = 0; t < n; ++t)
            prob[t] = (s.states[t].matrix() * induced.effect(i)).trace().real();
        for (std::size_t a = 0; a < n; ++a) {
            if (prob[a] <= tol.prob) continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (prob[b] <= tol.prob) continue;
                const double gap = trace_distance(post_state(i, a), post_state(i, b));
                if (gap > tol.eq)
                    return RefinabilityWitness{i, a, b, gap, prob[a], prob[b]};
            }
        }
    }
    return std::nullopt;
}

RefinedMeasurement refine_measurement(const KrausMeasurement& f, const RefinabilityWitness& w,
                                      const ParametrisedState& s, const Tolerances& tol) {
    const DensityMatrix post_a = post_measurement_state(s.states[w.theta_a], f, w.outcome, tol);
    const DensityMatrix post_b = post_measurement_state(s.states[w.theta_b], f, w.outcome, tol);
    const Povm helstrom = helstrom_measurement(post_a, post_b, tol);

    std::vector<CMatrix> kraus;
    std::vector<std::pair<std::size_t, int>> labels;
    for (std::size_t j = 0; j < f.outcomes(); ++j) {
        if (j == w.outcome) {
            // Helstrom effects are projectors, hence their own Kraus operators.
            kraus.push_back(helstrom.effect(0) * f.kraus(j));
            labels.emplace_back(j, 1);
            kraus.push_back(helstrom.effect(1) * f.kraus(j));
            labels.emplace_back(j, 2);
        } else {
            kraus.push_back(f.kraus(j));
            labels.emplace_back(j, 0);
        }
    }
    return RefinedMeasurement{KrausMeasurement(std::move(kraus), tol), w.outcome,
                              std::move(labels)};
}

Estimator lift_estimator(const RefinedMeasurement& mf, const Estimator& est_f) {
    std::vector<RVector> values;
    values.reserve(mf.labels.size());
    for (const auto& [orig, sub] : mf.labels) {
        if (orig >= est_f.outcomes())
            throw DimensionMismatch("estimator does not cover the original outcomes");
        values.push_back(est_f.values[orig]);
    }
    return Estimator(std::move(values));
}

RefinementDomination dominate_refineable(const ParametrisedState& s, const KrausMeasurement& f,
                                         const LossFunction& loss, const Tolerances& tol,
                                         std::uint64_t seed, std::size_t sweep_size) {
    const auto witness = find_refinability(s, f, tol);
    if (!witness) throw NotRefineable();
    RefinedMeasurement refined = refine_measurement(f, *witness, s, tol);
    const Povm refined_povm = refined.measurement.povm(tol);
    const Povm original_povm = f.povm(tol);

    const Prior prior = Prior::two_point(s.size(), witness->theta_a, witness->theta_b);
    const Estimator ours = posterior_mean_estimator(s, refined_povm, prior, tol).estimator;
    const Estimator best_f = posterior_mean_estimator(s, original_povm, prior, tol).estimator;

    std::size_t branch_1 = 0, branch_2 = 0;
    for (std::size_t k = 0; k < refined.labels.size(); ++k) {
        if (refined.labels[k].first == refined.source_outcome) {
            (refined.labels[k].second == 1 ? branch_1 : branch_2) = k;
        }
    }
    const double split = (ours.values[branch_1] - ours.values[branch_2]).norm();

    const double risk_ours = bayes_risk(s, refined_povm, ours, loss, prior);
    const double risk_best_f = bayes_risk(s, original_povm, best_f, loss, prior);

    Rng rng(seed);
    double lift_dev = 0.0;
    for (std::size_t it = 0; it < sweep_size; ++it) {
        const Estimator cand = random_grid_estimator(s, f.outcomes(), rng);
        const auto rf = risk_profile(s, original_povm, cand, loss);
        const auto rl = risk_profile(s, refined_povm, lift_estimator(refined, cand), loss);
        for (std::size_t i = 0; i < rf.values.size(); ++i)
            lift_dev = std::max(lift_dev, std::abs(rf.values[i] - rl.values[i]));
    }

    RiskProfile profile = risk_profile(s, refined_povm, ours, loss);
    return RefinementDomination{std::move(refined),
                                ours,
                                witness->theta_a,
                                witness->theta_b,
                                split,
                                risk_ours,
                                risk_best_f,
                                risk_best_f - risk_ours,
                                lift_dev,
                                std::move(profile)};
}

bool is_uninformative(const ParametrisedState& s, const Povm& f, double tol) {
    if (s.hilbert_dim() != f.dim()) throw DimensionMismatch();
    std::vector<std::vector<double>> probs(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) probs[i] = outcome_distribution(s.states[i], f);
    for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t b = a + 1; b < s.size(); ++b)
            for (std::size_t k = 0; k < f.outcomes(); ++k)
                if (std::abs(probs[a][k] - probs[b][k]) > tol) return false;
    return true;
}

UninformativeDomination dominate_uninformative(const ParametrisedState& s, const Povm& f,
                                               const LossFunction& loss, const Tolerances& tol,
                                               std::uint64_t seed, std::size_t sweep_size) {
    if (!is_uninformative(s, f, tol.eq)) throw MeasurementInformative();

    // Witness pair: the most distinguishable states, ties to the first pair.
    std::size_t pa = 0, pb = 0;
    double best_gap = 0.0;
    for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = a + 1; b < s.size(); ++b) {
            const double gap = trace_distance(s.states[a], s.states[b]);
            if (gap > best_gap) {
                best_gap = gap;
                pa = a;
                pb = b;
            }
        }
    }
    if (best_gap <= tol.eq) throw StateConstant();

    const Povm helstrom = helstrom_measurement(s.states[pa], s.states[pb], tol);
    const Prior prior = Prior::two_point(s.size(), pa, pb);
    const Estimator ours = posterior_mean_estimator(s, helstrom, prior, tol).estimator;
    const RVector constant = prior.mean(s);

    const double ours_a = risk(s, helstrom, ours, loss, pa);
    const double ours_b = risk(s, helstrom, ours, loss, pb);
    const double const_a = loss(constant, s.grid[pa]);
    const double const_b = loss(constant, s.grid[pb]);

    RiskProfile two_ours{{s.grid[pa], s.grid[pb]}, {ours_a, ours_b}};
    RiskProfile two_const{{s.grid[pa], s.grid[pb]}, {const_a, const_b}};
    const Domination verdict = dominates_pair(two_ours, two_const, tol.dom);
    const double margin = std::min(const_a - ours_a, const_b - ours_b);

    // Constant-mean reduction sweep: every sampled estimator on F is weakly
    // improved by guessing its own outcome-probability-weighted mean.
    Rng rng(seed);
    const auto p0 = outcome_distribution(s.states.front(), f);
    double violation = -std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < sweep_size; ++it) {
        const Estimator cand = random_grid_estimator(s, f.outcomes(), rng);
        RVector mean = RVector::Zero(s.param_dim);
        for (std::size_t k = 0; k < cand.outcomes(); ++k) mean += p0[k] * cand.values[k];
        for (std::size_t t = 0; t < s.size(); ++t)
            violation = std::max(violation,
                                 loss(mean, s.grid[t]) - risk(s, f, cand, loss, t));
    }

    RiskProfile profile = risk_profile(s, helstrom, ours, loss);
    return UninformativeDomination{helstrom, ours,   pa,      pb,      constant, ours_a,
                                   ours_b,   const_a, const_b, verdict, margin,   violation,
                                   std::move(profile)};
}

AveragedEstimator bregman_average_improvement(const Estimator& a, const Estimator& b,
                                              const Povm& m, const ParametrisedState& s,
                                              const LossFunction& loss, const Tolerances& tol) {
    if (a.outcomes() != b.outcomes())
        throw DimensionMismatch("estimators have different outcome counts");
    const auto pa = risk_profile(s, m, a, loss);
    const auto pb = risk_profile(s, m, b, loss);
    double dev = 0.0;
    for (std::size_t i = 0; i < pa.values.size(); ++i)
        dev = std::max(dev, std::abs(pa.values[i] - pb.values[i]));
    if (dev > tol.dom) throw ProfilesDiffer(dev);

    bool differ_with_probability = false;
    for (std::size_t k = 0; k < a.outcomes() && !differ_with_probability; ++k) {
        if ((a.values[k] - b.values[k]).cwiseAbs().maxCoeff() == 0.0) continue;
        for (std::size_t t = 0; t < s.size(); ++t) {
            if (outcome_distribution(s.states[t], m)[k] > tol.prob) {
                differ_with_probability = true;
                break;
            }
        }
    }
    if (!differ_with_probability) throw EstimatorsEqual();

    std::vector<RVector> mid;
    mid.reserve(a.outcomes());
    for (std::size_t k = 0; k < a.outcomes(); ++k)
        mid.push_back(0.5 * (a.values[k] + b.values[k]));
    Estimator midpoint(std::move(mid));
    RiskProfile profile = risk_profile(s, m, midpoint, loss);
    return AveragedEstimator{std::move(midpoint), std::move(profile)};
}

}  // namespace qmeas
