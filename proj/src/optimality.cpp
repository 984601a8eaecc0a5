#include "qmeas/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qmeas {

namespace {

void require_same_grid(const ParametrisedState& a, const ParametrisedState& b) {
    if (a.size() != b.size() || a.param_dim != b.param_dim) throw GridMismatch();
    for (std::size_t i = 0; i < a.size(); ++i)
        if ((a.grid[i] - b.grid[i]).cwiseAbs().maxCoeff() > 1e-12) throw GridMismatch();
}

}  // namespace

Povm optimal_measurement_for_classical(const ParametrisedState& s, const Tolerances& tol) {
    const auto cert = classicality_certificate(s, tol.comm);
    if (!cert.classical)
        throw NotClassicalState(cert.witness_a, cert.witness_b, cert.max_commutator_norm);
    return Povm::projective_from_basis(cert.common_basis, tol);
}

NoGoResult no_go_witness(const ParametrisedState& s, const LossFunction& loss, double tol_comm) {
    if (loss.kind() != LossFunction::Kind::LeastSquares)
        throw WrongLoss("the no-go witness applies to least-squares loss only");
    const auto cert = classicality_certificate(s, tol_comm);
    NoGoResult result;
    result.commutator_norm = cert.max_commutator_norm;
    if (!cert.classical) {
        result.no_go = true;
        result.witness_a = cert.witness_a;
        result.witness_b = cert.witness_b;
    }
    return result;
}

AdditiveBoundResult additive_bound(const ParametrisedState& s, const ParametrisedState& classical,
                                   const LossFunction& loss,
                                   std::optional<double> diameter_override,
                                   const Tolerances& tol) {
    require_same_grid(s, classical);
    if (s.hilbert_dim() != classical.hilbert_dim()) throw DimensionMismatch();
    Povm measurement = [&] {
        try {
            return optimal_measurement_for_classical(classical, tol);
        } catch (const NotClassicalState&) {
            throw NotClassicalReference();
        }
    }();

    double epsilon = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        epsilon = std::max(epsilon,
                           trace_norm(s.states[i].matrix() - classical.states[i].matrix()));

    double diameter = 0.0;
    if (diameter_override) {
        diameter = *diameter_override;
    } else {
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t b = 0; b < s.size(); ++b)
                if (a != b) diameter = std::max(diameter, loss(s.grid[a], s.grid[b]));
    }
    return AdditiveBoundResult{epsilon, diameter, 2.0 * diameter * epsilon,
                               std::move(measurement)};
}

double multiplicative_bound(const ParametrisedState& s, const ParametrisedState& classical,
                            const Tolerances& tol) {
    require_same_grid(s, classical);
    if (s.hilbert_dim() != classical.hilbert_dim()) throw DimensionMismatch();
    double eta = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double fwd = d_max(s.states[i], classical.states[i], tol);
        const double bwd = d_max(classical.states[i], s.states[i], tol);
        if (std::isinf(fwd) || std::isinf(bwd))
            return std::numeric_limits<double>::infinity();
        eta = std::max(eta, std::exp(fwd + bwd) - 1.0);
    }
    return eta;
}

LocalBoundResult local_bound(const ParametrisedState& s, double tol_comm) {
    const std::size_t n = s.size();
    std::vector<std::vector<bool>> commutes(n, std::vector<bool>(n, true));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const CMatrix comm = s.states[a].matrix() * s.states[b].matrix() -
                                 s.states[b].matrix() * s.states[a].matrix();
            commutes[a][b] = commutes[b][a] = operator_norm(comm) <= tol_comm;
        }
    }

    // Candidates in decreasing cell-volume order, ties by index.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return s.cell_volumes[a] > s.cell_volumes[b];
    });

    std::vector<std::size_t> best;
    double best_volume = -1.0;
    for (std::size_t seed = 0; seed < n; ++seed) {
        std::vector<std::size_t> cluster{seed};
        double volume = s.cell_volumes[seed];
        for (std::size_t cand : order) {
            if (cand == seed) continue;
            bool ok = true;
            for (std::size_t member : cluster) {
                if (!commutes[cand][member]) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                cluster.push_back(cand);
                volume += s.cell_volumes[cand];
            }
        }
        if (volume > best_volume) {
            best_volume = volume;
            best = std::move(cluster);
        }
    }
    std::sort(best.begin(), best.end());

    Tolerances tol;
    tol.comm = tol_comm;
    return LocalBoundResult{best, best_volume, s.total_volume() - best_volume,
                            optimal_measurement_for_classical(s.restricted_to(best), tol),
                            best.size() == 1 && n > 1};
}

double check_additive_risk_gap(const ParametrisedState& s, const ParametrisedState& classical,
                               const Povm& m_opt, const Povm& f, const Estimator& est_f,
                               const LossFunction& loss) {
    require_same_grid(s, classical);
    const CMatrix basis = basis_from_projective(m_opt);
    const Estimator transferred = transfer_estimator(basis, f, est_f);
    const auto rm = risk_profile(s, m_opt, transferred, loss);
    const auto rf = risk_profile(s, f, est_f, loss);
    double gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rm.values.size(); ++i)
        gap = std::max(gap, rm.values[i] - rf.values[i]);
    return gap;
}

}  // namespace qmeas
