#include "qmeas/scenarios.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qmeas {

GridSpec GridSpec::linspace(double lo, double hi, int count, bool include_hi) {
    GridSpec g;
    g.lo = lo;
    g.hi = hi;
    g.count = count;
    g.include_hi = include_hi;
    return g;
}

GridSpec GridSpec::list(std::vector<double> pts, std::vector<double> vols) {
    GridSpec g;
    g.points = std::move(pts);
    g.volumes = std::move(vols);
    return g;
}

std::pair<std::vector<RVector>, std::vector<double>> GridSpec::materialize() const {
    std::vector<RVector> grid;
    std::vector<double> vols;
    if (!points.empty()) {
        for (double p : points) grid.push_back(RVector::Constant(1, p));
        if (!volumes.empty()) {
            if (volumes.size() != points.size())
                throw InvalidRange("cell volume count != grid point count");
            vols = volumes;
        } else {
            vols.assign(points.size(), 1.0);
        }
        return {grid, vols};
    }
    if (count < 1) throw InvalidRange("grid needs at least one point");
    if (!(hi > lo)) throw InvalidRange("grid range must satisfy lo < hi");
    const double width = include_hi ? (count > 1 ? (hi - lo) / (count - 1) : hi - lo)
                                    : (hi - lo) / count;
    for (int i = 0; i < count; ++i) grid.push_back(RVector::Constant(1, lo + i * width));
    if (include_hi && count > 1) grid.back()(0) = hi;
    vols.assign(static_cast<std::size_t>(count), width);
    return {grid, vols};
}

ScenarioSpec ScenarioSpec::mach_zehnder() {
    return mach_zehnder(GridSpec::linspace(0.0, 2.0 * std::numbers::pi, 64, false));
}

ScenarioSpec ScenarioSpec::mach_zehnder(GridSpec g) {
    ScenarioSpec spec;
    spec.kind = Kind::MachZehnder;
    spec.grid = std::move(g);
    return spec;
}

ScenarioSpec ScenarioSpec::thermal(GridSpec g, CMatrix h) {
    ScenarioSpec spec;
    spec.kind = Kind::Thermal;
    spec.grid = std::move(g);
    spec.hamiltonian = std::move(h);
    return spec;
}

ScenarioSpec ScenarioSpec::depolarizing(GridSpec g, CVector psi) {
    ScenarioSpec spec;
    spec.kind = Kind::Depolarizing;
    spec.grid = std::move(g);
    spec.pure_state = std::move(psi);
    return spec;
}

ScenarioSpec ScenarioSpec::diagonal_classical(GridSpec g) {
    ScenarioSpec spec;
    spec.kind = Kind::DiagonalClassical;
    spec.grid = std::move(g);
    return spec;
}

ScenarioSpec ScenarioSpec::from_shorthand(const std::string& name) {
    if (name == "mz") return mach_zehnder();
    if (name == "thermal") {
        CMatrix h = CMatrix::Zero(2, 2);
        h(1, 1) = 1.0;
        return thermal(GridSpec::linspace(0.0, 2.0, 21, true), h);
    }
    if (name == "depol") {
        CVector psi = CVector::Zero(2);
        psi(0) = 1.0;
        return depolarizing(GridSpec::linspace(0.0, 1.0, 21, true), psi);
    }
    if (name == "diag") return diagonal_classical(GridSpec::linspace(0.1, 0.9, 17, true));
    throw ValidationError("unknown scenario shorthand '" + name +
                          "' (expected mz, thermal, depol or diag)");
}

DensityMatrix mz_state(double theta) {
    CVector psi(2);
    psi(0) = 1.0 / std::numbers::sqrt2;
    psi(1) = std::exp(Complex(0.0, theta)) / std::numbers::sqrt2;
    return validate_state(psi * psi.adjoint());
}

ParametrisedState build_scenario(const ScenarioSpec& spec, const Tolerances& tol) {
    if (spec.kind == ScenarioSpec::Kind::Custom) {
        if (!spec.custom) throw ValidationError("custom scenario needs a state family");
        return *spec.custom;
    }
    auto [grid, vols] = spec.grid.materialize();
    std::vector<DensityMatrix> states;
    states.reserve(grid.size());
    switch (spec.kind) {
        case ScenarioSpec::Kind::MachZehnder:
            for (const auto& theta : grid) states.push_back(mz_state(theta(0)));
            break;
        case ScenarioSpec::Kind::Thermal: {
            const CMatrix& h = spec.hamiltonian;
            if (h.rows() != h.cols() || h.rows() < 1)
                throw InvalidRange("thermal scenario needs a square Hamiltonian");
            if (hermiticity_residual(h) > tol.herm)
                throw NotHermitian(hermiticity_residual(h));
            Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
            const RVector energies = es.eigenvalues();
            const CMatrix basis = es.eigenvectors();
            for (const auto& beta : grid) {
                RVector w(energies.size());
                for (Eigen::Index i = 0; i < energies.size(); ++i)
                    w(i) = std::exp(-beta(0) * (energies(i) - energies.minCoeff()));
                w /= w.sum();
                CMatrix rho = basis * w.cast<Complex>().asDiagonal() * basis.adjoint();
                states.push_back(validate_state(0.5 * (rho + rho.adjoint().eval()), tol));
            }
            break;
        }
        case ScenarioSpec::Kind::Depolarizing: {
            CVector psi = spec.pure_state;
            if (psi.size() < 2) throw InvalidRange("depolarizing scenario needs a state of dim >= 2");
            const double nrm = psi.norm();
            if (nrm <= 0.0) throw InvalidRange("depolarizing scenario needs a nonzero pure state");
            psi /= nrm;
            const auto d = static_cast<double>(psi.size());
            const CMatrix proj = psi * psi.adjoint();
            const CMatrix mixed = CMatrix::Identity(psi.size(), psi.size()) / d;
            for (const auto& p : grid) {
                if (p(0) < 0.0 || p(0) > 1.0)
                    throw InvalidRange("depolarizing probability must lie in [0, 1]");
                states.push_back(validate_state((1.0 - p(0)) * proj + p(0) * mixed, tol));
            }
            break;
        }
        case ScenarioSpec::Kind::DiagonalClassical:
            for (const auto& theta : grid) {
                if (theta(0) < 0.0 || theta(0) > 1.0)
                    throw InvalidRange("diagonal family parameter must lie in [0, 1]");
                CMatrix rho = CMatrix::Zero(2, 2);
                rho(0, 0) = theta(0);
                rho(1, 1) = 1.0 - theta(0);
                states.push_back(validate_state(rho, tol));
            }
            break;
        case ScenarioSpec::Kind::Custom:
            break;  // handled above
    }
    return ParametrisedState(1, std::move(grid), std::move(states), std::move(vols));
}

MachZehnderObjects mz_measurements() {
    const double s = 1.0 / std::numbers::sqrt2;
    CMatrix pm(2, 2);
    pm << s, s, s, -s;  // columns |+>, |->
    CMatrix eb(2, 2);
    eb(0, 0) = s;
    eb(1, 0) = s * std::exp(Complex(0.0, std::numbers::pi / 4.0));
    eb(0, 1) = s * std::exp(Complex(0.0, -std::numbers::pi / 4.0));
    eb(1, 1) = -s;
    std::vector<RVector> est{RVector::Constant(1, std::numbers::pi / 4.0),
                             RVector::Constant(1, std::numbers::pi / 2.0)};
    return MachZehnderObjects{Povm::projective_from_basis(pm), Povm::projective_from_basis(eb),
                              Estimator(std::move(est))};
}

std::vector<Povm> oracle_measurement_grid(int dim, int resolution) {
    if (dim != 2) throw UnsupportedDimension("oracle measurements are qubit-only");
    if (resolution < 1) throw InvalidRange("resolution must be >= 1");
    std::vector<Povm> out;
    out.reserve(static_cast<std::size_t>(resolution) * resolution + 1);
    for (int i = 0; i < resolution; ++i) {
        const double polar = std::numbers::pi * i / resolution;
        for (int j = 0; j < resolution; ++j) {
            const double azim = 2.0 * std::numbers::pi * j / resolution;
            CVector v(2);
            v(0) = std::cos(polar / 2.0);
            v(1) = std::exp(Complex(0.0, azim)) * std::sin(polar / 2.0);
            const CMatrix proj = v * v.adjoint();
            out.emplace_back(std::vector<CMatrix>{proj, CMatrix::Identity(2, 2) - proj});
        }
    }
    out.emplace_back(std::vector<CMatrix>{CMatrix::Identity(2, 2)});
    return out;
}

namespace {

// The oracle recomputes everything it scores; keeping these local avoids any
// dependency on the solver paths under test.
std::vector<std::vector<double>> oracle_probabilities(const ParametrisedState& s, const Povm& m) {
    std::vector<std::vector<double>> p(s.size(), std::vector<double>(m.outcomes()));
    for (std::size_t t = 0; t < s.size(); ++t)
        for (std::size_t k = 0; k < m.outcomes(); ++k)
            p[t][k] = std::clamp((s.states[t].matrix() * m.effect(k)).trace().real(), 0.0, 1.0);
    return p;
}

std::vector<double> oracle_profile(const ParametrisedState& s,
                                   const std::vector<std::vector<double>>& probs,
                                   const std::vector<RVector>& estimates,
                                   const LossFunction& loss) {
    std::vector<double> r(s.size(), 0.0);
    for (std::size_t t = 0; t < s.size(); ++t)
        for (std::size_t k = 0; k < estimates.size(); ++k)
            if (probs[t][k] > 0.0) r[t] += probs[t][k] * loss(estimates[k], s.grid[t]);
    return r;
}

bool advance(std::vector<std::size_t>& idx, std::size_t base) {
    for (std::size_t pos = idx.size(); pos-- > 0;) {
        if (++idx[pos] < base) return true;
        idx[pos] = 0;
    }
    return false;
}

OracleResult oracle_bayes(const ParametrisedState& s, const LossFunction& loss,
                          const std::vector<Povm>& measurements,
                          const std::vector<RVector>& lattice, const OracleBayesCriterion& crit,
                          double cap) {
    if (crit.prior.weights.size() != s.size()) throw GridMismatch();
    OracleResult result;
    double planned = 0.0;
    for (const auto& m : measurements)
        planned += static_cast<double>(m.outcomes()) *
                   static_cast<double>(std::max<std::size_t>(lattice.size(), 1)) *
                   static_cast<double>(s.size());
    if (planned > cap) throw SearchSpaceTooLarge(planned, cap);

    const auto& w = crit.prior.weights;
    for (std::size_t mi = 0; mi < measurements.size(); ++mi) {
        const Povm& m = measurements[mi];
        const auto probs = oracle_probabilities(s, m);
        std::vector<RVector> estimates(m.outcomes());
        double score = 0.0;
        for (std::size_t k = 0; k < m.outcomes(); ++k) {
            if (lattice.empty()) {
                // Exact per-outcome optimum: the posterior mean (prior mean
                // when the outcome never occurs).
                double marginal = 0.0;
                RVector num = RVector::Zero(s.param_dim);
                RVector prior_mean = RVector::Zero(s.param_dim);
                for (std::size_t t = 0; t < s.size(); ++t) {
                    marginal += w[t] * probs[t][k];
                    num += w[t] * probs[t][k] * s.grid[t];
                    prior_mean += w[t] * s.grid[t];
                }
                estimates[k] = marginal > 0.0 ? RVector((num / marginal).eval()) : prior_mean;
                for (std::size_t t = 0; t < s.size(); ++t) {
                    ++result.evaluations;
                    if (w[t] * probs[t][k] > 0.0)
                        score += w[t] * probs[t][k] * loss(estimates[k], s.grid[t]);
                }
            } else {
                double best = std::numeric_limits<double>::infinity();
                std::size_t best_v = 0;
                for (std::size_t v = 0; v < lattice.size(); ++v) {
                    double term = 0.0;
                    for (std::size_t t = 0; t < s.size(); ++t) {
                        ++result.evaluations;
                        if (w[t] * probs[t][k] > 0.0)
                            term += w[t] * probs[t][k] * loss(lattice[v], s.grid[t]);
                    }
                    if (term < best) {
                        best = term;
                        best_v = v;
                    }
                }
                estimates[k] = lattice[best_v];
                score += best;
            }
        }
        result.ranking.push_back(OracleEntry{mi, Estimator(std::move(estimates)), score});
    }
    std::stable_sort(result.ranking.begin(), result.ranking.end(),
                     [](const OracleEntry& a, const OracleEntry& b) { return a.score < b.score; });
    return result;
}

OracleResult oracle_preorder(const ParametrisedState& s, const LossFunction& loss,
                             const std::vector<Povm>& measurements,
                             const std::vector<RVector>& lattice,
                             const OraclePreorderCriterion& crit, double cap) {
    const Povm& ref = crit.reference_measurement;
    const double nl = static_cast<double>(lattice.size());
    const double ref_tuples = std::pow(nl, static_cast<double>(ref.outcomes()));
    double planned = ref_tuples * static_cast<double>(s.size());
    for (const auto& m : measurements)
        planned += std::pow(nl, static_cast<double>(m.outcomes())) * (ref_tuples + 1.0);
    if (planned > cap) throw SearchSpaceTooLarge(planned, cap);

    const Tolerances tol;
    const auto ref_probs = oracle_probabilities(s, ref);

    // Reference profiles: every lattice tuple plus the supplied estimator.
    std::vector<std::vector<double>> ref_profiles;
    {
        std::vector<std::size_t> idx(ref.outcomes(), 0);
        do {
            std::vector<RVector> est;
            est.reserve(idx.size());
            for (std::size_t v : idx) est.push_back(lattice[v]);
            ref_profiles.push_back(oracle_profile(s, ref_probs, est, loss));
        } while (advance(idx, lattice.size()));
        if (crit.reference_estimator.outcomes() == ref.outcomes())
            ref_profiles.push_back(
                oracle_profile(s, ref_probs, crit.reference_estimator.values, loss));
    }

    OracleResult result;
    for (std::size_t mi = 0; mi < measurements.size(); ++mi) {
        const Povm& cand = measurements[mi];
        const auto probs = oracle_probabilities(s, cand);
        double best_shortfall = -std::numeric_limits<double>::infinity();
        std::optional<Estimator> best_est;
        std::vector<std::size_t> idx(cand.outcomes(), 0);
        do {
            std::vector<RVector> est;
            est.reserve(idx.size());
            for (std::size_t v : idx) est.push_back(lattice[v]);
            const auto prof = oracle_profile(s, probs, est, loss);
            // How far the best reference estimator falls short of matching.
            double min_shortfall = std::numeric_limits<double>::infinity();
            for (const auto& rp : ref_profiles) {
                ++result.evaluations;
                double shortfall = -std::numeric_limits<double>::infinity();
                for (std::size_t t = 0; t < prof.size(); ++t)
                    shortfall = std::max(shortfall, rp[t] - prof[t]);
                min_shortfall = std::min(min_shortfall, shortfall);
                if (min_shortfall <= tol.dom) break;
            }
            if (min_shortfall > tol.dom && min_shortfall > best_shortfall) {
                best_shortfall = min_shortfall;
                best_est = Estimator(est);
            }
        } while (advance(idx, lattice.size()));
        if (best_est) {
            result.preorder_holds = false;
            result.ranking.push_back(OracleEntry{mi, std::move(*best_est), best_shortfall});
        }
    }
    std::stable_sort(result.ranking.begin(), result.ranking.end(),
                     [](const OracleEntry& a, const OracleEntry& b) { return a.score > b.score; });
    return result;
}

}  // namespace

OracleResult oracle_best_pair(const ParametrisedState& s, const LossFunction& loss,
                              const std::vector<Povm>& measurements,
                              std::vector<RVector> lattice, const OracleCriterion& criterion,
                              double cap) {
    if (measurements.empty()) throw ValidationError("oracle needs at least one measurement");
    for (const auto& m : measurements)
        if (m.dim() != s.hilbert_dim()) throw DimensionMismatch();
    if (std::holds_alternative<OraclePreorderCriterion>(criterion) && lattice.empty())
        lattice = s.grid;
    if (const auto* bayes = std::get_if<OracleBayesCriterion>(&criterion))
        return oracle_bayes(s, loss, measurements, lattice, *bayes, cap);
    return oracle_preorder(s, loss, measurements, lattice,
                           std::get<OraclePreorderCriterion>(criterion), cap);
}

}  // namespace qmeas
