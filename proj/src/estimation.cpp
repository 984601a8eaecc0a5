#include "qmeas/estimation.hpp"

#include <cmath>
#include <utility>

namespace qmeas {

LossFunction::LossFunction(Kind kind, std::string name,
                           std::function<double(const RVector&)> g,
                           std::function<RVector(const RVector&)> grad,
                           std::function<bool(const RVector&)> dom)
    : kind_(kind), name_(std::move(name)), generator_(std::move(g)), gradient_(std::move(grad)),
      in_domain_(std::move(dom)) {}

LossFunction LossFunction::least_squares() {
    return LossFunction(
        Kind::LeastSquares, "least_squares",
        [](const RVector& p) { return p.squaredNorm(); },
        [](const RVector& p) -> RVector { return 2.0 * p; },
        [](const RVector& p) { return all_finite(p); });
}

LossFunction LossFunction::kullback_leibler() {
    // Generator g(p) = sum_i p_i log p_i on the open positive orthant. On the
    // probability simplex the induced divergence reduces to the usual KL.
    return LossFunction(
        Kind::KullbackLeibler, "kullback_leibler",
        [](const RVector& p) {
            double g = 0.0;
            for (Eigen::Index i = 0; i < p.size(); ++i) g += p(i) * std::log(p(i));
            return g;
        },
        [](const RVector& p) -> RVector {
            RVector g(p.size());
            for (Eigen::Index i = 0; i < p.size(); ++i) g(i) = std::log(p(i)) + 1.0;
            return g;
        },
        [](const RVector& p) {
            if (!all_finite(p)) return false;
            for (Eigen::Index i = 0; i < p.size(); ++i)
                if (p(i) <= 0.0) return false;
            return true;
        });
}

LossFunction LossFunction::custom_bregman(std::string name,
                                          std::function<double(const RVector&)> generator,
                                          std::function<RVector(const RVector&)> gradient,
                                          std::function<bool(const RVector&)> in_domain) {
    return LossFunction(Kind::CustomBregman, std::move(name), std::move(generator),
                        std::move(gradient), std::move(in_domain));
}

double LossFunction::generator(const RVector& p) const {
    if (!in_domain_(p)) throw OutOfDomain("point outside the domain of loss '" + name_ + "'");
    return generator_(p);
}

RVector LossFunction::gradient(const RVector& p) const {
    if (!in_domain_(p)) throw OutOfDomain("point outside the domain of loss '" + name_ + "'");
    return gradient_(p);
}

double LossFunction::operator()(const RVector& estimate, const RVector& truth) const {
    if (estimate.size() != truth.size())
        throw DimensionMismatch("loss arguments have different parameter dimension");
    if (!in_domain_(estimate))
        throw OutOfDomain("estimate outside the domain of loss '" + name_ + "'");
    if (!in_domain_(truth))
        throw OutOfDomain("parameter outside the domain of loss '" + name_ + "'");
    if ((estimate - truth).cwiseAbs().maxCoeff() == 0.0) return 0.0;
    const double value =
        generator_(estimate) - generator_(truth) - gradient_(truth).dot(estimate - truth);
    return value;
}

Estimator::Estimator(std::vector<RVector> vals) : values(std::move(vals)) {
    if (values.empty()) throw ValidationError("estimator needs at least one outcome");
    const Eigen::Index n = values.front().size();
    for (const auto& v : values) {
        if (v.size() != n) throw DimensionMismatch("estimator values must share one dimension");
        if (!all_finite(v)) throw ValidationError("estimator values must be finite");
    }
}

Estimator Estimator::constant(std::size_t outcomes, RVector value) {
    return Estimator(std::vector<RVector>(outcomes, std::move(value)));
}

double risk(const ParametrisedState& s, const Povm& m, const Estimator& est,
            const LossFunction& loss, std::size_t grid_index) {
    if (grid_index >= s.size()) throw DimensionMismatch("grid index out of range");
    if (est.outcomes() != m.outcomes())
        throw DimensionMismatch("estimator outcome count != measurement outcome count");
    const auto p = outcome_distribution(s.states[grid_index], m);
    const RVector& theta = s.grid[grid_index];
    double r = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] > 0.0) r += p[k] * loss(est.values[k], theta);
    }
    return r;
}

RiskProfile risk_profile(const ParametrisedState& s, const Povm& m, const Estimator& est,
                         const LossFunction& loss) {
    RiskProfile profile;
    profile.grid = s.grid;
    profile.values.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) profile.values.push_back(risk(s, m, est, loss, i));
    return profile;
}

namespace {

void require_same_grid(const RiskProfile& a, const RiskProfile& b) {
    if (a.grid.size() != b.grid.size()) throw GridMismatch();
    for (std::size_t i = 0; i < a.grid.size(); ++i) {
        if (a.grid[i].size() != b.grid[i].size() ||
            (a.grid[i] - b.grid[i]).cwiseAbs().maxCoeff() > 1e-12)
            throw GridMismatch();
    }
}

}  // namespace

Domination dominates_pair(const RiskProfile& a, const RiskProfile& b, double tol_dom) {
    require_same_grid(a, b);
    bool everywhere = true;
    bool somewhere_strict = false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (a.values[i] > b.values[i] + tol_dom) everywhere = false;
        if (a.values[i] < b.values[i] - tol_dom) somewhere_strict = true;
    }
    if (everywhere && somewhere_strict) return Domination::Dominates;
    if (everywhere) return Domination::WeaklyBetter;
    return Domination::Incomparable;
}

Estimator transfer_estimator(const CMatrix& basis, const Povm& f, const Estimator& est_f) {
    if (basis.rows() != f.dim()) throw DimensionMismatch();
    if (est_f.outcomes() != f.outcomes())
        throw DimensionMismatch("estimator outcome count != measurement outcome count");
    const Eigen::Index n = est_f.values.front().size();
    std::vector<RVector> out;
    out.reserve(static_cast<std::size_t>(basis.cols()));
    for (Eigen::Index i = 0; i < basis.cols(); ++i) {
        RVector v = RVector::Zero(n);
        for (std::size_t k = 0; k < f.outcomes(); ++k) {
            const double w = (basis.col(i).adjoint() * f.effect(k) * basis.col(i))(0, 0).real();
            v += w * est_f.values[k];
        }
        out.push_back(std::move(v));
    }
    return Estimator(std::move(out));
}

namespace {

// Odometer over lattice indices, most-significant digit first, so tuples come
// out in lexicographic lattice order.
bool advance(std::vector<std::size_t>& idx, std::size_t base) {
    for (std::size_t pos = idx.size(); pos-- > 0;) {
        if (++idx[pos] < base) return true;
        idx[pos] = 0;
    }
    return false;
}

Estimator estimator_from(const std::vector<RVector>& lattice, const std::vector<std::size_t>& idx) {
    std::vector<RVector> vals;
    vals.reserve(idx.size());
    for (std::size_t i : idx) vals.push_back(lattice[i]);
    return Estimator(std::move(vals));
}

}  // namespace

PreorderResult measurement_preorder_bruteforce(const ParametrisedState& s, const Povm& m,
                                               const Povm& f, const LossFunction& loss,
                                               std::vector<RVector> lattice, double cap,
                                               double tol_dom,
                                               std::optional<CMatrix> transfer_basis) {
    if (lattice.empty()) lattice = s.grid;
    const double nl = static_cast<double>(lattice.size());
    const double m_tuples = std::pow(nl, static_cast<double>(m.outcomes()));
    const double f_tuples = std::pow(nl, static_cast<double>(f.outcomes()));
    if (f_tuples * m_tuples > cap || m_tuples * static_cast<double>(s.size()) > cap)
        throw SearchSpaceTooLarge(f_tuples * m_tuples, cap);

    // All M profiles up front; they are scanned once per F candidate.
    std::vector<std::vector<double>> m_profiles;
    m_profiles.reserve(static_cast<std::size_t>(m_tuples));
    {
        std::vector<std::size_t> idx(m.outcomes(), 0);
        do {
            m_profiles.push_back(risk_profile(s, m, estimator_from(lattice, idx), loss).values);
        } while (advance(idx, lattice.size()));
    }

    PreorderResult result;
    std::vector<std::size_t> fidx(f.outcomes(), 0);
    do {
        const Estimator cand = estimator_from(lattice, fidx);
        const auto fprof = risk_profile(s, f, cand, loss).values;
        bool matched = false;
        if (transfer_basis) {
            const auto tp = risk_profile(s, m, transfer_estimator(*transfer_basis, f, cand), loss);
            ++result.evaluations;
            matched = true;
            for (std::size_t i = 0; i < fprof.size(); ++i) {
                if (tp.values[i] > fprof[i] + tol_dom) {
                    matched = false;
                    break;
                }
            }
        }
        for (const auto& mp : m_profiles) {
            if (matched) break;
            ++result.evaluations;
            bool le = true;
            for (std::size_t i = 0; i < fprof.size(); ++i) {
                if (mp[i] > fprof[i] + tol_dom) {
                    le = false;
                    break;
                }
            }
            if (le) {
                matched = true;
                break;
            }
        }
        if (!matched) {
            result.holds = false;
            result.counterexample = cand;
            return result;
        }
    } while (advance(fidx, lattice.size()));
    result.holds = true;
    return result;
}

}  // namespace qmeas
