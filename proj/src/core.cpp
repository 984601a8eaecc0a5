#include "qmeas/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace qmeas {

double max_abs(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

double operator_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues().maxCoeff();
}

double hermiticity_residual(const CMatrix& a) { return max_abs(a - a.adjoint()); }

bool all_finite(const CMatrix& a) { return a.allFinite(); }
bool all_finite(const RVector& v) { return v.allFinite(); }

namespace {

void require_square(const CMatrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw DimensionMismatch("matrix must be square with dim >= 1, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

double min_eigenvalue(const CMatrix& herm) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

DensityMatrix::DensityMatrix(CMatrix mat, const Tolerances& tol) : mat_(std::move(mat)) {
    require_square(mat_);
    if (!all_finite(mat_)) throw ValidationError("density matrix entries must be finite");
    const double herm = hermiticity_residual(mat_);
    if (herm > tol.herm) throw NotHermitian(herm);
    const double lam_min = min_eigenvalue(mat_);
    if (lam_min < -tol.psd) throw NotPsd(lam_min);
    const double tr = mat_.trace().real();
    if (std::abs(tr - 1.0) > tol.trace) throw TraceNotOne(tr);
}

DensityMatrix DensityMatrix::unchecked(CMatrix mat) {
    return DensityMatrix(std::move(mat), UncheckedTag{});
}

DensityMatrix validate_state(const CMatrix& rho, const Tolerances& tol) {
    return DensityMatrix(rho, tol);
}

Povm::Povm(std::vector<CMatrix> effects, const Tolerances& tol) : effects_(std::move(effects)) {
    if (effects_.empty()) throw ValidationError("POVM needs at least one effect");
    const Eigen::Index d = effects_.front().rows();
    CMatrix sum = CMatrix::Zero(d, d);
    for (const auto& e : effects_) {
        require_square(e);
        if (e.rows() != d) throw DimensionMismatch("POVM effects must share one Hilbert dimension");
        if (!all_finite(e)) throw ValidationError("POVM effect entries must be finite");
        const double herm = hermiticity_residual(e);
        if (herm > tol.herm) throw NotHermitian(herm);
        const double lam_min = min_eigenvalue(e);
        if (lam_min < -tol.psd) throw NotPsd(lam_min);
        sum += e;
    }
    const double completeness = max_abs(sum - CMatrix::Identity(d, d));
    if (completeness > tol.povm) throw PovmIncomplete(completeness);
}

Povm Povm::projective_from_basis(const CMatrix& basis, const Tolerances& tol) {
    std::vector<CMatrix> effects;
    effects.reserve(static_cast<std::size_t>(basis.cols()));
    for (Eigen::Index i = 0; i < basis.cols(); ++i) {
        const CVector v = basis.col(i);
        effects.push_back(v * v.adjoint());
    }
    return Povm(std::move(effects), tol);
}

KrausMeasurement::KrausMeasurement(std::vector<CMatrix> kraus, const Tolerances& tol)
    : kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw ValidationError("Kraus measurement needs at least one operator");
    const Eigen::Index d = kraus_.front().rows();
    CMatrix sum = CMatrix::Zero(d, d);
    for (const auto& f : kraus_) {
        require_square(f);
        if (f.rows() != d) throw DimensionMismatch("Kraus operators must share one Hilbert dimension");
        if (!all_finite(f)) throw ValidationError("Kraus operator entries must be finite");
        sum += f.adjoint() * f;
    }
    const double completeness = max_abs(sum - CMatrix::Identity(d, d));
    if (completeness > tol.povm) throw PovmIncomplete(completeness);
}

Povm KrausMeasurement::povm(const Tolerances& tol) const {
    std::vector<CMatrix> effects;
    effects.reserve(kraus_.size());
    for (const auto& f : kraus_) {
        CMatrix e = f.adjoint() * f;
        effects.push_back(0.5 * (e + e.adjoint().eval()));
    }
    return Povm(std::move(effects), tol);
}

ParametrisedState::ParametrisedState(int n, std::vector<RVector> pts,
                                     std::vector<DensityMatrix> st, std::vector<double> vols)
    : param_dim(n), grid(std::move(pts)), states(std::move(st)), cell_volumes(std::move(vols)) {
    if (param_dim < 1) throw ValidationError("param_dim must be >= 1");
    if (grid.empty()) throw ValidationError("grid must be nonempty");
    if (states.size() != grid.size() || cell_volumes.size() != grid.size())
        throw DimensionMismatch("grid, states and cell_volumes must have equal length");
    const Eigen::Index d = states.front().dim();
    for (const auto& s : states)
        if (s.dim() != d) throw DimensionMismatch("all states must share one Hilbert dimension");
    for (const auto& p : grid) {
        if (p.size() != param_dim) throw DimensionMismatch("grid point dimension != param_dim");
        if (!all_finite(p)) throw ValidationError("grid points must be finite");
    }
    for (double v : cell_volumes)
        if (!(v >= 0.0)) throw ValidationError("cell volumes must be nonnegative");
    for (std::size_t a = 0; a < grid.size(); ++a)
        for (std::size_t b = a + 1; b < grid.size(); ++b)
            if ((grid[a] - grid[b]).cwiseAbs().maxCoeff() == 0.0)
                throw ValidationError("grid points must be pairwise distinct (indices " +
                                      std::to_string(a) + ", " + std::to_string(b) + ")");
}

double ParametrisedState::total_volume() const {
    double t = 0.0;
    for (double v : cell_volumes) t += v;
    return t;
}

ParametrisedState ParametrisedState::restricted_to(const std::vector<std::size_t>& indices) const {
    std::vector<RVector> pts;
    std::vector<DensityMatrix> st;
    std::vector<double> vols;
    for (std::size_t i : indices) {
        if (i >= grid.size()) throw DimensionMismatch("restriction index out of range");
        pts.push_back(grid[i]);
        st.push_back(states[i]);
        vols.push_back(cell_volumes[i]);
    }
    return ParametrisedState(param_dim, std::move(pts), std::move(st), std::move(vols));
}

std::vector<double> outcome_distribution(const DensityMatrix& rho, const Povm& m) {
    if (rho.dim() != m.dim()) throw DimensionMismatch();
    std::vector<double> p(m.outcomes());
    for (std::size_t k = 0; k < m.outcomes(); ++k) {
        double v = (rho.matrix() * m.effect(k)).trace().real();
        p[k] = std::clamp(v, 0.0, 1.0);
    }
    return p;
}

double trace_norm(const CMatrix& a) {
    require_square(a);
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch();
    return 0.5 * trace_norm(a.matrix() - b.matrix());
}

double d_max(const DensityMatrix& rho, const DensityMatrix& sigma, const Tolerances& tol) {
    if (rho.dim() != sigma.dim()) throw DimensionMismatch();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sigma.matrix());
    const RVector lam = es.eigenvalues();
    const CMatrix u = es.eigenvectors();
    const double lam_max = lam.maxCoeff();
    const double kernel_cut = tol.rank * lam_max;

    // Mass of rho on sigma's kernel decides the support condition.
    double kernel_mass = 0.0;
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) <= kernel_cut) {
            kernel_mass += (u.col(i).adjoint() * rho.matrix() * u.col(i))(0, 0).real();
        } else {
            support.push_back(i);
        }
    }
    if (kernel_mass > tol.psd) return std::numeric_limits<double>::infinity();

    CMatrix b(sigma.dim(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j)
        b.col(static_cast<Eigen::Index>(j)) = u.col(support[j]) / std::sqrt(lam(support[j]));
    const CMatrix m = b.adjoint() * rho.matrix() * b;
    Eigen::SelfAdjointEigenSolver<CMatrix> em(m, Eigen::EigenvaluesOnly);
    const double top = em.eigenvalues().maxCoeff();
    if (top <= 0.0) return std::numeric_limits<double>::infinity();
    // States obey d_max >= 0; tiny negatives are eigensolver roundoff.
    return std::max(0.0, std::log(top));
}

Povm helstrom_measurement(const DensityMatrix& rho1, const DensityMatrix& rho2,
                          const Tolerances& tol) {
    if (rho1.dim() != rho2.dim()) throw DimensionMismatch();
    const CMatrix delta = rho1.matrix() - rho2.matrix();
    if (trace_norm(delta) <= tol.eq) throw StatesEqual();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(delta);
    const Eigen::Index d = delta.rows();
    CMatrix plus = CMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        // Zero eigenvalues land in outcome 1; -tol.prob absorbs roundoff signs.
        if (es.eigenvalues()(i) >= -tol.prob) {
            const CVector v = es.eigenvectors().col(i);
            plus += v * v.adjoint();
        }
    }
    plus = 0.5 * (plus + plus.adjoint().eval());
    CMatrix minus = CMatrix::Identity(d, d) - plus;
    return Povm({plus, minus}, tol);
}

DensityMatrix post_measurement_state(const DensityMatrix& rho, const KrausMeasurement& f,
                                     std::size_t outcome, const Tolerances& tol) {
    if (outcome >= f.outcomes()) throw ValidationError("outcome index out of range");
    if (rho.dim() != f.dim()) throw DimensionMismatch();
    const CMatrix& op = f.kraus(outcome);
    CMatrix a = op * rho.matrix() * op.adjoint();
    a = 0.5 * (a + a.adjoint().eval());
    const double p = a.trace().real();
    if (p <= tol.prob) throw OutcomeImpossible(p);
    return DensityMatrix::unchecked(a / p);
}

std::vector<std::pair<int, int>> group_eigenvalues(const RVector& sorted_eigenvalues,
                                                   double rel_gap) {
    std::vector<std::pair<int, int>> runs;
    const int n = static_cast<int>(sorted_eigenvalues.size());
    if (n == 0) return runs;
    const double scale = std::max(1.0, sorted_eigenvalues.cwiseAbs().maxCoeff());
    int start = 0;
    for (int i = 1; i < n; ++i) {
        if (sorted_eigenvalues(i) - sorted_eigenvalues(i - 1) > rel_gap * scale) {
            runs.emplace_back(start, i - start);
            start = i;
        }
    }
    runs.emplace_back(start, n - start);
    return runs;
}

namespace {

// Splits each current block by the eigenspaces of rho restricted to it.
std::vector<CMatrix> refine_blocks(const std::vector<CMatrix>& blocks, const CMatrix& rho,
                                   double group_tol) {
    std::vector<CMatrix> out;
    for (const auto& b : blocks) {
        if (b.cols() == 1) {
            out.push_back(b);
            continue;
        }
        const CMatrix m = b.adjoint() * rho * b;
        Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
        const auto runs = group_eigenvalues(es.eigenvalues(), group_tol);
        for (const auto& [start, count] : runs)
            out.push_back(b * es.eigenvectors().middleCols(start, count));
    }
    return out;
}

}  // namespace

ClassicalityCertificate classicality_certificate(const ParametrisedState& s, double tol_comm) {
    if (s.size() == 0) throw ValidationError("classicality check needs a nonempty grid");
    ClassicalityCertificate cert;
    cert.max_commutator_norm = 0.0;
    for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = a + 1; b < s.size(); ++b) {
            const CMatrix comm = s.states[a].matrix() * s.states[b].matrix() -
                                 s.states[b].matrix() * s.states[a].matrix();
            const double nrm = operator_norm(comm);
            if (nrm > cert.max_commutator_norm) {
                cert.max_commutator_norm = nrm;
                cert.witness_a = a;
                cert.witness_b = b;
            }
        }
    }
    cert.classical = cert.max_commutator_norm <= tol_comm;
    if (!cert.classical) return cert;

    const Tolerances tol;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(s.states.front().matrix());
    std::vector<CMatrix> blocks;
    for (const auto& [start, count] : group_eigenvalues(es.eigenvalues(), tol.group))
        blocks.push_back(es.eigenvectors().middleCols(start, count));
    for (std::size_t t = 1; t < s.size(); ++t)
        blocks = refine_blocks(blocks, s.states[t].matrix(), tol.group);

    CMatrix basis(s.hilbert_dim(), s.hilbert_dim());
    Eigen::Index col = 0;
    for (const auto& b : blocks) {
        basis.middleCols(col, b.cols()) = b;
        col += b.cols();
    }
    cert.common_basis = basis;
    return cert;
}

CMatrix basis_from_projective(const Povm& m, const Tolerances& tol) {
    const Eigen::Index d = m.dim();
    if (static_cast<Eigen::Index>(m.outcomes()) != d)
        throw ValidationError("rank-1 projective POVM must have dim outcomes");
    CMatrix basis(d, d);
    for (std::size_t k = 0; k < m.outcomes(); ++k) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(m.effect(k));
        const RVector lam = es.eigenvalues();
        // Top eigenvalue 1, the rest 0, up to a loose numerical margin.
        if (std::abs(lam(d - 1) - 1.0) > 1e3 * tol.povm ||
            (d > 1 && std::abs(lam(d - 2)) > 1e3 * tol.povm))
            throw ValidationError("POVM effect " + std::to_string(k) + " is not a rank-1 projector");
        basis.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(d - 1);
    }
    return basis;
}

}  // namespace qmeas
