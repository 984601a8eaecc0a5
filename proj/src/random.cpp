#include "qmeas/random.hpp"

#include <Eigen/QR>
#include <cmath>

namespace qmeas {

namespace {

CMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix g(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    return g;
}

}  // namespace

CMatrix random_unitary(Eigen::Index dim, Rng& rng) {
    const CMatrix g = ginibre(dim, dim, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    // Fix phases so the factorization is unique given the draw.
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < dim; ++i) {
        const Complex d = r(i, i);
        if (std::abs(d) > 0.0) q.col(i) *= d / std::abs(d);
    }
    return q;
}

DensityMatrix random_density(Eigen::Index dim, Rng& rng, double min_eigenvalue) {
    const CMatrix g = ginibre(dim, dim, rng);
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    if (min_eigenvalue > 0.0) {
        const double mix = min_eigenvalue * static_cast<double>(dim);
        rho = (1.0 - mix) * rho + (mix / static_cast<double>(dim)) * CMatrix::Identity(dim, dim);
    }
    rho = 0.5 * (rho + rho.adjoint().eval());
    return validate_state(rho);
}

Povm random_povm(Eigen::Index dim, std::size_t outcomes, Rng& rng) {
    std::vector<CMatrix> raw;
    raw.reserve(outcomes);
    CMatrix total = CMatrix::Zero(dim, dim);
    for (std::size_t k = 0; k < outcomes; ++k) {
        const CMatrix g = ginibre(dim, dim, rng);
        CMatrix e = g * g.adjoint();
        raw.push_back(e);
        total += e;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(total);
    const CMatrix inv_sqrt = es.eigenvectors() *
                             es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                             es.eigenvectors().adjoint();
    std::vector<CMatrix> effects;
    effects.reserve(outcomes);
    for (auto& e : raw) {
        CMatrix eff = inv_sqrt * e * inv_sqrt;
        effects.push_back(0.5 * (eff + eff.adjoint().eval()));
    }
    return Povm(std::move(effects));
}

std::vector<double> random_probability_vector(std::size_t n, Rng& rng, double floor_value) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> p(n);
    double sum = 0.0;
    for (auto& x : p) {
        x = expo(rng);
        sum += x;
    }
    for (auto& x : p) x = floor_value + (1.0 - floor_value * static_cast<double>(n)) * (x / sum);
    return p;
}

RVector random_convex_combination(const std::vector<RVector>& points, Rng& rng) {
    const auto w = random_probability_vector(points.size(), rng);
    RVector v = RVector::Zero(points.front().size());
    for (std::size_t i = 0; i < points.size(); ++i) v += w[i] * points[i];
    return v;
}

Estimator random_grid_estimator(const ParametrisedState& s, std::size_t outcomes, Rng& rng) {
    std::vector<RVector> vals;
    vals.reserve(outcomes);
    for (std::size_t k = 0; k < outcomes; ++k) vals.push_back(random_convex_combination(s.grid, rng));
    return Estimator(std::move(vals));
}

ParametrisedState random_classical_family(Eigen::Index dim, std::size_t n_points, Rng& rng,
                                          double probability_floor) {
    const CMatrix u = random_unitary(dim, rng);
    std::vector<RVector> grid;
    std::vector<DensityMatrix> states;
    for (std::size_t i = 0; i < n_points; ++i) {
        grid.push_back(RVector::Constant(
            1, n_points == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n_points - 1)));
        const auto p = random_probability_vector(static_cast<std::size_t>(dim), rng,
                                                 probability_floor);
        CMatrix rho = CMatrix::Zero(dim, dim);
        for (Eigen::Index j = 0; j < dim; ++j)
            rho += p[static_cast<std::size_t>(j)] * (u.col(j) * u.col(j).adjoint());
        states.push_back(validate_state(0.5 * (rho + rho.adjoint().eval())));
    }
    return ParametrisedState(1, std::move(grid), std::move(states),
                             std::vector<double>(n_points, 1.0));
}

ParametrisedState random_family(Eigen::Index dim, std::size_t n_points, Rng& rng,
                                double min_eigenvalue) {
    std::vector<RVector> grid;
    std::vector<DensityMatrix> states;
    for (std::size_t i = 0; i < n_points; ++i) {
        grid.push_back(RVector::Constant(
            1, n_points == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n_points - 1)));
        states.push_back(random_density(dim, rng, min_eigenvalue));
    }
    return ParametrisedState(1, std::move(grid), std::move(states),
                             std::vector<double>(n_points, 1.0));
}

}  // namespace qmeas
