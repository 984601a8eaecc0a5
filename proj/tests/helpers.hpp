#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "qmeas/core.hpp"
#include "qmeas/estimation.hpp"

namespace qmeas::test {

inline CVector ket(std::initializer_list<Complex> amps) {
    CVector v(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index i = 0;
    for (const auto& a : amps) v(i++) = a;
    return v / v.norm();
}

inline CMatrix proj(const CVector& v) { return v * v.adjoint(); }

inline CVector ket0() { return ket({1.0, 0.0}); }
inline CVector ket1() { return ket({0.0, 1.0}); }
inline CVector ket_plus() { return ket({1.0, 1.0}); }
inline CVector ket_minus() { return ket({1.0, -1.0}); }

inline CMatrix diag2(double a, double b) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

inline RVector scalar(double x) { return RVector::Constant(1, x); }

inline ParametrisedState family_from(std::vector<double> thetas, std::vector<CMatrix> mats) {
    std::vector<RVector> grid;
    std::vector<DensityMatrix> states;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        grid.push_back(scalar(thetas[i]));
        states.push_back(validate_state(mats[i]));
    }
    return ParametrisedState(1, std::move(grid), std::move(states),
                             std::vector<double>(thetas.size(), 1.0));
}

inline Estimator scalar_estimator(std::initializer_list<double> values) {
    std::vector<RVector> v;
    for (double x : values) v.push_back(scalar(x));
    return Estimator(std::move(v));
}

}  // namespace qmeas::test

#include "qmeas/random.hpp"

namespace qmeas::test {

// Mixes every state of a classical family with an independent random state;
// the trace-norm distance to the base family stays below 2*mix.
inline ParametrisedState perturb_family(const ParametrisedState& base, double mix, Rng& rng) {
    std::vector<DensityMatrix> states;
    for (const auto& st : base.states) {
        const auto noise = random_density(st.dim(), rng, 0.1);
        states.push_back(
            validate_state((1.0 - mix) * st.matrix() + mix * noise.matrix()));
    }
    return ParametrisedState(base.param_dim, base.grid, std::move(states), base.cell_volumes);
}

}  // namespace qmeas::test
