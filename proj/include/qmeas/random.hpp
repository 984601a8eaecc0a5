#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qmeas/core.hpp"
#include "qmeas/estimation.hpp"

namespace qmeas {

using Rng = std::mt19937_64;

/// Haar-ish random unitary via QR of a complex Ginibre matrix.
CMatrix random_unitary(Eigen::Index dim, Rng& rng);

/// G G^dag / Tr, optionally mixed with the maximally mixed state so the
/// smallest eigenvalue is at least min_eigenvalue.
DensityMatrix random_density(Eigen::Index dim, Rng& rng, double min_eigenvalue = 0.0);

/// Random POVM from squared Ginibre blocks, renormalized to completeness.
Povm random_povm(Eigen::Index dim, std::size_t outcomes, Rng& rng);

/// Probability vector with every entry at least floor_value.
std::vector<double> random_probability_vector(std::size_t n, Rng& rng, double floor_value = 0.0);

/// Random point of the grid's convex hull; stays inside any Bregman domain
/// that contains the grid.
RVector random_convex_combination(const std::vector<RVector>& points, Rng& rng);

/// Random estimator whose values are convex combinations of grid points.
Estimator random_grid_estimator(const ParametrisedState& s, std::size_t outcomes, Rng& rng);

/// Classical family: one random basis, random probability weights per point.
/// Grid is n_points values evenly spread in [0, 1] with unit cell volumes.
ParametrisedState random_classical_family(Eigen::Index dim, std::size_t n_points, Rng& rng,
                                          double probability_floor = 0.0);

/// Generic random family (full-rank states, generically non-classical).
ParametrisedState random_family(Eigen::Index dim, std::size_t n_points, Rng& rng,
                                double min_eigenvalue = 0.0);

}  // namespace qmeas
