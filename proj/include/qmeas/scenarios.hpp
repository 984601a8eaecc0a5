#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qmeas/bayes.hpp"
#include "qmeas/core.hpp"
#include "qmeas/estimation.hpp"

namespace qmeas {

/// Parameter grid description: either explicit points (with optional volumes)
/// or an evenly spaced range. Cell volumes default to the spacing for ranges
/// and to 1 for explicit points.
struct GridSpec {
    std::vector<double> points;   // explicit, used when nonempty
    std::vector<double> volumes;  // optional with explicit points
    double lo = 0.0;
    double hi = 1.0;
    int count = 0;
    bool include_hi = false;

    static GridSpec linspace(double lo, double hi, int count, bool include_hi = false);
    static GridSpec list(std::vector<double> pts, std::vector<double> vols = {});

    std::pair<std::vector<RVector>, std::vector<double>> materialize() const;
};

struct ScenarioSpec {
    enum class Kind { MachZehnder, Thermal, Depolarizing, DiagonalClassical, Custom };

    Kind kind = Kind::MachZehnder;
    GridSpec grid;
    CMatrix hamiltonian;  // Thermal
    CVector pure_state;   // Depolarizing
    std::optional<ParametrisedState> custom;

    static ScenarioSpec mach_zehnder();
    static ScenarioSpec mach_zehnder(GridSpec g);
    static ScenarioSpec thermal(GridSpec g, CMatrix h);
    static ScenarioSpec depolarizing(GridSpec g, CVector psi);
    static ScenarioSpec diagonal_classical(GridSpec g);
    /// Shorthands accepted by the CLI: mz, thermal, depol, diag.
    static ScenarioSpec from_shorthand(const std::string& name);
};

ParametrisedState build_scenario(const ScenarioSpec& spec, const Tolerances& tol = {});

/// |psi(theta)> = (|0> + e^{i theta} |1>)/sqrt(2), as a density matrix.
DensityMatrix mz_state(double theta);

struct MachZehnderObjects {
    Povm plus_minus;       // M, the +/- basis
    Povm e_basis;          // F, the pi/4-rotated basis
    Estimator estimator_f; // (pi/4, pi/2)
};

/// The worked-example objects: p_+(theta) = cos^2(theta/2) for M and
/// p_1(theta) = cos^2[(theta - pi/4)/2] for F.
MachZehnderObjects mz_measurements();

/// Qubit oracle measurements: rank-1 projective bases over a polar x azimuthal
/// Bloch grid (resolution steps each) plus the trivial single-outcome
/// measurement. Throws UnsupportedDimension for dim != 2.
std::vector<Povm> oracle_measurement_grid(int dim, int resolution);

struct OracleBayesCriterion {
    Prior prior;
};

/// Searches for measurements the reference cannot match: a candidate pair
/// (F, est) witnesses reference-M npreceq F when no lattice estimator on the
/// reference stays within tol_dom of it everywhere.
struct OraclePreorderCriterion {
    Povm reference_measurement;
    Estimator reference_estimator;
};

using OracleCriterion = std::variant<OracleBayesCriterion, OraclePreorderCriterion>;

struct OracleEntry {
    std::size_t measurement_index;
    Estimator estimator;
    double score;
};

struct OracleResult {
    /// Bayes criterion: every measurement with its best estimator, ascending
    /// Bayes risk. Preorder criterion: witnesses only, strongest first.
    std::vector<OracleEntry> ranking;
    std::uint64_t evaluations = 0;
    /// Preorder criterion only: true when no witness was found.
    bool preorder_holds = true;
};

/// Exhaustive search oracle. Deliberately recomputes probabilities and risks
/// inline so it stays independent of the solver paths it cross-checks. An
/// empty lattice means: grid points for the preorder criterion, exact
/// posterior-mean estimators for the Bayes criterion.
OracleResult oracle_best_pair(const ParametrisedState& s, const LossFunction& loss,
                              const std::vector<Povm>& measurements,
                              std::vector<RVector> lattice, const OracleCriterion& criterion,
                              double cap = 1e7);

}  // namespace qmeas
