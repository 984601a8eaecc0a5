#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qmeas/core.hpp"

namespace qmeas {

/// A Bregman loss: B(a, b) = g(a) - g(b) - grad g(b) . (a - b) for a strictly
/// convex generator g. Least squares and (generalized) Kullback-Leibler are
/// built in; anything else goes through custom_bregman.
class LossFunction {
public:
    enum class Kind { LeastSquares, KullbackLeibler, CustomBregman };

    static LossFunction least_squares();
    static LossFunction kullback_leibler();
    static LossFunction custom_bregman(std::string name,
                                       std::function<double(const RVector&)> generator,
                                       std::function<RVector(const RVector&)> gradient,
                                       std::function<bool(const RVector&)> in_domain);

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    bool in_domain(const RVector& p) const { return in_domain_(p); }
    double generator(const RVector& p) const;
    RVector gradient(const RVector& p) const;

    /// The divergence B(estimate, truth). Throws OutOfDomain.
    double operator()(const RVector& estimate, const RVector& truth) const;

private:
    LossFunction(Kind kind, std::string name, std::function<double(const RVector&)> g,
                 std::function<RVector(const RVector&)> grad,
                 std::function<bool(const RVector&)> dom);

    Kind kind_;
    std::string name_;
    std::function<double(const RVector&)> generator_;
    std::function<RVector(const RVector&)> gradient_;
    std::function<bool(const RVector&)> in_domain_;
};

/// One parameter estimate per measurement outcome.
struct Estimator {
    std::vector<RVector> values;

    Estimator() = default;
    explicit Estimator(std::vector<RVector> vals);
    static Estimator constant(std::size_t outcomes, RVector value);

    std::size_t outcomes() const { return values.size(); }
};

struct RiskProfile {
    std::vector<RVector> grid;
    std::vector<double> values;
};

/// R(est, theta) = sum_k Tr(rho(theta) M_k) L(est(k), theta) at one grid point.
/// Outcomes with zero probability contribute nothing; their estimates are not
/// domain-checked.
double risk(const ParametrisedState& s, const Povm& m, const Estimator& est,
            const LossFunction& loss, std::size_t grid_index);

RiskProfile risk_profile(const ParametrisedState& s, const Povm& m, const Estimator& est,
                         const LossFunction& loss);

enum class Domination { Dominates, WeaklyBetter, Incomparable };

/// Compares two risk profiles over the same grid. Dominates means "at most b
/// everywhere and strictly below it somewhere", with tol_dom as the margin on
/// both clauses so roundoff never counts as strictness.
Domination dominates_pair(const RiskProfile& a, const RiskProfile& b,
                          double tol_dom = Tolerances{}.dom);

/// The estimator transfer of the classical-optimality construction:
/// theta_M(i) = sum_k Tr(F_k |i><i|) theta_F(k) for basis columns |i>.
Estimator transfer_estimator(const CMatrix& basis, const Povm& f, const Estimator& est_f);

struct PreorderResult {
    bool holds = false;
    /// First F-estimator (lexicographic lattice order) with no M counterpart.
    std::optional<Estimator> counterexample;
    std::uint64_t evaluations = 0;
};

/// Lattice-restricted check of M <= F: every F-estimator over the lattice must
/// be matched pointwise by some M-estimator over the lattice. "Holds" is
/// complete only relative to the candidate set; a counterexample certifies
/// that the search failed, not that no real-valued match exists. When M is
/// projective over transfer_basis, passing the basis adds the (off-lattice)
/// transferred estimator to the M candidates, which makes "holds" exact for
/// classical families.
PreorderResult measurement_preorder_bruteforce(const ParametrisedState& s, const Povm& m,
                                               const Povm& f, const LossFunction& loss,
                                               std::vector<RVector> lattice,
                                               double cap = 1e7,
                                               double tol_dom = Tolerances{}.dom,
                                               std::optional<CMatrix> transfer_basis = {});

}  // namespace qmeas
