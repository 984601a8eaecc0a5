#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "qmeas/admissibility.hpp"
#include "qmeas/random.hpp"
#include "qmeas/scenarios.hpp"

using namespace qmeas;
using namespace qmeas::test;

namespace {
constexpr double pi = std::numbers::pi;

KrausMeasurement identity_measurement(Eigen::Index dim) {
    return KrausMeasurement({CMatrix::Identity(dim, dim)});
}

Povm sigma_x_basis() {
    const double s = 1.0 / std::numbers::sqrt2;
    CMatrix basis(2, 2);
    basis << s, s, s, -s;
    return Povm::projective_from_basis(basis);
}

// sigma(theta) (x) sigma(theta) with sigma = diag(theta, 1 - theta).
ParametrisedState product_family(std::vector<double> thetas) {
    std::vector<CMatrix> mats;
    for (double t : thetas) {
        const CMatrix single = diag2(t, 1.0 - t);
        CMatrix out = CMatrix::Zero(4, 4);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                out(2 * a + b, 2 * a + b) = single(a, a) * single(b, b);
        mats.push_back(out);
    }
    return family_from(std::move(thetas), std::move(mats));
}

// Measures only the first qubit of a two-qubit system.
KrausMeasurement first_factor_measurement() {
    CMatrix k0 = CMatrix::Zero(4, 4), k1 = CMatrix::Zero(4, 4);
    k0(0, 0) = k0(1, 1) = 1.0;
    k1(2, 2) = k1(3, 3) = 1.0;
    return KrausMeasurement({k0, k1});
}
}  // namespace

TEST_CASE("find_refinability") {
    SUBCASE("identity measurement on a non-constant family: witness at outcome 0") {
        const auto family =
            build_scenario(ScenarioSpec::mach_zehnder(GridSpec::list({0.0, pi / 2})));
        const auto w = find_refinability(family, identity_measurement(2));
        REQUIRE(w.has_value());
        CHECK(w->outcome == 0);
        CHECK(w->theta_a == 0);
        CHECK(w->theta_b == 1);
        // Post states are the states themselves; gap is their trace distance.
        CHECK(w->post_state_gap ==
              doctest::Approx(trace_distance(family.states[0], family.states[1])).epsilon(1e-12));
        CHECK(w->prob_a == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("rank-1 projective Kraus measurements are never refineable") {
        const auto family = build_scenario(
            ScenarioSpec::diagonal_classical(GridSpec::linspace(0.2, 0.8, 5, true)));
        const KrausMeasurement projective({proj(ket0()), proj(ket1())});
        CHECK_FALSE(find_refinability(family, projective).has_value());
    }
    SUBCASE("measuring one factor of a product family leaves the other refinable") {
        const auto family = product_family({0.3, 0.7});
        const auto w = find_refinability(family, first_factor_measurement());
        REQUIRE(w.has_value());
        CHECK(w->outcome == 0);
        CHECK(w->post_state_gap > 0.1);
    }
    SUBCASE("constant families admit no witness") {
        const auto family = family_from({0.1, 0.9}, {diag2(0.5, 0.5), diag2(0.5, 0.5)});
        CHECK_FALSE(find_refinability(family, identity_measurement(2)).has_value());
    }
}

TEST_CASE("refine_measurement") {
    const Tolerances tol;
    SUBCASE("identity case reduces to the plain Helstrom measurement") {
        const auto family =
            build_scenario(ScenarioSpec::mach_zehnder(GridSpec::list({0.0, pi / 2})));
        const auto w = find_refinability(family, identity_measurement(2));
        const auto refined = refine_measurement(identity_measurement(2), *w, family);
        REQUIRE(refined.measurement.outcomes() == 2);
        const auto helstrom = helstrom_measurement(family.states[0], family.states[1]);
        const auto effects = refined.measurement.povm().effects();
        CHECK(max_abs(effects[0] - helstrom.effect(0)) < 1e-10);
        CHECK(max_abs(effects[1] - helstrom.effect(1)) < 1e-10);
    }
    SUBCASE("outcome counts: refining one of n outcomes gives n + 1") {
        const auto family = product_family({0.3, 0.7});
        const auto f = first_factor_measurement();
        const auto w = find_refinability(family, f);
        const auto refined = refine_measurement(f, *w, family);
        CHECK(refined.measurement.outcomes() == f.outcomes() + 1);
        // Kraus completeness is validated by the constructor; spot-check anyway.
        CMatrix sum = CMatrix::Zero(4, 4);
        for (std::size_t i = 0; i < refined.measurement.outcomes(); ++i)
            sum += refined.measurement.kraus(i).adjoint() * refined.measurement.kraus(i);
        CHECK(max_abs(sum - CMatrix::Identity(4, 4)) < tol.povm);
        // Labels: refined outcome appears twice, others once.
        int refined_count = 0;
        for (const auto& [orig, sub] : refined.labels)
            if (orig == refined.source_outcome) ++refined_count;
        CHECK(refined_count == 2);
    }
}

TEST_CASE("lift identity: lifted estimators inherit the exact risk profile") {
    Rng rng(71);
    const auto ls = LossFunction::least_squares();
    for (int it = 0; it < 25; ++it) {
        const auto family = random_family(2, 3, rng, 0.05);
        // Random two-outcome Kraus measurement built from a random POVM's
        // square roots; generically refineable.
        const auto povm = random_povm(2, 2, rng);
        std::vector<CMatrix> kraus;
        for (const auto& e : povm.effects()) {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(e);
            kraus.push_back(es.eigenvectors() *
                            es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                            es.eigenvectors().adjoint());
        }
        const KrausMeasurement f(std::move(kraus));
        const auto w = find_refinability(family, f);
        if (!w) continue;
        const auto refined = refine_measurement(f, *w, family);
        const auto est = random_grid_estimator(family, f.outcomes(), rng);
        const auto lifted = lift_estimator(refined, est);
        const auto rf = risk_profile(family, f.povm(), est, ls);
        const auto rl = risk_profile(family, refined.measurement.povm(), lifted, ls);
        for (std::size_t i = 0; i < rf.values.size(); ++i)
            CHECK(std::abs(rf.values[i] - rl.values[i]) <= 1e-10);
    }
}

TEST_CASE("dominate_refineable") {
    const auto ls = LossFunction::least_squares();

    SUBCASE("identity measurement on the Mach-Zehnder pair") {
        const auto family =
            build_scenario(ScenarioSpec::mach_zehnder(GridSpec::list({0.0, pi / 2})));
        const auto evidence = dominate_refineable(family, identity_measurement(2), ls);
        CHECK(evidence.estimator_split > 1.0);  // pi/2 - pi/6 apart, roughly
        CHECK(evidence.lift_max_deviation <= 1e-10);
        // Identity-measurement estimators are constants; the best constant
        // under the uniform two-point prior costs (pi/4)^2.
        CHECK(evidence.bayes_risk_original == doctest::Approx(pi * pi / 16.0).epsilon(1e-10));
        CHECK(evidence.bayes_risk_refined == doctest::Approx(0.308425).epsilon(1e-4));
        CHECK(evidence.improvement > 0.05);
        // Brute-force check: no constant estimator on a fine lattice beats the
        // refined pair's Bayes risk.
        double best_constant = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 1000; ++i) {
            const double c = (pi / 2) * i / 1000.0;
            best_constant = std::min(
                best_constant, 0.5 * c * c + 0.5 * (c - pi / 2) * (c - pi / 2));
        }
        CHECK(evidence.bayes_risk_refined < best_constant);
    }
    SUBCASE("constant families have nothing to refine") {
        const auto family = family_from({0.1, 0.9}, {diag2(0.5, 0.5), diag2(0.5, 0.5)});
        CHECK_THROWS_AS(dominate_refineable(family, identity_measurement(2), ls), NotRefineable);
    }
}

TEST_CASE("is_uninformative") {
    const auto mz_family = build_scenario(ScenarioSpec::mach_zehnder());
    const auto diag_family = build_scenario(
        ScenarioSpec::diagonal_classical(GridSpec::linspace(0.2, 0.8, 5, true)));

    CHECK(is_uninformative(diag_family, Povm({CMatrix::Identity(2, 2)})));
    CHECK(is_uninformative(diag_family, sigma_x_basis()));
    CHECK_FALSE(is_uninformative(mz_family, mz_measurements().plus_minus));
}

TEST_CASE("dominate_uninformative") {
    const auto ls = LossFunction::least_squares();

    SUBCASE("Mach-Zehnder pair with the trivial measurement") {
        const auto family =
            build_scenario(ScenarioSpec::mach_zehnder(GridSpec::list({0.0, pi / 2})));
        const auto evidence =
            dominate_uninformative(family, Povm({CMatrix::Identity(2, 2)}), ls);
        CHECK(evidence.verdict == Domination::Dominates);
        // Hand-derived posterior-mean risks: p_1 = (1 +- 1/sqrt 2)/2 gives
        // estimates 0.23002 and 1.34078 and risk 0.308435 at both points.
        CHECK(evidence.risk_ours_a == doctest::Approx(0.308435).epsilon(1e-5));
        CHECK(evidence.risk_ours_b == doctest::Approx(0.308435).epsilon(1e-5));
        CHECK(evidence.risk_const_a == doctest::Approx(pi * pi / 16.0).epsilon(1e-10));
        CHECK(evidence.margin > 0.3);
        CHECK(evidence.reduction_max_violation <= 1e-10);
        // No constant on a fine lattice over [0, pi/2] matches our pair
        // pointwise: the two interval conditions cannot hold at once.
        for (int i = 0; i <= 500; ++i) {
            const double c = (pi / 2) * i / 500.0;
            const bool beats_a = c * c <= evidence.risk_ours_a + 1e-12;
            const bool beats_b =
                (c - pi / 2) * (c - pi / 2) <= evidence.risk_ours_b + 1e-12;
            CHECK_FALSE((beats_a && beats_b));
        }
    }
    SUBCASE("diagonal family with the sigma_x basis: computational basis wins") {
        const auto family = build_scenario(
            ScenarioSpec::diagonal_classical(GridSpec::list({0.25, 0.75})));
        const auto evidence = dominate_uninformative(family, sigma_x_basis(), ls);
        CHECK(evidence.verdict == Domination::Dominates);
        // The Helstrom measurement of diag(0.25, 0.75) vs diag(0.75, 0.25) is
        // the computational basis.
        for (std::size_t k = 0; k < 2; ++k) {
            const double off = std::abs(evidence.measurement.effect(k)(0, 1));
            CHECK(off < 1e-12);
        }
        CHECK(evidence.margin > 0.0);
    }
    SUBCASE("refusals") {
        const auto constant = family_from({0.1, 0.9}, {diag2(0.5, 0.5), diag2(0.5, 0.5)});
        CHECK_THROWS_AS(dominate_uninformative(constant, Povm({CMatrix::Identity(2, 2)}), ls),
                        StateConstant);
        const auto mz_family =
            build_scenario(ScenarioSpec::mach_zehnder(GridSpec::list({0.0, pi / 2})));
        CHECK_THROWS_AS(dominate_uninformative(mz_family, mz_measurements().plus_minus, ls),
                        MeasurementInformative);
    }
    SUBCASE("identity-measurement corollary: succeeds exactly on non-constant families") {
        Rng rng(73);
        for (int it = 0; it < 10; ++it) {
            const auto family = random_family(2, 3, rng, 0.02);
            const auto evidence =
                dominate_uninformative(family, Povm({CMatrix::Identity(2, 2)}), ls);
            CHECK(evidence.verdict == Domination::Dominates);
            CHECK(evidence.margin > Tolerances{}.dom);
        }
    }
}

TEST_CASE("two-point Bayes estimates split exactly when the cross products differ") {
    Rng rng(79);
    const Tolerances tol;
    for (int it = 0; it < 25; ++it) {
        const auto family = random_family(2, 2, rng, 0.05);
        const auto m = random_povm(2, 2, rng);
        const auto pa = outcome_distribution(family.states[0], m);
        const auto pb = outcome_distribution(family.states[1], m);
        const double cross = std::abs(pa[0] * pb[1] - pa[1] * pb[0]);
        const auto est = posterior_mean_estimator(family, m, Prior::uniform(2), tol).estimator;
        const double split = (est.values[0] - est.values[1]).norm();
        if (cross > 1e-6) CHECK(split > 1e-9);
        if (cross < 1e-15) CHECK(split < 1e-9);
    }
    // Uninformative case: equal probabilities force equal posterior means.
    const auto diag_family = build_scenario(
        ScenarioSpec::diagonal_classical(GridSpec::list({0.25, 0.75})));
    const auto est =
        posterior_mean_estimator(diag_family, sigma_x_basis(), Prior::uniform(2), Tolerances{})
            .estimator;
    CHECK((est.values[0] - est.values[1]).norm() < 1e-12);
}

TEST_CASE("bregman_average_improvement") {
    const auto ls = LossFunction::least_squares();
    const auto family = build_scenario(
        ScenarioSpec::diagonal_classical(GridSpec::linspace(0.2, 0.8, 7, true)));
    const auto uninformative = sigma_x_basis();

    SUBCASE("swapped estimators on a symmetric problem average to a strict improvement") {
        const auto a = scalar_estimator({0.3, 0.7});
        const auto b = scalar_estimator({0.7, 0.3});
        const auto out = bregman_average_improvement(a, b, uninformative, family, ls);
        CHECK(out.estimator.values[0](0) == doctest::Approx(0.5));
        const auto shared = risk_profile(family, uninformative, a, ls);
        for (std::size_t i = 0; i < shared.values.size(); ++i) {
            CHECK(out.profile.values[i] <= shared.values[i] + 1e-12);
            // Both outcomes have probability 1/2 > 0.01: strict everywhere,
            // with the least-squares gap (a-b)^2/4 = 0.04.
            CHECK(shared.values[i] - out.profile.values[i] ==
                  doctest::Approx(0.04).epsilon(1e-10));
        }
    }
    SUBCASE("equal estimators are rejected") {
        const auto a = scalar_estimator({0.3, 0.7});
        CHECK_THROWS_AS(bregman_average_improvement(a, a, uninformative, family, ls),
                        EstimatorsEqual);
    }
    SUBCASE("profiles that differ are rejected") {
        const auto a = scalar_estimator({0.3, 0.7});
        const auto c = scalar_estimator({0.2, 0.75});
        CHECK_THROWS_AS(bregman_average_improvement(a, c, uninformative, family, ls),
                        ProfilesDiffer);
    }
}

TEST_CASE("built-in generators are strictly convex") {
    Rng rng(83);
    std::uniform_real_distribution<double> box(0.05, 1.5);
    for (const auto& loss : {LossFunction::least_squares(), LossFunction::kullback_leibler()}) {
        for (int it = 0; it < 50; ++it) {
            RVector t1(2), t2(2), ref(2);
            for (int i = 0; i < 2; ++i) {
                t1(i) = box(rng);
                t2(i) = box(rng);
                ref(i) = box(rng);
            }
            if ((t1 - t2).norm() < 1e-3) continue;
            const RVector mid = 0.5 * (t1 + t2);
            CHECK(loss(mid, ref) < 0.5 * loss(t1, ref) + 0.5 * loss(t2, ref) - 1e-12);
        }
    }
}
