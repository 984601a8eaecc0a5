#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "qmeas/core.hpp"
#include "qmeas/random.hpp"
#include "qmeas/scenarios.hpp"

using namespace qmeas;
using namespace qmeas::test;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("validate_state accepts pure states and rejects the named violations") {
    CHECK_NOTHROW(validate_state(diag2(1.0, 0.0)));

    CHECK_THROWS_AS(validate_state(diag2(0.5, 0.6)), TraceNotOne);

    // [[0.5, 0.6], [0.6, 0.5]] has eigenvalues 1.1 and -0.1.
    CMatrix m(2, 2);
    m << 0.5, 0.6, 0.6, 0.5;
    try {
        validate_state(m);
        FAIL("expected NotPsd");
    } catch (const NotPsd& e) {
        CHECK(e.min_eigenvalue == doctest::Approx(-0.1).epsilon(1e-12));
    }

    CMatrix nh(2, 2);
    nh << 0.5, 0.5, -0.5, 0.5;
    CHECK_THROWS_AS(validate_state(nh), NotHermitian);

    CHECK_THROWS_AS(validate_state(CMatrix::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("outcome_distribution matches the worked example") {
    const auto mz = mz_measurements();

    SUBCASE("theta = 0 in the +/- basis is deterministic") {
        const auto p = outcome_distribution(mz_state(0.0), mz.plus_minus);
        CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("maximally mixed state splits any projective qubit measurement") {
        const auto rho = validate_state(diag2(0.5, 0.5));
        const auto p = outcome_distribution(rho, mz.e_basis);
        CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("theta = pi/2 reproduces cos^2(pi/4)") {
        const auto p = outcome_distribution(mz_state(pi / 2), mz.plus_minus);
        CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("dimension mismatch is rejected") {
        const auto rho3 = validate_state(CMatrix::Identity(3, 3) / 3.0);
        CHECK_THROWS_AS(outcome_distribution(rho3, mz.plus_minus), DimensionMismatch);
    }
}

TEST_CASE("trace_norm on known matrices") {
    CHECK(trace_norm(diag2(1.0, -1.0)) == doctest::Approx(2.0).epsilon(1e-12));

    Rng rng(7);
    const auto rho = random_density(4, rng);
    CHECK(trace_norm(rho.matrix()) == doctest::Approx(1.0).epsilon(1e-12));

    // |0><0| - |+><+| has eigenvalues +-1/sqrt(2).
    const CMatrix diff = proj(ket0()) - proj(ket_plus());
    CHECK(trace_norm(diff) == doctest::Approx(std::numbers::sqrt2).epsilon(1e-12));
}

TEST_CASE("trace_norm symmetry and triangle inequality on random states") {
    Rng rng(11);
    for (int it = 0; it < 25; ++it) {
        const auto a = random_density(3, rng);
        const auto b = random_density(3, rng);
        const auto c = random_density(3, rng);
        const double ab = trace_norm(a.matrix() - b.matrix());
        const double ba = trace_norm(b.matrix() - a.matrix());
        CHECK(ab == doctest::Approx(ba).epsilon(1e-10));
        const double ac = trace_norm(a.matrix() - c.matrix());
        const double cb = trace_norm(c.matrix() - b.matrix());
        CHECK(ab <= ac + cb + 1e-10);
    }
}

TEST_CASE("d_max on known pairs") {
    const auto half = validate_state(diag2(0.5, 0.5));
    const auto skewed = validate_state(diag2(0.75, 0.25));
    const auto pure = validate_state(proj(ket0()));

    CHECK(d_max(half, half) == doctest::Approx(0.0).epsilon(1e-12));
    // Need e^gamma >= (1/2)/(1/4) on the second diagonal entry.
    CHECK(d_max(half, skewed) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // lambda_max(2 |0><0|) = 2.
    CHECK(d_max(pure, half) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // Support of the mixed state sticks out of the pure state's.
    CHECK(std::isinf(d_max(half, pure)));
}

TEST_CASE("d_max is nonnegative and vanishes exactly on rho <= sigma") {
    Rng rng(13);
    for (int it = 0; it < 25; ++it) {
        const auto rho = random_density(3, rng);
        const auto sigma = random_density(3, rng, 0.05);
        const double v = d_max(rho, sigma);
        CHECK(v >= 0.0);
        // d_max = 0 iff rho <= sigma, i.e. sigma - rho is PSD.
        Eigen::SelfAdjointEigenSolver<CMatrix> es(sigma.matrix() - rho.matrix());
        const bool leq = es.eigenvalues().minCoeff() >= -1e-9;
        CHECK((v <= 1e-9) == leq);
    }
    const auto rho = random_density(3, rng);
    CHECK(d_max(rho, rho) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("helstrom_measurement discriminates optimally") {
    SUBCASE("orthogonal pure states separate exactly") {
        const auto m = helstrom_measurement(validate_state(proj(ket0())),
                                            validate_state(proj(ket1())));
        CHECK(max_abs(m.effect(0) - proj(ket0())) < 1e-12);
        CHECK(max_abs(m.effect(1) - proj(ket1())) < 1e-12);
    }
    SUBCASE("equal states are rejected") {
        const auto rho = validate_state(diag2(0.5, 0.5));
        CHECK_THROWS_AS(helstrom_measurement(rho, rho), StatesEqual);
    }
    SUBCASE("|0> vs |+>: probability gap is half the trace distance") {
        const auto r1 = validate_state(proj(ket0()));
        const auto r2 = validate_state(proj(ket_plus()));
        const auto m = helstrom_measurement(r1, r2);
        const double p1 = outcome_distribution(r1, m)[0];
        const double p2 = outcome_distribution(r2, m)[0];
        const double gap = std::abs(p1 - p2);
        CHECK(gap == doctest::Approx(0.5 * trace_norm(r1.matrix() - r2.matrix())).epsilon(1e-9));
    }
    SUBCASE("no brute-force qubit measurement beats the Helstrom gap") {
        Rng rng(17);
        const auto r1 = random_density(2, rng);
        const auto r2 = random_density(2, rng);
        const auto m = helstrom_measurement(r1, r2);
        const double best = std::abs(outcome_distribution(r1, m)[0] -
                                     outcome_distribution(r2, m)[0]);
        CHECK(best == doctest::Approx(0.5 * trace_norm(r1.matrix() - r2.matrix())).epsilon(1e-9));
        for (const auto& cand : oracle_measurement_grid(2, 24)) {
            if (cand.outcomes() != 2) continue;
            const double gap = std::abs(outcome_distribution(r1, cand)[0] -
                                        outcome_distribution(r2, cand)[0]);
            CHECK(gap <= best + 1e-9);
        }
    }
}

TEST_CASE("post_measurement_state") {
    const auto rho = validate_state(diag2(0.5, 0.5));
    SUBCASE("identity Kraus returns the state") {
        const KrausMeasurement id({CMatrix::Identity(2, 2)});
        const auto out = post_measurement_state(rho, id, 0);
        CHECK(max_abs(out.matrix() - rho.matrix()) < 1e-12);
    }
    SUBCASE("projective outcome renormalizes") {
        const KrausMeasurement projective({proj(ket0()), proj(ket1())});
        const auto out = post_measurement_state(rho, projective, 0);
        CHECK(max_abs(out.matrix() - proj(ket0())) < 1e-12);
    }
    SUBCASE("impossible outcomes are rejected") {
        const KrausMeasurement projective({proj(ket0()), proj(ket1())});
        const auto pure = validate_state(proj(ket0()));
        CHECK_THROWS_AS(post_measurement_state(pure, projective, 1), OutcomeImpossible);
    }
}

TEST_CASE("classicality_certificate") {
    const Tolerances tol;

    SUBCASE("thermal qubit family is classical in the energy basis") {
        const auto family = build_scenario(
            ScenarioSpec::thermal(GridSpec::linspace(0.0, 2.0, 9, true), diag2(0.0, 1.0)));
        const auto cert = classicality_certificate(family, tol.comm);
        REQUIRE(cert.classical);
        // Basis columns coincide with |0>, |1> up to phase and order.
        for (Eigen::Index c = 0; c < 2; ++c) {
            const double overlap0 = std::abs(cert.common_basis.col(c)(0));
            CHECK((overlap0 > 1.0 - 1e-9 || overlap0 < 1e-9));
        }
    }
    SUBCASE("constant family is classical") {
        const auto family = family_from({0.0, 1.0}, {diag2(0.5, 0.5), diag2(0.5, 0.5)});
        CHECK(classicality_certificate(family, tol.comm).classical);
    }
    SUBCASE("Mach-Zehnder pair is witnessed as non-classical") {
        const auto family = build_scenario(
            ScenarioSpec::mach_zehnder(GridSpec::list({0.0, pi / 2})));
        const auto cert = classicality_certificate(family, tol.comm);
        REQUIRE_FALSE(cert.classical);
        CHECK(cert.witness_a == 0);
        CHECK(cert.witness_b == 1);
        // [rho(0), rho(pi/2)] = diag(i/2, -i/2) by direct computation.
        CHECK(cert.max_commutator_norm == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("classical verdicts rebuild every state from the common basis") {
        Rng rng(23);
        for (int it = 0; it < 10; ++it) {
            const auto family = random_classical_family(4, 5, rng);
            const auto cert = classicality_certificate(family, tol.comm);
            REQUIRE(cert.classical);
            for (const auto& st : family.states) {
                const CMatrix d = cert.common_basis.adjoint() * st.matrix() * cert.common_basis;
                const CMatrix rebuilt =
                    cert.common_basis * d.diagonal().asDiagonal() * cert.common_basis.adjoint();
                CHECK(max_abs(rebuilt - st.matrix()) < tol.comm);
            }
        }
    }
}

TEST_CASE("outcome distributions sum to 1 on random inputs") {
    Rng rng(29);
    for (int it = 0; it < 20; ++it) {
        const auto rho = random_density(3, rng);
        const auto m = random_povm(3, 4, rng);
        const auto p = outcome_distribution(rho, m);
        double sum = 0.0;
        for (double x : p) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
            sum += x;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("povm and kraus validation") {
    CHECK_THROWS_AS(Povm({proj(ket0())}), PovmIncomplete);
    CHECK_THROWS_AS(Povm({proj(ket0()) * 2.0, CMatrix::Identity(2, 2) - proj(ket0()) * 2.0}),
                    NotPsd);
    const KrausMeasurement k({proj(ket0()), proj(ket1())});
    CHECK(k.povm().outcomes() == 2);
    CHECK_THROWS_AS(KrausMeasurement({proj(ket0())}), PovmIncomplete);
}

TEST_CASE("parametrised state invariants") {
    CHECK_THROWS_AS(family_from({0.0, 0.0}, {diag2(1.0, 0.0), diag2(0.5, 0.5)}),
                    ValidationError);
    const auto family = family_from({0.0, 1.0}, {diag2(1.0, 0.0), diag2(0.5, 0.5)});
    CHECK(family.total_volume() == doctest::Approx(2.0));
    const auto sub = family.restricted_to({1});
    CHECK(sub.size() == 1);
    CHECK(sub.grid[0](0) == doctest::Approx(1.0));
}
