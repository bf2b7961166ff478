#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hypflow/errors.hpp"
#include "hypflow/symfun.hpp"
#include "oracles.hpp"

using namespace hypflow;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, int n, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> k(static_cast<std::size_t>(n));
    for (auto& x : k) x = dist(rng);
    return k;
}

// Rejection sample from Gamma_k^+ with entries allowed to be negative.
std::vector<double> random_in_cone(std::mt19937_64& rng, int n, int k) {
    for (;;) {
        auto kap = random_vector(rng, n, -1.0, 3.0);
        if (eval_elementary(kap).cone_index >= k) return kap;
    }
}

}  // namespace

TEST_CASE("elementary functions at the unit vector are all one") {
    for (int n = 1; n <= kMaxDim; ++n) {
        const std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
        const auto p = eval_elementary(ones);
        for (int k = 0; k <= n; ++k) CHECK(p.E(k) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(p.E(n + 1) == 0.0);
        CHECK(p.E(-1) == 0.0);
        CHECK(p.cone_index == n);
    }
}

TEST_CASE("elementary functions of (1,2,3)") {
    const auto p = eval_elementary(CurvatureVector{1.0, 2.0, 3.0});
    CHECK(p.E(1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.E(2) == doctest::Approx(11.0 / 3.0).epsilon(1e-15));
    CHECK(p.E(3) == doctest::Approx(6.0).epsilon(1e-15));
    const auto ref = oracle::elementary_by_enumeration({1.0, 2.0, 3.0});
    for (int k = 0; k <= 3; ++k) CHECK(p.E(k) == doctest::Approx(ref[static_cast<std::size_t>(k)]));
}

TEST_CASE("E_2 of (t, 1/t) is one") {
    for (double t : {0.01, 0.3, 1.0, 2.5, 70.0}) {
        CHECK(eval_elementary(CurvatureVector{t, 1.0 / t}).E(2) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("recurrence agrees with subset enumeration for n <= 8") {
    std::mt19937_64 rng(7);
    for (int n = 1; n <= 8; ++n) {
        for (int trial = 0; trial < 200; ++trial) {
            const auto kap = random_vector(rng, n, -2.0, 4.0);
            const auto p = eval_elementary(kap);
            const auto ref = oracle::elementary_by_enumeration(kap);
            for (int k = 0; k <= n; ++k) {
                // Scale by the size of the summands so cancellation does not
                // turn a round-off difference into a large relative error.
                std::vector<double> absk(kap);
                for (auto& x : absk) x = std::abs(x);
                const double scale = oracle::elementary_by_enumeration(absk)[static_cast<std::size_t>(k)];
                CHECK(std::abs(p.E(k) - ref[static_cast<std::size_t>(k)]) <= 1e-12 * scale);
            }
        }
    }
}

TEST_CASE("gradient agrees with central differences on the positive cone") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 50; ++trial) {
            const auto kap = random_vector(rng, n, 0.1, 10.0);
            const auto p = eval_elementary(kap);
            for (int i = 0; i < n; ++i) {
                const double h = 1e-5 * kap[static_cast<std::size_t>(i)];
                auto up = kap, dn = kap;
                up[static_cast<std::size_t>(i)] += h;
                dn[static_cast<std::size_t>(i)] -= h;
                const auto pu = eval_elementary(up), pd = eval_elementary(dn);
                for (int k = 1; k <= n; ++k) {
                    const double fd = (pu.E(k) - pd.E(k)) / (2.0 * h);
                    CHECK(std::abs(p.dE(k, i) - fd) <= 1e-6 * std::abs(fd) + 1e-14);
                }
            }
        }
    }
}

TEST_CASE("Newton tensor identities") {
    SUBCASE("symmetric point") {
        const auto p = eval_elementary(std::vector<double>(5, 1.0));
        for (int k = 1; k <= 5; ++k) {
            const auto r = newton_identities_check(p, k);
            CHECK(r.weighted == doctest::Approx(0.0));
            CHECK(r.trace == doctest::Approx(0.0));
            CHECK(r.squared == doctest::Approx(0.0));
        }
    }
    SUBCASE("(1,2,3), k = 2") {
        const auto r = newton_identities_check(eval_elementary(CurvatureVector{1.0, 2.0, 3.0}), 2);
        CHECK(std::abs(r.weighted) < 1e-12);
        CHECK(std::abs(r.trace) < 1e-12);
        CHECK(std::abs(r.squared) < 1e-12);
    }
    SUBCASE("random positive vectors") {
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 2000; ++trial) {
            const int n = 1 + trial % kMaxDim;
            const auto p = eval_elementary(random_vector(rng, n, 0.05, 5.0));
            for (int k = 1; k <= n; ++k) {
                const auto r = newton_identities_check(p, k);
                const double tol = 1e-10 * (1.0 + std::abs(p.E(k)));
                CHECK(std::abs(r.weighted) < tol);
                CHECK(std::abs(r.trace) < tol);
                CHECK(std::abs(r.squared) < tol * (1.0 + std::abs(p.E(1))));
            }
        }
    }
    CHECK_THROWS_AS(newton_identities_check(eval_elementary(CurvatureVector{1.0, 2.0}), 3), InvalidInput);
}

TEST_CASE("Newton-MacLaurin margins") {
    CHECK(newton_maclaurin_margin(eval_elementary(std::vector<double>(4, 2.7)), 2) == doctest::Approx(0.0));
    CHECK(newton_maclaurin_margin(eval_elementary(CurvatureVector{1.0, 2.0, 3.0}), 1) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    std::mt19937_64 rng(5);
    int samples = 0;
    for (int n = 2; n <= 6; ++n) {
        for (int k = 1; k <= n - 1; ++k) {
            for (int t = 0; t < 700; ++t, ++samples) {
                const auto p = eval_elementary(random_in_cone(rng, n, k));
                CHECK(newton_maclaurin_margin(p, k) >= 0.0);
            }
        }
    }
    CHECK(samples >= 10000);

    CHECK_THROWS_AS(newton_maclaurin_margin(eval_elementary(CurvatureVector{1.0, 2.0}), 2), InvalidInput);
    CHECK_THROWS_AS(newton_maclaurin_margin(eval_elementary(CurvatureVector{-1.0, -2.0, 0.5}), 1), ConeViolation);
}

TEST_CASE("non-finite curvature is rejected") {
    CHECK_THROWS_AS(eval_elementary(CurvatureVector{1.0, NAN}), InvalidInput);
    CHECK_THROWS_AS(eval_elementary(std::vector<double>{}), InvalidInput);
}

TEST_CASE("speed functions") {
    SUBCASE("normalization") {
        const auto ones = eval_elementary(std::vector<double>(4, 1.0));
        for (int k = 1; k <= 4; ++k) {
            for (int l = 0; l < k; ++l) {
                CHECK(eval_speed(SpeedFunctionSpec::quotient(k, l), ones).F == doctest::Approx(1.0));
            }
        }
        CHECK(eval_speed(SpeedFunctionSpec::mean(), ones).F == doctest::Approx(1.0));
    }
    SUBCASE("harmonic mean for n = 2") {
        for (auto [a, b] : {std::pair{1.0, 2.0}, std::pair{0.3, 7.0}, std::pair{4.0, 4.0}}) {
            CHECK(eval_speed(SpeedFunctionSpec::quotient(2, 1), CurvatureVector{a, b}).F ==
                  doctest::Approx(2.0 * a * b / (a + b)).epsilon(1e-14));
        }
    }
    SUBCASE("homogeneity and monotonicity on the positive cone") {
        std::mt19937_64 rng(19);
        for (int trial = 0; trial < 500; ++trial) {
            const int n = 2 + trial % 5;
            auto kap = random_vector(rng, n, 0.1, 5.0);
            auto twice = kap;
            for (auto& x : twice) x *= 2.0;
            for (int k = 1; k <= n; ++k) {
                for (int l = 0; l < k; ++l) {
                    const auto spec = SpeedFunctionSpec::quotient(k, l);
                    const auto s1 = eval_speed(spec, std::span<const double>(kap));
                    const auto s2 = eval_speed(spec, std::span<const double>(twice));
                    CHECK(s2.F == doctest::Approx(2.0 * s1.F).epsilon(1e-12));
                    for (int i = 0; i < n; ++i) CHECK(s1.dF[static_cast<std::size_t>(i)] > 0.0);
                }
            }
        }
    }
    SUBCASE("cone violation carries the cone index") {
        try {
            eval_speed(SpeedFunctionSpec::quotient(2, 1), CurvatureVector{-1.0, 3.0});
            FAIL("expected a cone violation");
        } catch (const ConeViolation& e) {
            CHECK(e.cone_index() == 1);
        }
    }
}

TEST_CASE("speed spec validation") {
    CHECK_NOTHROW(SpeedFunctionSpec::quotient(2, 1, PhiFunction::neg_inv_power(1.0)).validate(2));
    CHECK_NOTHROW(SpeedFunctionSpec::mean(PhiFunction::log()).validate(3));
    CHECK_NOTHROW(SpeedFunctionSpec::mean(PhiFunction::power(0.5)).validate(3));
    CHECK_THROWS_AS(SpeedFunctionSpec::quotient(3, 1).validate(2), InvalidInput);
    CHECK_THROWS_AS(SpeedFunctionSpec::quotient(1, 1).validate(2), InvalidInput);
    CHECK_THROWS_AS(SpeedFunctionSpec::mean(PhiFunction::neg_inv_power(2.0)).validate(2), InvalidInput);
    CHECK_THROWS_AS(SpeedFunctionSpec::mean(PhiFunction::power(-1.0)).validate(2), InvalidInput);
}

TEST_CASE("concavity diagnostics") {
    SUBCASE("mean curvature is linear") {
        const auto rep = concavity_diagnostics(SpeedFunctionSpec::mean(), eval_elementary(CurvatureVector{0.5, 1.5, 4.0}));
        CHECK(std::abs(rep.min_hessian_eigenvalue) < 1e-8);
        CHECK(std::abs(rep.max_hessian_eigenvalue) < 1e-8);
        CHECK(rep.concave());
        CHECK(rep.inverse_concave());
        CHECK(std::abs(rep.max_pair_quotient) < 1e-12);
    }
    SUBCASE("geometric mean on random positive vectors") {
        std::mt19937_64 rng(23);
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 2 + trial % 4;
            const auto p = eval_elementary(random_vector(rng, n, 0.2, 5.0));
            const auto rep = concavity_diagnostics(SpeedFunctionSpec::quotient(n, 0), p);
            CHECK(rep.min_hessian_eigenvalue <= 1e-8);
            CHECK(rep.concave());
            CHECK(rep.min_inverse_concavity_eigenvalue >= -1e-8);
            CHECK(rep.max_pair_quotient <= 1e-12);
            CHECK(rep.min_inverse_pair_combination >= -1e-12);
        }
    }
    SUBCASE("E2/E1 at (1,2,3)") {
        const auto rep = concavity_diagnostics(SpeedFunctionSpec::quotient(2, 1), eval_elementary(CurvatureVector{1.0, 2.0, 3.0}));
        CHECK(rep.min_hessian_eigenvalue <= 1e-8);
        CHECK(rep.min_inverse_concavity_eigenvalue >= -1e-8);
        CHECK(rep.concave());
        CHECK_FALSE(rep.degenerate_spectrum);
    }
    SUBCASE("repeated curvatures are flagged") {
        const auto rep = concavity_diagnostics(SpeedFunctionSpec::quotient(2, 1), eval_elementary(CurvatureVector{1.0, 1.0, 3.0}));
        CHECK(rep.degenerate_spectrum);
    }
    CHECK_THROWS_AS(concavity_diagnostics(SpeedFunctionSpec::mean(), eval_elementary(CurvatureVector{-1.0, 2.0})),
                    ConeViolation);
}
