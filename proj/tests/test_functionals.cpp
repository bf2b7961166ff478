#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "hypflow/errors.hpp"
#include "hypflow/functionals.hpp"
#include "oracles.hpp"

using namespace hypflow;

TEST_CASE("radial sinh power integrals") {
    for (int n = 0; n <= 8; ++n) {
        for (double r : {0.1, 0.7, 1.0, 2.5}) {
            const double ref = oracle::simpson([n](double s) { return std::pow(std::sinh(s), n); }, 0.0, r, 4000);
            CHECK(sinh_power_integral(n, r) == doctest::Approx(ref).epsilon(1e-11));
        }
    }
}

TEST_CASE("centered sphere functionals match the closed forms") {
    SUBCASE("volume for n = 2, r0 = 1") {
        const auto g = SphereGrid::full2d(16, 32);
        const auto graph = make_shape(CenteredSphere{1.0}, g);
        const auto W = quermassintegrals(curvature(graph), graph);
        const double ref = std::numbers::pi * std::sinh(2.0) - 2.0 * std::numbers::pi;
        CHECK(W[0] == doctest::Approx(ref).epsilon(1e-13));
        CHECK(W[0] == doctest::Approx(5.1109).epsilon(1e-4));
    }
    SUBCASE("weighted volume for n = 2, r0 = 1") {
        const auto g = SphereGrid::axisym(2, 16);
        const auto graph = make_shape(CenteredSphere{1.0}, g);
        const auto rec = evaluate_functionals(curvature(graph), graph);
        CHECK(rec.Wl[0] == doctest::Approx(4.0 * std::numbers::pi * std::pow(std::sinh(1.0), 3)).epsilon(1e-13));
        CHECK(rec.wl0_boundary == doctest::Approx(rec.Wl[0]).epsilon(1e-13));
    }
    SUBCASE("all dimensions") {
        for (int n = 2; n <= 6; ++n) {
            for (double r0 : {0.5, 1.0, 2.0}) {
                const auto g = SphereGrid::axisym(n, 24);
                const auto graph = make_shape(CenteredSphere{r0}, g);
                const auto field = curvature(graph);
                const auto rec = evaluate_functionals(field, graph);
                const double w = oracle::unit_sphere_area(n);
                for (int k = 0; k <= n + 1; ++k) {
                    CHECK(rec.Wl[static_cast<std::size_t>(k)] == doctest::Approx(oracle::weighted_ball(n, k, r0)).epsilon(1e-12));
                }
                CHECK(rec.W[0] == doctest::Approx(oracle::ball_volume(n, r0)).epsilon(1e-10));
                for (int k = 0; k <= n; ++k) {
                    double surf = 0.0;
                    for (const auto& nc : field.nodes) surf += nc.E[static_cast<std::size_t>(k)] * nc.area_weight;
                    CHECK(surf == doctest::Approx(w * std::pow(std::sinh(r0), n) * std::pow(1.0 / std::tanh(r0), k)).epsilon(1e-12));
                    CHECK(rec.W[static_cast<std::size_t>(k)] == doctest::Approx(ball_profile(n, k, false, r0)).epsilon(1e-11));
                }
                for (double m : rec.minkowski_residuals) CHECK(std::abs(m) < 1e-11 * rec.Wl[1]);
                CHECK(std::abs(rec.heintze_karcher_slack) < 1e-12 * rec.Wl[1]);
            }
        }
    }
}

TEST_CASE("first quermassintegral is the scaled area") {
    const auto g = SphereGrid::full2d(32, 64);
    const auto graph = make_shape(OffcenterSphere{1.0, 0.4}, g);
    const auto rec = evaluate_functionals(curvature(graph), graph);
    CHECK(rec.W[1] * 3.0 == doctest::Approx(rec.area).epsilon(1e-14));
}

TEST_CASE("Minkowski residuals and the two weighted volumes converge at second order") {
    for (const ShapeSpec& shape : {ShapeSpec{PerturbedSphere{1.0, 0.1, 2}}, ShapeSpec{OffcenterSphere{1.0, 0.3}}}) {
        SUBCASE("full2d") {
            std::vector<double> hs;
            std::vector<std::vector<double>> mk(2);
            std::vector<double> wl;
            for (int nt : {32, 64, 128}) {
                const auto g = SphereGrid::full2d(nt, 2 * nt);
                const auto graph = make_shape(shape, g);
                const auto rec = evaluate_functionals(curvature(graph), graph);
                hs.push_back(g.h_theta());
                for (int k = 0; k < 2; ++k) mk[static_cast<std::size_t>(k)].push_back(std::abs(rec.minkowski_residuals[static_cast<std::size_t>(k)]));
                wl.push_back(std::abs(rec.Wl[0] - rec.wl0_boundary));
            }
            for (const auto& e : mk) {
                const double p = oracle::observed_order(hs, e);
                CHECK(p >= 1.7);
                CHECK(p <= 2.3);
            }
            // u dmu = lambda^{n+1} dsigma node by node, so the two forms coincide.
            for (double x : wl) CHECK(x <= 1e-12);
        }
        SUBCASE("axisym") {
            for (int n = 3; n <= 6; ++n) {
                std::vector<double> hs;
                std::vector<std::vector<double>> mk(static_cast<std::size_t>(n));
                for (int nt : {64, 128, 256}) {
                    const auto g = SphereGrid::axisym(n, nt);
                    const auto graph = make_shape(shape, g);
                    const auto rec = evaluate_functionals(curvature(graph), graph);
                    hs.push_back(g.h_theta());
                    for (int k = 0; k < n; ++k) mk[static_cast<std::size_t>(k)].push_back(std::abs(rec.minkowski_residuals[static_cast<std::size_t>(k)]));
                }
                for (const auto& e : mk) {
                    const double p = oracle::observed_order(hs, e);
                    CHECK(p >= 1.7);
                    CHECK(p <= 2.3);
                }
            }
        }
    }
}

TEST_CASE("ball profiles") {
    for (int n = 2; n <= 6; ++n) {
        const double w = oracle::unit_sphere_area(n);
        for (double r : {0.1, 0.5, 1.0, 2.0, 3.0}) {
            CHECK(ball_profile(n, n + 1, true, r) == doctest::Approx(w * std::pow(std::cosh(r), n + 1)).epsilon(1e-14));
            CHECK(ball_profile(n, 0, true, r) == doctest::Approx(w * std::pow(std::sinh(r), n + 1)).epsilon(1e-14));
            CHECK(ball_profile(n, 0, false, r) == doctest::Approx(oracle::ball_volume(n, r)).epsilon(1e-10));
            // f_k' = (n+1-k)/(n+1) * omega sinh^n coth^k
            for (int k = 0; k <= n; ++k) {
                const double h = 1e-5;
                const double fd = (ball_profile(n, k, false, r + h) - ball_profile(n, k, false, r - h)) / (2.0 * h);
                const double ref = (n + 1.0 - k) / (n + 1.0) * w * std::pow(std::sinh(r), n) * std::pow(1.0 / std::tanh(r), k);
                CHECK(fd == doctest::Approx(ref).epsilon(1e-7));
            }
        }
        for (int weighted = 0; weighted <= 1; ++weighted) {
            const int kmax = weighted ? n + 1 : n;
            for (int k = 0; k <= kmax; ++k) {
                double prev = 0.0;
                for (int q = 0; q <= 58; ++q) {
                    const double r = 0.1 + 0.05 * q;
                    const double val = ball_profile(n, k, weighted != 0, r);
                    CHECK(val > prev);
                    prev = val;
                    CHECK(ball_profile_inverse(n, k, weighted != 0, val) == doctest::Approx(r).epsilon(1e-10));
                }
            }
        }
    }
    CHECK(ball_profile(2, 0, false, 1.0) == doctest::Approx(2.0 * std::numbers::pi * (std::sinh(1.0) * std::cosh(1.0) - 1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(ball_profile_inverse(2, 0, true, -1.0), DomainError);
    CHECK_THROWS_AS(ball_profile_inverse(2, 3, true, 1.0), DomainError);  // below h_3(0) = omega_2
    CHECK_THROWS_AS(ball_profile_inverse(2, 0, true, 1e300), DomainError);
}

TEST_CASE("explicit weighted bound agrees with the composed profiles") {
    for (int n = 2; n <= 6; ++n) {
        for (double v : {0.01, 1.0, 30.0, 5e4}) {
            const double r = ball_profile_inverse(n, 0, true, v);
            for (int k = 1; k <= n + 1; ++k) {
                CHECK(weighted_bound_explicit(n, k, v) == doctest::Approx(ball_profile(n, k, true, r)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("Heintze-Karcher slack") {
    const auto g = SphereGrid::full2d(64, 128);
    const auto centered = make_shape(CenteredSphere{1.0}, g);
    CHECK(std::abs(heintze_karcher_slack(curvature(centered))) < 1e-12);
    const auto pert = make_shape(PerturbedSphere{1.0, 0.1, 2}, g);
    CHECK(heintze_karcher_slack(curvature(pert)) > 0.0);
    // Geodesic spheres are umbilic, so the slack vanishes up to discretization error.
    std::vector<double> hs, sl;
    for (int nt : {32, 64, 128}) {
        const auto gf = SphereGrid::full2d(nt, 2 * nt);
        const auto off = curvature(make_shape(OffcenterSphere{1.0, 0.3}, gf));
        hs.push_back(gf.h_theta());
        sl.push_back(std::abs(heintze_karcher_slack(off)));
    }
    CHECK(oracle::observed_order(hs, sl) >= 1.7);
    CHECK(sl.back() < 1e-3);

    const auto wavy = make_shape(PerturbedSphere{1.0, 0.3, 10}, SphereGrid::axisym(2, 256));
    CHECK_THROWS_AS(heintze_karcher_slack(curvature(wavy)), ConeViolation);
}

TEST_CASE("variation rates vanish for zero speed and match the ball derivative for unit speed") {
    const int n = 3;
    const double r0 = 0.8;
    const auto g = SphereGrid::axisym(n, 32);
    const auto graph = make_shape(CenteredSphere{r0}, g);
    const auto field = curvature(graph);
    const auto zero = variation_rates(field, std::vector<double>(g.size(), 0.0));
    for (double x : zero.dW) CHECK(x == 0.0);
    const auto unit = variation_rates(field, std::vector<double>(g.size(), 1.0));
    for (int k = 0; k <= n + 1; ++k) {
        const double h = 1e-5;
        const double fd = (oracle::weighted_ball(n, k, r0 + h) - oracle::weighted_ball(n, k, r0 - h)) / (2.0 * h);
        CHECK(unit.dWl[static_cast<std::size_t>(k)] == doctest::Approx(fd).epsilon(1e-8));
    }
    for (int k = 0; k <= n; ++k) {
        const double h = 1e-5;
        const double fd = (ball_profile(n, k, false, r0 + h) - ball_profile(n, k, false, r0 - h)) / (2.0 * h);
        CHECK(unit.dW[static_cast<std::size_t>(k)] == doctest::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("record serialization") {
    const auto g = SphereGrid::axisym(2, 16);
    const auto graph = make_shape(CenteredSphere{1.0}, g);
    const auto rec = evaluate_functionals(curvature(graph), graph, 0.5);
    std::ostringstream os;
    write_record_row(os, rec);
    const auto cols = record_columns(2);
    const std::string row = os.str();
    CHECK(static_cast<std::size_t>(std::count(row.begin(), row.end(), ',')) + 1 == cols.size());
    CHECK(cols.front() == "t");
    CHECK(row.rfind("0.5,", 0) == 0);
}
