#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "hypflow/errors.hpp"
#include "hypflow/flows.hpp"
#include "oracles.hpp"

using namespace hypflow;

namespace {

FlowSpec bgl_flow(int k) {
    FlowSpec s;
    s.family = FlowFamily::bgl;
    s.speed = SpeedFunctionSpec::quotient(k, k - 1);
    return s;
}

std::vector<FlowSpec> all_families(int n) {
    std::vector<FlowSpec> out{FlowSpec::locally_mcf(), FlowSpec::sx_inverse_flow(1, 0), bgl_flow(n)};
    for (int k = 2; k <= n; ++k) out.push_back(FlowSpec::sx_inverse_flow(k, k - 1));
    FlowSpec p = FlowSpec::locally_mcf();
    p.speed = SpeedFunctionSpec::quotient(2, 0, PhiFunction::power(2.0));
    out.push_back(p);
    return out;
}

}  // namespace

TEST_CASE("centered spheres are stationary for every family") {
    for (int n = 2; n <= 5; ++n) {
        for (double r0 : {0.5, 1.0, 2.0}) {
            const auto g = SphereGrid::axisym(n, 32);
            const auto field = curvature(make_shape(CenteredSphere{r0}, g));
            for (const auto& spec : all_families(n)) {
                for (double f : speed_field(spec, field)) CHECK(std::abs(f) < 1e-13);
            }
        }
    }
    const auto g = SphereGrid::full2d(32, 64);
    const auto graph = make_shape(CenteredSphere{1.0}, g);
    for (const auto& spec : all_families(2)) {
        FlowStepper stepper(g, spec);
        std::vector<double> phi(graph.phi().begin(), graph.phi().end());
        const double dt = stepper.stable_dt(phi);
        CHECK(dt > 0.0);
        for (int q = 0; q < 20; ++q) REQUIRE(stepper.step(phi, 1e-3));
        for (std::size_t a = 0; a < phi.size(); ++a) CHECK(std::abs(phi[a] - graph.phi()[a]) < 1e-14);
    }
}

TEST_CASE("speed values on a centered sphere of radius r") {
    const double r = 0.9;
    const auto g = SphereGrid::axisym(3, 24);
    const auto field = curvature(make_shape(CenteredSphere{r}, g));
    const auto& nc = field.nodes[5];
    const auto sp = eval_elementary(std::span<const double>(nc.kappa.data(), 3));
    // 1 - u E1 / lambda' with u = sinh r, E1 = coth r
    CHECK(1.0 - nc.u * sp.E(1) / nc.lambda_prime == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(node_speed(FlowSpec::locally_mcf(), nc, 3).diffusion > 0.0);
    // diffusion for the E1 flow: max_i dE1/dkappa_i * u / lambda' / lambda^2 = 1/(n lambda lambda')
    CHECK(node_speed(FlowSpec::locally_mcf(), nc, 3).diffusion ==
          doctest::Approx(1.0 / (3.0 * std::sinh(r) * std::cosh(r))).epsilon(1e-12));
}

TEST_CASE("off-center sphere has the expected speed sign pattern under the volume preserving E1 flow") {
    const auto g = SphereGrid::axisym(2, 64);
    const auto graph = make_shape(OffcenterSphere{1.0, 0.3}, g);
    const auto field = curvature(graph);
    const auto sp = speed_field(FlowSpec::locally_mcf(), field);
    // F = 1 - u coth(rho) / lambda': on a geodesic sphere E1 = coth(rho)
    for (std::size_t a = 0; a < sp.size(); ++a) {
        const auto& nc = field.nodes[a];
        CHECK(sp[a] == doctest::Approx(1.0 - nc.u / (std::tanh(1.0) * nc.lambda_prime)).epsilon(1e-2).scale(1.0));
    }
}

TEST_CASE("gradient of a perturbed sphere decreases step over step under the volume preserving E1 flow") {
    const auto g = SphereGrid::axisym(2, 64);
    auto spec = FlowSpec::locally_mcf();
    spec.t_end = 1.0;
    spec.sample_dt = 0.25;
    const auto res = run(make_shape(PerturbedSphere{1.0, 0.05, 2}, g), spec);
    REQUIRE(res.status == FlowStatus::reached_t_end);
    const auto& log = res.state.steps_log;
    REQUIRE(log.size() > 10);
    for (std::size_t q = 1; q < log.size(); ++q) CHECK(log[q].max_grad_sq < log[q - 1].max_grad_sq);
    CHECK(c0_barrier(log).holds());
    CHECK(res.state.monitors.size() == 5);
    for (std::size_t q = 0; q < res.state.monitors.size(); ++q) CHECK(res.state.monitors[q].t == doctest::Approx(0.25 * q));
}

TEST_CASE("RK4 temporal order from dt halving") {
    const auto g = SphereGrid::axisym(2, 32);
    const auto graph = make_shape(PerturbedSphere{1.0, 0.1, 2}, g);
    const double horizon = 0.2;
    auto solve = [&](int steps) {
        FlowStepper stepper(g, FlowSpec::locally_mcf());
        std::vector<double> phi(graph.phi().begin(), graph.phi().end());
        for (int q = 0; q < steps; ++q) REQUIRE(stepper.step(phi, horizon / steps));
        return phi;
    };
    FlowStepper probe(g, FlowSpec::locally_mcf());
    std::vector<double> phi0(graph.phi().begin(), graph.phi().end());
    const int base = static_cast<int>(std::ceil(horizon / probe.stable_dt(phi0)));
    const auto ref = solve(16 * base);
    std::vector<double> dts, errs;
    for (int m : {1, 2, 4}) {
        const auto phi = solve(m * base);
        double e = 0.0;
        for (std::size_t a = 0; a < phi.size(); ++a) e = std::max(e, std::abs(phi[a] - ref[a]));
        dts.push_back(horizon / (m * base));
        errs.push_back(e);
    }
    const double p = oracle::observed_order(dts, errs);
    CHECK(p >= 3.5);
    CHECK(p <= 4.5);
}

TEST_CASE("cone violation aborts with a node location") {
    const auto g = SphereGrid::axisym(2, 256);
    const auto wavy = make_shape(PerturbedSphere{1.0, 0.3, 10}, g);
    const auto spec = FlowSpec::sx_inverse_flow(2, 1);
    const auto res = run(wavy, spec);
    CHECK(res.status == FlowStatus::cone_violation);
    CHECK(res.aborted());
    CHECK(res.failure_node >= 0);
    CHECK(res.message.find("node") != std::string::npos);
    try {
        speed_field(spec, curvature(wavy));
        FAIL("expected a cone violation");
    } catch (const ConeViolation& e) {
        CHECK(e.node() >= 0);
    }
}

TEST_CASE("variational consistency") {
    const auto g = SphereGrid::axisym(2, 32);
    const auto sphere = make_shape(CenteredSphere{1.0}, g);
    std::vector<MonitorSample> ms;
    for (int q = 0; q < 4; ++q) ms.push_back(sample_state(sphere, FlowSpec::locally_mcf(), 0.1 * q));
    const auto rep = variational_consistency(ms, g.h_theta());
    for (const auto& row : rep.rows) {
        CHECK(row.max_abs_error < 1e-12);
        CHECK(row.max_abs_rate < 1e-12);
    }
    CHECK_THROWS_AS(variational_consistency(std::span<const MonitorSample>(ms.data(), 2), g.h_theta()), NeedsMoreSamples);

    auto spec = FlowSpec::locally_mcf();
    spec.t_end = 0.6;
    spec.sample_dt = 0.02;
    const auto g2 = SphereGrid::axisym(2, 128);
    const auto res = run(make_shape(PerturbedSphere{1.0, 0.05, 2}, g2), spec);
    const auto rep2 = variational_consistency(res.state.monitors, g2.h_theta());
    CHECK(rep2.worst_relative() < 0.02);
}

TEST_CASE("C0 barrier report") {
    std::vector<StepLog> log{{0.0, 0.1, -2.0, -1.0, 0.0, 0.0}, {0.1, 0.1, -1.9, -1.1, 0.0, 0.0}, {0.2, 0.1, -1.95, -1.05, 0.0, 0.0}};
    const auto b = c0_barrier(log);
    CHECK(b.max_rise_of_max == doctest::Approx(0.05));
    CHECK(b.max_drop_of_min == doctest::Approx(0.05));
    CHECK_FALSE(b.holds());
}

TEST_CASE("flow spec validation") {
    auto s = FlowSpec::locally_mcf();
    s.cfl = 1.5;
    CHECK_THROWS_AS(s.validate(2), InvalidInput);
    s = bgl_flow(3);
    CHECK_THROWS_AS(s.validate(2), InvalidInput);
    s = FlowSpec::sx_inverse_flow(3, 1);
    CHECK_THROWS_AS(s.validate(2), InvalidInput);
    CHECK_NOTHROW(FlowSpec::sx_inverse_flow(2, 1).validate(2));
}

TEST_CASE("monitor CSV has matching header and rows") {
    const auto g = SphereGrid::axisym(2, 32);
    auto spec = FlowSpec::locally_mcf();
    spec.t_end = 0.1;
    const auto res = run(make_shape(PerturbedSphere{1.0, 0.05, 2}, g), spec);
    std::ostringstream os;
    write_monitors_csv(os, res.state.monitors, 2);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    const auto cols = std::count(line.begin(), line.end(), ',');
    int rows = 0;
    while (std::getline(is, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == cols);
        ++rows;
    }
    CHECK(rows == static_cast<int>(res.state.monitors.size()));
}
