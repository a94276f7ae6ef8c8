#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "qlc/analysis.hpp"
#include "qlc/components.hpp"
#include "qlc/errors.hpp"
#include "qlc/optimizer.hpp"
#include "qlc/statespace.hpp"
#include "test_util.hpp"

using namespace qlc;
using namespace qlc::testutil;

namespace {

CavityScenario bench_cavity(double k_n) {
    return {0.01, 0.01, 0.01, 0.1, k_n};
}

// Passive single-cavity controller points are stable for any parameters, so
// they make safe random probes for the gradient machinery.
Vec random_cavity_theta(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Vec th(3);
    th[0] = std::pow(10.0, -1.5 + 3.0 * u01(rng));
    th[1] = std::pow(10.0, -1.5 + 3.0 * u01(rng));
    th[2] = -30.0 + 60.0 * u01(rng);
    return th;
}

}  // namespace

TEST_CASE("working coordinates log-compress the rate parameters") {
    const ControllerTemplate t = make_template(TemplateKind::cavity);
    Vec th(3);
    th << 0.04, 250.0, -12.5;
    const Vec z = to_working(t.params, th);
    CHECK(near(z[0], std::log10(0.04), 1e-15));
    CHECK(near(z[1], std::log10(250.0), 1e-12));
    CHECK(z[2] == -12.5);  // delta is searched linearly
    CHECK(near((from_working(t.params, z) - th).norm(), 0.0, 1e-12));

    CHECK_THROWS_AS(to_working(t.params, Vec::Zero(2)), DimensionMismatch);
    th[0] = 0.0;
    CHECK_THROWS_AS(to_working(t.params, th), NonPositiveParam);
}

TEST_CASE("finite-difference gradients agree across step sizes") {
    const ControllerTemplate t = make_template(TemplateKind::cavity);
    const TemplateObjective obj = bind_template(t, bench_cavity(5.0));
    std::mt19937_64 rng(7);
    Vec dir(3);
    dir << 0.6, -0.3, 0.7;
    dir.normalize();
    for (int k = 0; k < 6; ++k) {
        const Vec z = to_working(obj.params, random_cavity_theta(rng));
        const Vec g1 = working_gradient(obj, z, 1.0);
        const Vec g2 = working_gradient(obj, z, 0.25);
        CHECK((g1 - g2).norm() <= 1e-6 * std::max(1.0, g1.norm()));

        // Plain secant along a fixed direction, no shared stencil code.
        const double h = 1e-4;
        const double fp = objective_cost(obj, from_working(obj.params, z + h * dir));
        const double fm = objective_cost(obj, from_working(obj.params, z - h * dir));
        const double secant = (fp - fm) / (2.0 * h);
        CHECK(near_rel(g1.dot(dir), secant, 1e-5));
    }
}

TEST_CASE("reported optimum is the objective value at the reported point") {
    const ControllerTemplate t = make_template(TemplateKind::cavity);
    const TemplateObjective obj = bind_template(t, bench_cavity(10.0));
    OptimizeOptions opts;
    opts.n_restarts = 8;
    opts.seed = 3;
    const OptimizationResult r = optimize(obj, opts);

    CHECK(r.converged);
    CHECK(near_rel(objective_cost(obj, r.theta), r.cost, 1e-12));
    CHECK(r.gradient_norm <= 1e-4 * std::max(1.0, std::abs(r.cost)));
    CHECK(r.hessian_condition >= 1.0);
    CHECK(r.evaluations > 0);
    CHECK(r.restart_index >= 0);
    CHECK(stability_margin(obj.assemble(r.theta).ss) < 0.0);

    const auto resid = check_realizability(obj.controller(r.theta));
    CHECK(resid[0] <= 1e-9);
    CHECK(resid[1] <= 1e-9);
    CHECK(resid[2] <= 1e-9);

    // Same options, same draw sequence, same answer.
    const OptimizationResult again = optimize(obj, opts);
    CHECK(again.cost == r.cost);
    CHECK((again.theta - r.theta).norm() == 0.0);
}

TEST_CASE("two-mode gain stays off below threshold and engages above") {
    const ControllerTemplate t = make_template(TemplateKind::static_two_mode);
    OptimizeOptions opts;
    opts.n_restarts = 8;

    // Benchmark couplings put the threshold occupation at 5; below it the
    // passive limit eta = 0 is the box-edge optimum.
    {
        const TemplateObjective obj = bind_template(t, bench_cavity(4.0));
        const OptimizationResult r = optimize(obj, opts);
        CHECK(r.theta[0] <= 1e-6);
        CHECK(near_rel(r.cost, 0.8, 1e-9));
    }
    {
        const TemplateObjective obj = bind_template(t, bench_cavity(50.0));
        const OptimizationResult r = optimize(obj, opts);
        CHECK(r.theta[0] >= 1.0);
        // One parameter, so a fine grid gives an independent reference.
        double grid_min = 1e300;
        for (int i = 0; i <= 6000; ++i) {
            Vec th(1);
            th[0] = 6.0 * i / 6000.0;
            grid_min = std::min(grid_min, objective_cost(obj, th));
        }
        CHECK(r.cost <= grid_min + 1e-6 * grid_min);
        CHECK(r.cost >= grid_min - 1e-4 * grid_min);
    }
}

TEST_CASE("heterodyne search seeded from homodyne never loses to it") {
    const CavityScenario sc = bench_cavity(10.0);
    OptimizeOptions opts;
    opts.n_restarts = 8;
    const OptimizationResult hom =
        optimize(make_template(TemplateKind::classical_homodyne), sc, opts);

    const ControllerTemplate ht =
        make_template(TemplateKind::classical_heterodyne);
    const TemplateObjective hobj = bind_template(ht, sc);
    const Vec seed = embed_homodyne_in_heterodyne(hom.theta);
    CHECK(near_rel(objective_cost(hobj, seed), hom.cost, 1e-10));

    OptimizeOptions ho;
    ho.n_restarts = 4;
    ho.extra_starts = {seed};
    const OptimizationResult het = optimize(hobj, ho);
    CHECK(het.cost <= hom.cost + 1e-9 * std::max(1.0, hom.cost));

    CHECK_THROWS_AS(embed_homodyne_in_heterodyne(Vec::Zero(2)),
                    DimensionMismatch);
}

TEST_CASE("opo parameters embed exactly into the general family") {
    const CavityScenario sc = bench_cavity(3.0);
    const TemplateObjective oobj =
        bind_template(make_template(TemplateKind::opo), sc);
    Vec th(7);
    th << 0.04, 0.02, 0.3, 0.1, -0.2, 0.5, -0.3;
    const double c_opo = objective_cost(oobj, th);

    const ControllerTemplate gt = make_general_template(1, 2);
    const Vec gth = embed_opo_in_general(th);
    CHECK(near_rel(objective_cost(bind_template(gt, sc), gth), c_opo, 1e-10));

    const auto resid = check_realizability(instantiate_controller(gt, gth));
    CHECK(resid[0] <= 1e-12);
    CHECK(resid[1] <= 1e-12);
    CHECK(resid[2] <= 1e-12);
}

TEST_CASE("varied probe coupling recovers the sideband-resolved detuning") {
    ControllerTemplate t = make_template(TemplateKind::cavity);
    t.vary_couplings = true;
    OptomechScenario sc;
    sc.k_n = 1.0;
    OptimizeOptions opts;
    opts.n_restarts = 8;
    const OptimizationResult r = optimize(t, sc, opts);
    CHECK(r.converged);
    CHECK(std::abs(r.theta[2] - sc.omega) <= 2.0);  // delta locks to Omega
    CHECK(r.cost < 0.05 * sc.k_n);                  // vs k_n with no control
}

TEST_CASE("occupation sweep fills every grid point with a closed answer") {
    const ControllerTemplate t = make_template(TemplateKind::static_two_mode);
    OptimizeOptions opts;
    opts.n_restarts = 4;
    opts.warm_restarts = 2;
    const std::vector<double> grid = {1.0, 4.0, 50.0};
    const auto pts = sweep(t, bench_cavity(1.0), grid, opts);

    REQUIRE(pts.size() == grid.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].k_n == grid[i]);
        CHECK_FALSE(pts[i].failed);
        CHECK(near_rel(pts[i].no_control, grid[i] / 3.0, 1e-9));
        CHECK(pts[i].ratio <= 1.0 + 1e-12);
        CHECK(near_rel(pts[i].ratio, pts[i].result.cost / pts[i].no_control,
                       1e-12));
    }
    // Below threshold the device is passive and only the loop phase helps.
    CHECK(near_rel(pts[0].result.cost, 0.2, 1e-9));
    CHECK(pts[2].ratio < 0.4);

    CHECK(sweep(t, bench_cavity(1.0), {}, opts).empty());
}

TEST_CASE("optimizer failure modes surface as typed errors") {
    // All-zero general controller leaves its mode undamped: marginal loop,
    // and with no random restarts there is nothing stable to start from.
    {
        const TemplateObjective obj =
            bind_template(make_general_template(1, 2), bench_cavity(2.0));
        OptimizeOptions opts;
        opts.n_restarts = 0;
        CHECK_THROWS_AS(optimize(obj, opts), NoStableStart);
    }
    // One iteration against an impossible tolerance cannot converge.
    {
        const TemplateObjective obj =
            bind_template(make_template(TemplateKind::cavity), bench_cavity(10.0));
        OptimizeOptions opts;
        opts.n_restarts = 0;
        opts.max_iterations = 1;
        opts.grad_tol = 1e-15;
        CHECK_THROWS_AS(optimize(obj, opts), MaxIterations);
    }
    CHECK_THROWS_AS(make_general_template(0, 2), InvalidKindParams);
    {
        ControllerTemplate t = make_template(TemplateKind::cavity);
        t.vary_couplings = true;  // the optical plant has fixed couplings
        CHECK_THROWS_AS(bind_template(t, bench_cavity(1.0)), InvalidKindParams);
    }
    CHECK_THROWS_AS(
        instantiate_controller(make_template(TemplateKind::opo), Vec::Zero(3)),
        DimensionMismatch);
}
