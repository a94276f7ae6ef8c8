#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qlc/analysis.hpp"
#include "qlc/classical_lqg.hpp"
#include "qlc/components.hpp"
#include "qlc/errors.hpp"
#include "test_util.hpp"

using namespace qlc;
using namespace qlc::testutil;

namespace {

Mat scalar(double v) {
    Mat m(1, 1);
    m(0, 0) = v;
    return m;
}

ClassicalPlantForm cavity_form(const CavityScenario& sc) {
    const StateSpace plant =
        to_statespace(cavity({sc.k1, sc.k2, sc.k3}, sc.delta));
    return extract_plant_form(
        plant, {vacuum_port(), vacuum_port(), thermal_port(sc.k_n)}, 0, 1);
}

double form_photons(const ClassicalPlantForm& p, const ClassicalController& k) {
    const Mat sigma = classical_closed_covariance(p, k);
    return 0.25 * (sigma(0, 0) + sigma(1, 1) - 2.0);
}

double kalman_cavity_cost(const CavityScenario& sc, double r_scale) {
    const ClassicalPlantForm form = cavity_form(sc);
    const ClassicalController k = kalman_lqg_controller(
        form, photon_weights(2, 0), r_scale * Mat::Identity(2, 2));
    return lqg_cost(cavity_closed_loop(sc, controller_statespace(k)));
}

}  // namespace

TEST_CASE("decorrelation removes measurement crosstalk") {
    ClassicalPlantForm p;
    p.A_p = scalar(-1.0);
    p.B_p = scalar(1.0);
    p.C_p = scalar(1.0);
    p.F_w = scalar(1.0);
    p.F_v = scalar(1.0);
    p.M = scalar(1.0);
    p.output_injection = scalar(0.0);

    const ClassicalPlantForm d = decorrelate(p);
    CHECK(d.A_p(0, 0) == -2.0);
    CHECK(std::abs(d.F_w(0, 0)) <= 1e-15);
    CHECK(d.M.norm() == 0.0);
    CHECK(d.output_injection(0, 0) == 1.0);

    const ClassicalPlantForm twice = decorrelate(d);
    CHECK(near(twice.A_p, d.A_p));
    CHECK(near(twice.output_injection, d.output_injection));

    ClassicalPlantForm uncorrelated = p;
    uncorrelated.M = scalar(0.0);
    CHECK(near(decorrelate(uncorrelated).A_p, p.A_p));

    ClassicalPlantForm singular = p;
    singular.F_v = scalar(0.0);
    CHECK_THROWS_AS(decorrelate(singular), SingularMeasurementNoise);
}

TEST_CASE("plant form extraction shares the probe vacuum") {
    const CavityScenario sc{0.01, 0.01, 0.01, 0.1, 3.0};
    const ClassicalPlantForm p = cavity_form(sc);

    Vec c_row(2);
    c_row << 0.1, 0.0;
    CHECK(near(p.C_p.transpose().eval(), c_row, 1e-14));
    CHECK(near(p.F_v, scalar(1.0), 1e-14));
    Vec m_col(2);
    m_col << -0.1, 0.0;
    CHECK(near(p.M, m_col.eval(), 1e-14));
    CHECK(near(p.F_w, (0.09 * Mat::Identity(2, 2)).eval(), 1e-14));

    const ClassicalPlantForm d = decorrelate(p);
    Mat fw(2, 2);
    fw << 0.08, 0.0, 0.0, 0.09;
    CHECK(near(d.F_w, fw, 1e-14));

    CHECK_THROWS_AS(extract_plant_form(to_statespace(cavity({0.01}, 0.0)),
                                       {vacuum_port()}, 1, 0),
                    IndexOutOfRange);
}

TEST_CASE("zero process noise yields a zero Kalman gain") {
    ClassicalPlantForm p;
    p.A_p = -Mat::Identity(2, 2);
    p.B_p = Mat::Identity(2, 2);
    p.C_p = Mat::Zero(1, 2);
    p.C_p(0, 0) = 1.0;
    p.F_w = Mat::Zero(2, 2);
    p.F_v = scalar(1.0);
    p.M = Mat::Zero(2, 1);
    p.output_injection = Mat::Zero(2, 1);

    const ClassicalController k = kalman_lqg_controller(
        p, photon_weights(2, 0), 1e-6 * Mat::Identity(2, 2));
    CHECK(k.kalman_gain.norm() <= 1e-9);
}

TEST_CASE("kalman controller is optimal for the homodyne record") {
    const CavityScenario sc{0.01, 0.01, 0.01, 0.1, 10.0};
    const double cost = kalman_cavity_cost(sc, 1e-6);

    // no static homodyne gain pair does better with the same current
    double best_static = 1e300;
    for (double g1 = 0.0; g1 <= 8.0; g1 += 0.1) {
        for (double g2 = -4.0; g2 <= 4.0; g2 += 0.1) {
            const ClassicalControllerSystem hom =
                homodyne_controller(g1, g2, 1.0);
            best_static = std::min(
                best_static,
                lqg_cost(cavity_closed_loop(
                    sc, static_to_statespace(hom.static_form, 2))));
        }
    }
    CHECK(cost <= best_static * (1.0 + 1e-3));

    // best cost over the heterodyne amplification family
    double best_het = 1e300;
    for (double eta = 0.0; eta < 3.0; eta += 1e-4) {
        const double sh = std::sinh(eta);
        best_het = std::min(best_het, (sc.k2 * sh * sh + sc.k3 * sc.k_n) /
                                          (0.03 + 0.02 * sh));
    }
    CHECK(near_rel(cost, best_het, 0.1));  // same family, different record

    CavityScenario hot = sc;
    hot.k_n = 100.0;
    const double trivial = hot.k3 * hot.k_n /
                           (hot.k1 + hot.k2 + hot.k3 +
                            2.0 * std::sqrt(hot.k1 * hot.k2));
    CHECK(kalman_cavity_cost(hot, 1e-6) < 0.75 * trivial);
}

TEST_CASE("abstract and port-level closed loops agree") {
    const CavityScenario sc{0.01, 0.01, 0.01, 0.1, 6.0};
    const ClassicalPlantForm form = cavity_form(sc);
    const ClassicalController k = kalman_lqg_controller(
        form, photon_weights(2, 0), 1e-6 * Mat::Identity(2, 2));

    const double direct = form_photons(form, k);
    const double looped =
        lqg_cost(cavity_closed_loop(sc, controller_statespace(k)));
    CHECK(near_rel(direct, looped, 1e-9));

    const double decorrelated_route = form_photons(decorrelate(form), k);
    CHECK(near_rel(decorrelated_route, looped, 1e-9));
}

TEST_CASE("better measurements never hurt") {
    const CavityScenario sc{0.01, 0.01, 0.01, 0.1, 10.0};
    const ClassicalPlantForm base = cavity_form(sc);
    double previous = 1e300;
    for (const double s : {1.0, 0.6, 0.3, 0.1}) {
        ClassicalPlantForm p = base;
        p.F_v = s * s * base.F_v;
        p.M = s * base.M;
        const ClassicalController k = kalman_lqg_controller(
            p, photon_weights(2, 0), 1e-6 * Mat::Identity(2, 2));
        const double cost = form_photons(p, k);
        CHECK(cost <= previous + 1e-12);
        previous = cost;
    }
}

TEST_CASE("cheap-control plateau in the feedback weight") {
    const CavityScenario sc{0.01, 0.01, 0.01, 0.1, 10.0};
    const double c1 = kalman_cavity_cost(sc, 1e-5);
    const double c2 = kalman_cavity_cost(sc, 1e-6);
    const double c3 = kalman_cavity_cost(sc, 1e-7);
    CHECK(near_rel(c1, c3, 5e-3));
    CHECK(near_rel(c2, c3, 5e-3));
}

TEST_CASE("optimal mirror cooling approaches the Q-factor limit") {
    OptomechScenario sc;
    sc.omega = 100.0;
    sc.q_factor = 1e4;
    sc.k_n = 1e6;
    sc.lock_couplings = true;

    auto cost_at = [&](double coupling) {
        OptomechScenario run = sc;
        run.coupling1 = coupling;
        const StateSpace plant = to_statespace(optomech_plant(run));
        const ClassicalPlantForm form = extract_plant_form(
            plant, {vacuum_port(), vacuum_port(), thermal_port(sc.k_n)}, 0,
            1);
        const ClassicalController k = kalman_lqg_controller(
            form, photon_weights(2, 0), 1e-6 * Mat::Identity(2, 2));
        return lqg_cost(optomech_closed_loop(run, controller_statespace(k)));
    };

    double best = 1e300;
    double best_k = 0.0;
    for (double k = 0.5; k <= 64.0; k *= std::sqrt(2.0)) {
        const double c = cost_at(k);
        if (c < best) {
            best = c;
            best_k = k;
        }
    }
    for (double f : {0.8, 0.9, 1.1, 1.25}) best = std::min(best, cost_at(best_k * f));

    const double target = sc.k_n / sc.q_factor;
    CHECK(best == doctest::Approx(target).epsilon(0.10));
}
