#include <cmath>

#include "doctest.h"
#include "qlc/analysis.hpp"
#include "qlc/components.hpp"
#include "qlc/errors.hpp"
#include "qlc/oracles.hpp"
#include "qlc/statespace.hpp"
#include "test_util.hpp"

using namespace qlc;
using namespace qlc::testutil;

namespace {

CavityOracleParams bench(double k_n) {
    CavityOracleParams p;
    p.k1 = p.k2 = p.k3 = 0.01;
    p.k_n = k_n;
    return p;
}

}  // namespace

TEST_CASE("cavity oracle reference points") {
    CHECK(oracle_cavity_cost(CavityOracleKind::no_control, bench(3.0)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(oracle_cavity_cost(CavityOracleKind::trivial, bench(10.0)) ==
          doctest::Approx(2.0).epsilon(1e-12));

    CavityOracleParams p = bench(7.0);
    p.eta = 0.0;
    CHECK(near_rel(oracle_cavity_cost(CavityOracleKind::two_mode, p),
                   oracle_cavity_cost(CavityOracleKind::trivial, p), 1e-12));
    CHECK(near_rel(oracle_cavity_cost(CavityOracleKind::heterodyne, p),
                   oracle_cavity_cost(CavityOracleKind::no_control, p),
                   1e-12));

    CavityOracleParams bad = bench(1.0);
    bad.k1 = -0.01;
    CHECK_THROWS_AS(oracle_cavity_cost(CavityOracleKind::trivial, bad),
                    InvalidKindParams);
}

TEST_CASE("squeezer oracle carries a doubled thermal term at face value") {
    CavityOracleParams p = bench(4.0);
    p.eta = 0.0;
    p.phi = 0.0;
    const double printed =
        oracle_cavity_cost(CavityOracleKind::squeezer, p);
    const double weighted = oracle_squeezer_k3(p);
    const double trivial = oracle_cavity_cost(CavityOracleKind::trivial, p);

    // with the k3-weighted thermal term the formula closes onto the trivial
    // loop at zero squeezing; at face value it is off by 2 / k3
    CHECK(near_rel(weighted, trivial, 1e-12));
    CHECK(near_rel(printed, trivial * 2.0 / p.k3, 1e-12));
}

TEST_CASE("squeezing threshold") {
    CHECK(oracle_threshold(0.01, 0.01, 0.01) ==
          doctest::Approx(5.0).epsilon(1e-12));
    CHECK(near_rel(oracle_threshold(0.07, 0.02, 0.05),
                   oracle_threshold(7.0, 2.0, 5.0), 1e-12));
    // decreasing in k3, saturating at k1 / sqrt(k1 k2)
    CHECK(oracle_threshold(0.01, 0.01, 0.1) <
          oracle_threshold(0.01, 0.01, 0.01));
    CHECK(near_rel(oracle_threshold(0.01, 0.01, 1e6), 1.0, 1e-4));
    CHECK_THROWS_AS(oracle_threshold(0.01, 0.0, 0.01), DivisionByZero);

    // squeezing helps iff the noise exceeds the threshold
    const double thr = oracle_threshold(0.01, 0.01, 0.01);
    CavityOracleParams cold = bench(4.5);
    CavityOracleParams hot = bench(6.0);
    CHECK(cold.k_n < thr);
    CHECK(hot.k_n > thr);
    const double cold0 = oracle_cavity_cost(CavityOracleKind::two_mode, cold);
    const double hot0 = oracle_cavity_cost(CavityOracleKind::two_mode, hot);
    bool cold_improves = false;
    bool hot_improves = false;
    for (double eta = 0.05; eta < 2.0; eta += 0.05) {
        cold.eta = eta;
        hot.eta = eta;
        cold_improves |=
            oracle_cavity_cost(CavityOracleKind::two_mode, cold) < cold0;
        hot_improves |=
            oracle_cavity_cost(CavityOracleKind::two_mode, hot) < hot0;
    }
    CHECK(!cold_improves);
    CHECK(hot_improves);
}

TEST_CASE("refrigerator steady state") {
    CHECK(near_rel(oracle_refrigerator(0.01, 100.0, 300.0), 300.0 * 1e-4,
                   2e-4));
    CHECK(oracle_refrigerator(0.01, 0.0, 300.0) == 300.0);
    CHECK(oracle_refrigerator(0.0, 100.0, 300.0) == 0.0);
    CHECK_THROWS_AS(oracle_refrigerator(0.0, 0.0, 300.0), DivisionByZero);
}

TEST_CASE("assembled loops reproduce the closed forms") {
    SUBCASE("heterodyne grid") {
        for (const double eta : {0.0, 0.3, 0.8}) {
            for (const double kn : {1.0, 5.0, 20.0}) {
                const CavityScenario sc{0.01, 0.01, 0.01, 0.1, kn};
                const double sh = std::sinh(eta);
                const Eigen::Matrix2d gains =
                    std::numbers::sqrt2 * sh * Eigen::Matrix2d::Identity();
                const ClassicalControllerSystem het = heterodyne_controller(
                    1.0 / std::numbers::sqrt2, gains, 1.0);
                const double cost = lqg_cost(cavity_closed_loop(
                    sc, static_to_statespace(het.static_form, 3)));
                CavityOracleParams p = bench(kn);
                p.eta = eta;
                CHECK(near_rel(
                    cost,
                    oracle_cavity_cost(CavityOracleKind::heterodyne, p),
                    1e-10));
            }
        }
    }

    SUBCASE("two-mode grid") {
        for (const double eta : {0.0, 0.5, 1.1}) {
            for (const double kn : {1.0, 5.0, 20.0}) {
                const CavityScenario sc{0.01, 0.01, 0.01, 0.1, kn};
                const double cost = lqg_cost(cavity_closed_loop(
                    sc,
                    static_to_statespace(two_mode_squeezer_static(eta), 2)));
                CavityOracleParams p = bench(kn);
                p.eta = eta;
                CHECK(near_rel(
                    cost, oracle_cavity_cost(CavityOracleKind::two_mode, p),
                    1e-10));
            }
        }
    }

    SUBCASE("squeezer grid against the k3-weighted form") {
        for (const double eta : {0.0, 0.4}) {
            for (const double phi : {0.0, 0.8}) {
                for (const double delta : {0.0, 0.1}) {
                    const CavityScenario sc{0.01, 0.01, 0.01, delta, 8.0};
                    const StateSpace ctrl = static_to_statespace(
                        squeezer_static(eta, 0.0, phi), 1);
                    const double cost =
                        lqg_cost(cavity_closed_loop(sc, ctrl));
                    CavityOracleParams p = bench(8.0);
                    p.eta = eta;
                    p.phi = phi;
                    p.delta = delta;
                    CHECK(near_rel(cost, oracle_squeezer_k3(p), 1e-10));
                }
            }
        }
    }
}
