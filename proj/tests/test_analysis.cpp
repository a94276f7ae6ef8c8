#include "doctest.h"

#include <cmath>

#include "qlc/analysis.hpp"
#include "test_util.hpp"

using namespace qlc;
using testutil::near;

namespace {

LinearSLH multi_port_cavity(const std::vector<double>& rates, double delta) {
    const auto m = static_cast<Eigen::Index>(rates.size());
    CMat lam(m, 2);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double amp = std::sqrt(rates[static_cast<std::size_t>(i)]) / 2.0;
        lam(i, 0) = amp;
        lam(i, 1) = cplx(0.0, amp);
    }
    return make_linear_slh(CMat::Identity(m, m), lam, CVec::Zero(m),
                           (delta / 2.0) * Mat::Identity(2, 2), Vec::Zero(2));
}

}  // namespace

TEST_CASE("hot bath heats the cavity to the coupling-weighted occupation") {
    const double k1 = 0.01, k2 = 0.02, k3 = 0.03, kn = 4.0;
    const double total = k1 + k2 + k3;
    const StateSpace ss = to_statespace(multi_port_cavity({k1, k2, k3}, 0.0));
    const ItoMatrix f =
        build_ito_matrix({vacuum_port(), vacuum_port(), thermal_port(kn)});
    const Covariance cov = steady_state_covariance(ss, f);

    const double occ = k3 * kn / total;
    CHECK(near(cov.sigma, ((1.0 + 2.0 * occ) * Mat::Identity(2, 2)).eval(),
               1e-12));
    CHECK(photon_number(cov, 0) == doctest::Approx(occ).epsilon(1e-10));
    CHECK(min_eig_hermitian(cov.sigma, cov.Theta) >= tol::heisenberg_psd);
}

TEST_CASE("vacuum inputs leave the cavity in vacuum") {
    const StateSpace ss = to_statespace(multi_port_cavity({0.04}, 0.7));
    const Covariance cov =
        steady_state_covariance(ss, build_ito_matrix({vacuum_port()}));
    CHECK(near(cov.sigma, Mat::Identity(2, 2).eval(), 1e-12));
    CHECK(photon_number(cov, 0) == doctest::Approx(0.0));
}

TEST_CASE("covariance solver rejects unstable drift and bad noise sizes") {
    LinearSLH opo = multi_port_cavity({0.2}, 0.0);
    opo.quad_hamiltonian << 0.0, 0.3, 0.3, 0.0;  // pump above threshold
    const StateSpace ss = to_statespace(opo);
    CHECK(stability_margin(ss) > 0.0);
    CHECK_THROWS_AS(steady_state_covariance(ss, build_ito_matrix({vacuum_port()})),
                    UnstableSystem);

    const StateSpace cav = to_statespace(multi_port_cavity({0.04}, 0.0));
    CHECK_THROWS_AS(
        steady_state_covariance(cav, build_ito_matrix({vacuum_port(),
                                                       vacuum_port()})),
        DimensionMismatch);
}

TEST_CASE("quadratic weights generalize the photon cost") {
    const double k3 = 0.03, kn = 4.0;
    ClosedLoop loop;
    loop.ss = to_statespace(multi_port_cavity({0.01, 0.02, k3}, 0.0));
    loop.noise = {vacuum_port(), vacuum_port(), thermal_port(kn)};
    loop.cost.mode = 0;
    const double photons = lqg_cost(loop);

    loop.cost.weights = 0.5 * Mat::Identity(2, 2);
    // 1/2 <x^T Q x> = 1/4 tr(sigma) = photons + 1/2
    CHECK(lqg_cost(loop) == doctest::Approx(photons + 0.5).epsilon(1e-10));
}

TEST_CASE("output spectrum reproduces the filtered-bath Lorentzian") {
    const double k = 0.01, kn = 1.0, total = 3.0 * k;
    const StateSpace ss = to_statespace(multi_port_cavity({k, k, k}, 0.0));
    const ItoMatrix f =
        build_ito_matrix({vacuum_port(), vacuum_port(), thermal_port(kn)});

    Vec grid(4);
    grid << 0.0, 0.005, 0.015, 0.2;
    const Spectrum spec = output_spectrum(ss, f, 0, grid);

    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double w = grid(i);
        const double expected =
            kn * k * k / (w * w + total * total / 4.0);
        CHECK(spec.flux(i) == doctest::Approx(expected).epsilon(1e-10));
        CHECK((spec.blocks[static_cast<std::size_t>(i)] -
               spec.blocks[static_cast<std::size_t>(i)].adjoint())
                  .norm() <= 1e-12);
    }
    CHECK(spec.flux(0) == doctest::Approx(4.0 / 9.0).epsilon(1e-10));

    // an all-vacuum drive carries no excess flux anywhere
    const Spectrum dark = output_spectrum(
        ss, build_ito_matrix({vacuum_port(), vacuum_port(), vacuum_port()}),
        0, grid);
    CHECK(dark.flux.cwiseAbs().maxCoeff() <= 1e-12);

    CHECK_THROWS_AS(output_spectrum(ss, f, 3, grid), IndexOutOfRange);
}

TEST_CASE("spectral peaks merge below the requested resolution") {
    Spectrum spec;
    spec.omega = Vec::LinSpaced(801, 60.0, 140.0);
    spec.flux = Vec(spec.omega.size());
    auto lorentz = [](double w, double w0, double gamma) {
        return gamma * gamma / ((w - w0) * (w - w0) + gamma * gamma);
    };
    for (Eigen::Index i = 0; i < spec.omega.size(); ++i) {
        const double w = spec.omega(i);
        spec.flux(i) = lorentz(w, 95.0, 1.5) + 0.8 * lorentz(w, 105.0, 1.5);
    }

    const auto fine = spectral_peaks(spec, 3.0);
    REQUIRE(fine.size() == 2);
    CHECK(fine[0] == doctest::Approx(95.0).epsilon(1e-3));
    CHECK(fine[1] == doctest::Approx(105.0).epsilon(1e-3));

    // at coarser resolution only the taller of the pair survives
    const auto coarse = spectral_peaks(spec, 20.0);
    REQUIRE(coarse.size() == 1);
    CHECK(coarse[0] == doctest::Approx(95.0).epsilon(1e-3));

    CHECK_THROWS_AS(spectral_peaks(spec, -1.0), NonPositiveParam);
}
