#include "qlc/components.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "qlc/errors.hpp"
#include "qlc/linalg.hpp"
#include "qlc/statespace.hpp"

namespace qlc {

namespace {

constexpr double kHbar = 1.054571817e-34;   // J s
constexpr double kLightSpeed = 299792458.0; // m / s
constexpr double kBoltzmann = 1.380649e-23; // J / K

// Coupling row for L = sqrt(kappa) a on a one-mode register.
CMat annihilation_rows(const std::vector<double>& rates) {
    CMat lam(static_cast<Eigen::Index>(rates.size()), 2);
    for (Eigen::Index i = 0; i < lam.rows(); ++i) {
        if (rates[static_cast<std::size_t>(i)] < 0.0)
            throw NegativeCoupling("cavity: decay rate must be nonnegative");
        const double amp = 0.5 * std::sqrt(rates[static_cast<std::size_t>(i)]);
        lam(i, 0) = amp;
        lam(i, 1) = cplx(0.0, amp);
    }
    return lam;
}

}  // namespace

LinearSLH cavity(const std::vector<double>& kappas, double delta) {
    const auto m = static_cast<Eigen::Index>(kappas.size());
    Mat r = 0.5 * delta * Mat::Identity(2, 2);
    return make_linear_slh(CMat::Identity(m, m), annihilation_rows(kappas),
                           CVec::Zero(m), r, Vec::Zero(2));
}

LinearSLH opo(double kappa1, double kappa2, double delta, cplx epsilon) {
    Mat r(2, 2);
    r << delta - epsilon.imag(), epsilon.real(),
         epsilon.real(), delta + epsilon.imag();
    return make_linear_slh(CMat::Identity(2, 2),
                           annihilation_rows({kappa1, kappa2}), CVec::Zero(2),
                           0.5 * r, Vec::Zero(2));
}

LinearSLH beamsplitter(double alpha) {
    if (std::abs(alpha) > 1.0)
        throw InvalidTransmittance("beamsplitter: |alpha| must be <= 1");
    const double beta = std::sqrt(1.0 - alpha * alpha);
    CMat s(2, 2);
    s << alpha, beta, -beta, alpha;
    return make_linear_slh(s, CMat::Zero(2, 0), CVec::Zero(2), Mat(0, 0),
                           Vec(0));
}

LinearSLH phase(double phi) {
    CMat s(1, 1);
    s(0, 0) = std::polar(1.0, phi);
    return make_linear_slh(s, CMat::Zero(1, 0), CVec::Zero(1), Mat(0, 0),
                           Vec(0));
}

LinearSLH displacement(cplx offset) {
    CVec lam(1);
    lam(0) = offset;
    return make_linear_slh(CMat::Identity(1, 1), CMat::Zero(1, 0), lam,
                           Mat(0, 0), Vec(0));
}

StaticDevice squeezer_static(double eta, double phi_in, double phi_out) {
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = std::exp(eta);
    d(1, 1) = std::exp(-eta);
    return {rotation2(phi_out) * d * rotation2(phi_in), Vec::Zero(2)};
}

StaticDevice two_mode_squeezer_static(double eta) {
    const double c = std::cosh(eta);
    const double s = std::sinh(eta);
    Mat d(4, 4);
    d << c, 0, s, 0,
         0, c, 0, -s,
         s, 0, c, 0,
         0, -s, 0, c;
    return {d, Vec::Zero(4)};
}

ClassicalControllerSystem measurement_controller(const LinearSLH& front,
                                                 const Mat& gains,
                                                 double bandwidth) {
    if (front.n_modes != 0)
        throw DimensionMismatch(
            "measurement_controller: front circuit must be static");
    if (bandwidth <= 0.0)
        throw NonPositiveParam("measurement_controller: bandwidth must be > 0");
    const Eigen::Index n = front.n_ports;
    if (gains.rows() != 2 || gains.cols() != n)
        throw DimensionMismatch(
            "measurement_controller: gains must be 2 x (front ports)");

    const StateSpace fr = to_statespace(front);
    Mat meas(n, 2 * n);  // x-rows of the front scattering
    Vec mu(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        meas.row(i) = fr.D.row(2 * i);
        mu(i) = fr.c(2 * i);
    }

    const Eigen::Index nin = 2 * n + 2;  // measured ports + ancilla
    StateSpace dyn;
    dyn.A = -bandwidth * Mat::Identity(n, n);
    dyn.B = Mat::Zero(n, nin);
    dyn.B.leftCols(2 * n) = bandwidth * meas;
    dyn.C = gains;
    dyn.D = Mat::Zero(2, nin);
    dyn.D.rightCols(2) = Mat::Identity(2, 2);
    dyn.a = bandwidth * mu;
    dyn.c = Vec::Zero(2);
    dyn.Theta = Mat::Zero(n, n);

    StaticDevice stat;
    stat.D = Mat::Zero(2, nin);
    stat.D.leftCols(2 * n) = gains * meas;
    stat.D.rightCols(2) = Mat::Identity(2, 2);
    stat.c = gains * mu;
    return {dyn, stat, n};
}

ClassicalControllerSystem homodyne_controller(double xi1, double xi2,
                                              double bandwidth) {
    Mat gains(2, 1);
    gains << xi1, xi2;
    return measurement_controller(identity_circuit(1), gains, bandwidth);
}

ClassicalControllerSystem heterodyne_controller(double alpha,
                                                const Eigen::Matrix2d& gains,
                                                double bandwidth) {
    const LinearSLH front = series(
        concatenate(identity_circuit(1), phase(0.5 * std::numbers::pi)),
        beamsplitter(alpha));
    return measurement_controller(front, gains, bandwidth);
}

LinearSLH optomech_plant(const OptomechScenario& sc) {
    if (sc.omega <= 0.0 || sc.q_factor <= 0.0)
        throw NonPositiveParam("optomech_plant: omega and Q must be > 0");
    const double km = sc.k_m();
    CMat lam(3, 2);
    lam.setZero();
    lam(0, 0) = sc.coupling1;
    lam(1, 0) = sc.feedback_coupling();
    lam(2, 0) = 0.5 * std::sqrt(km);
    lam(2, 1) = cplx(0.0, 0.5 * std::sqrt(km));
    return make_linear_slh(CMat::Identity(3, 3), lam, CVec::Zero(3),
                           0.5 * sc.omega * Mat::Identity(2, 2), Vec::Zero(2));
}

ClosedLoop close_loop(const StateSpace& plant, const StateSpace& ctrl,
                      const NoiseSpec& plant_free_noise, const CostSpec& cost) {
    if (plant.out_ports() < 1 || plant.in_ports() < 2)
        throw DimensionMismatch("close_loop: plant needs output 0 and input 1");
    if (ctrl.in_ports() < 1 || ctrl.out_ports() < 1)
        throw DimensionMismatch("close_loop: controller needs port 0");
    if (static_cast<Eigen::Index>(plant_free_noise.size()) !=
        plant.in_ports() - 1)
        throw DimensionMismatch(
            "close_loop: one noise entry per unwired plant input expected");

    Wiring w;
    w.plant_to_ctrl.push_back({0, 0});
    w.ctrl_to_plant.push_back({0, 1});

    ClosedLoop loop;
    loop.ss = interconnect(plant, ctrl, w);
    loop.noise = plant_free_noise;
    for (Eigen::Index i = 1; i < ctrl.in_ports(); ++i)
        loop.noise.push_back(vacuum_port());
    loop.cost = cost;
    loop.probe_port = 0;
    return loop;
}

LinearSLH loop_circuit(const LinearSLH& plant, const LinearSLH& ctrl) {
    if (plant.n_ports < 2 || ctrl.n_ports < 1)
        throw DimensionMismatch("loop_circuit: plant needs two loop ports");
    const LinearSLH g = concatenate(plant, ctrl);
    const LinearSLH once = feedback(g, 0, plant.n_ports);
    return feedback(once, plant.n_ports - 1, 1);
}

namespace {

NoiseSpec cavity_free_noise(const CavityScenario& sc) {
    return {vacuum_port(), thermal_port(sc.k_n)};
}

CostSpec cavity_cost() { return {0, std::nullopt}; }

}  // namespace

ClosedLoop cavity_closed_loop(const CavityScenario& sc,
                              const StateSpace& ctrl) {
    const StateSpace plant =
        to_statespace(cavity({sc.k1, sc.k2, sc.k3}, sc.delta));
    return close_loop(plant, ctrl, cavity_free_noise(sc), cavity_cost());
}

ClosedLoop cavity_closed_loop(const CavityScenario& sc, const LinearSLH& ctrl) {
    return cavity_closed_loop(sc, to_statespace(ctrl));
}

ClosedLoop cavity_no_control(const CavityScenario& sc) {
    ClosedLoop loop;
    loop.ss = to_statespace(cavity({sc.k1, sc.k2, sc.k3}, sc.delta));
    loop.noise = {vacuum_port(), vacuum_port(), thermal_port(sc.k_n)};
    loop.cost = cavity_cost();
    loop.probe_port = 0;
    return loop;
}

LinearSLH cavity_loop_circuit(const CavityScenario& sc, const LinearSLH& ctrl) {
    return loop_circuit(cavity({sc.k1, sc.k2, sc.k3}, sc.delta), ctrl);
}

ClosedLoop optomech_closed_loop(const OptomechScenario& sc,
                                const StateSpace& ctrl) {
    const StateSpace plant = to_statespace(optomech_plant(sc));
    return close_loop(plant, ctrl, {vacuum_port(), thermal_port(sc.k_n)},
                      cavity_cost());
}

ClosedLoop optomech_closed_loop(const OptomechScenario& sc,
                                const LinearSLH& ctrl) {
    return optomech_closed_loop(sc, to_statespace(ctrl));
}

ClosedLoop optomech_no_control(const OptomechScenario& sc) {
    OptomechScenario open = sc;
    open.coupling1 = 0.0;
    open.coupling2 = 0.0;
    open.lock_couplings = false;
    ClosedLoop loop;
    loop.ss = to_statespace(optomech_plant(open));
    loop.noise = {vacuum_port(), vacuum_port(), thermal_port(sc.k_n)};
    loop.cost = cavity_cost();
    loop.probe_port = 0;
    return loop;
}

ClosedLoop optomech_photon_channel(const OptomechScenario& sc,
                                   const StateSpace& ctrl) {
    const StateSpace plant = to_statespace(optomech_plant(sc));
    ClosedLoop loop = optomech_closed_loop(sc, ctrl);

    // The tapped beam is the controller's port-0 output,
    //   y = C_c0 x_c + D_c00 (C_p0 x_p + w_probe) + D_c0j w_anc_j,
    // using that the plant scatters its inputs straight through (S = I).
    const Eigen::Index np = plant.n_states();
    const Eigen::Index nc = ctrl.n_states();
    const Mat d_c00 = ctrl.D.topLeftCorner(2, 2);

    Mat c = Mat::Zero(2, loop.ss.n_states());
    c.leftCols(np) = d_c00 * plant.C.topRows(2);
    c.rightCols(nc) = ctrl.C.topRows(2);

    Mat d = Mat::Zero(2, loop.ss.B.cols());
    d.leftCols(2) = d_c00;  // probe comes first in the free-input order
    if (ctrl.D.cols() > 2)
        d.rightCols(ctrl.D.cols() - 2) = ctrl.D.topRightCorner(2, ctrl.D.cols() - 2);

    loop.ss.C = c;
    loop.ss.D = d;
    return loop;
}

LinearSLH optomech_circuit(const OptomechScenario& sc, const LinearSLH& ctrl) {
    if (ctrl.n_ports < 1)
        throw DimensionMismatch("optomech_circuit: controller needs a port");
    if (sc.omega <= 0.0 || sc.q_factor <= 0.0)
        throw NonPositiveParam("optomech_circuit: omega and Q must be > 0");
    const Eigen::Index n = 1 + ctrl.n_modes;
    const Eigen::Index extras = ctrl.n_ports - 1;

    auto mirror_coupler = [n](double k) {
        CMat lam = CMat::Zero(1, 2 * n);
        lam(0, 0) = k;
        return make_linear_slh(CMat::Identity(1, 1), lam, CVec::Zero(1),
                               Mat::Zero(2 * n, 2 * n), Vec::Zero(2 * n));
    };
    auto stage = [&](double k) {
        LinearSLH cav = mirror_coupler(k);
        if (extras == 0) return cav;
        return concat_ports(cav, embed(identity_circuit(extras), n, 0));
    };

    const LinearSLH chain =
        series_shared(stage(sc.feedback_coupling()),
                      series_shared(embed(ctrl, n, 1), stage(sc.coupling1)));

    const double km = sc.k_m();
    CMat bath = CMat::Zero(1, 2 * n);
    bath(0, 0) = 0.5 * std::sqrt(km);
    bath(0, 1) = cplx(0.0, 0.5 * std::sqrt(km));
    Mat r = Mat::Zero(2 * n, 2 * n);
    r.topLeftCorner(2, 2) = 0.5 * sc.omega * Mat::Identity(2, 2);
    const LinearSLH spring = make_linear_slh(
        CMat::Identity(1, 1), bath, CVec::Zero(1), r, Vec::Zero(2 * n));

    return concat_ports(chain, spring);
}

PhysicalCouplings physical_params_to_couplings(const PhysicalParams& pp) {
    if (pp.mass <= 0.0 || pp.omega_m <= 0.0 || pp.q_factor <= 0.0 ||
        pp.omega_laser <= 0.0 || pp.temperature <= 0.0)
        throw NonPositiveParam(
            "physical_params_to_couplings: mass, frequencies, Q and T must "
            "be > 0");

    PhysicalCouplings out;
    for (std::size_t i = 0; i < 2; ++i) {
        if (pp.power[i] < 0.0)
            throw NonPositiveParam(
                "physical_params_to_couplings: power must be >= 0");
        if (pp.length[i] <= 0.0)
            throw NonPositiveParam(
                "physical_params_to_couplings: length must be > 0");
        if (pp.transmittance[i] <= 0.0 || pp.transmittance[i] > 1.0)
            throw InvalidTransmittance(
                "physical_params_to_couplings: transmittance must lie in "
                "(0, 1]");
        const double rate = std::sqrt(pp.power[i] / (kHbar * pp.omega_laser));
        const double kappa =
            pp.transmittance[i] * kLightSpeed / (2.0 * pp.length[i]);
        const double eta = (pp.omega_laser / pp.length[i]) *
                           std::sqrt(kHbar / (2.0 * pp.mass * pp.omega_m));
        out.kappa[i] = kappa;
        out.coupling[i] = 4.0 * eta * rate / kappa;
    }
    out.k_n =
        1.0 / (1.0 - std::exp(-kHbar * pp.omega_m /
                              (kBoltzmann * pp.temperature)));
    out.k_m = pp.omega_m / pp.q_factor;
    return out;
}

}  // namespace qlc
