#pragma once

#include <array>
#include <vector>

#include "qlc/analysis.hpp"

namespace qlc {

// ---- standard devices ----

// n-port cavity: S = I, L_i = sqrt(kappa_i) a, H = Delta a^dag a.
LinearSLH cavity(const std::vector<double>& kappas, double delta);

// Two-port parametric oscillator; epsilon encodes pump strength and phase.
LinearSLH opo(double kappa1, double kappa2, double delta, cplx epsilon);

// Static routing elements (no internal modes).
LinearSLH beamsplitter(double alpha);
LinearSLH phase(double phi);
LinearSLH displacement(cplx offset);

// Ideal squeezer limit models: what a fast OPO looks like from outside.
//   squeezer_static: diag(e^eta, e^-eta) conjugated by input/output rotations.
//   two_mode_squeezer_static: phase-conjugating amplifier on (signal, idler).
StaticDevice squeezer_static(double eta, double phi_in = 0.0,
                             double phi_out = 0.0);
StaticDevice two_mode_squeezer_static(double eta);

// ---- measurement-based controllers ----

// Homodyne-style device: the x-rows of a passive front circuit define the
// measured currents m; a one-pole classical filter f tracks them,
//   df = -bw (f - m) dt,
// and the output field is a fresh ancilla displaced by gains * f. The
// static_form is the exact bw -> infinity limit (equals adiabatic
// elimination of `dynamic`). Inputs: measured ports of `front`, then the
// ancilla; single output port.
struct ClassicalControllerSystem {
    StateSpace dynamic;
    StaticDevice static_form;
    Eigen::Index meas_ports = 1;
};

ClassicalControllerSystem measurement_controller(const LinearSLH& front,
                                                 const Mat& gains,
                                                 double bandwidth);

// x-quadrature measurement feeding both output quadratures.
ClassicalControllerSystem homodyne_controller(double xi1, double xi2,
                                              double bandwidth);

// Two-current controller built from the circuit
//   (Hom)_2-in <| (I_1 [+] e^{i pi/2}) <| BS(alpha);
// gains(i, j) weights current j into output quadrature i.
ClassicalControllerSystem heterodyne_controller(double alpha,
                                                const Eigen::Matrix2d& gains,
                                                double bandwidth);

// ---- cooling scenarios ----

struct CavityScenario {
    double k1 = 0.01;
    double k2 = 0.01;
    double k3 = 0.01;
    double delta = 0.1;
    double k_n = 1.0;
};

struct OptomechScenario {
    double omega = 100.0;
    double q_factor = 1e4;
    double k_n = 1.0;
    double coupling1 = 0.0;       // K1, probe
    double coupling2 = 0.0;       // K2, feedback
    bool lock_couplings = true;   // enforce K1 = -K2

    double k_m() const { return omega / q_factor; }
    double feedback_coupling() const {
        return lock_couplings ? -coupling1 : coupling2;
    }
};

// Linearized mirror plant: one mechanical mode, ports
//   0: probe   (L = K1 x_m)
//   1: feedback (L = K2 x_m)
//   2: phonon bath (L = sqrt(k_m) b), thermal occupation k_n.
LinearSLH optomech_plant(const OptomechScenario& sc);

// ---- loop assembly ----
// Convention: plant output 0 drives controller input 0; controller output 0
// returns into plant input 1. Remaining controller inputs ride vacuum.

// State-space route; works for coherent, static and hybrid controllers.
ClosedLoop close_loop(const StateSpace& plant, const StateSpace& ctrl,
                      const NoiseSpec& plant_free_noise, const CostSpec& cost);

// SLH route: concatenate then eliminate both loop ports.
LinearSLH loop_circuit(const LinearSLH& plant, const LinearSLH& ctrl);

ClosedLoop cavity_closed_loop(const CavityScenario& sc, const StateSpace& ctrl);
ClosedLoop cavity_closed_loop(const CavityScenario& sc, const LinearSLH& ctrl);
ClosedLoop cavity_no_control(const CavityScenario& sc);
LinearSLH cavity_loop_circuit(const CavityScenario& sc, const LinearSLH& ctrl);

ClosedLoop optomech_closed_loop(const OptomechScenario& sc,
                                const StateSpace& ctrl);
ClosedLoop optomech_closed_loop(const OptomechScenario& sc,
                                const LinearSLH& ctrl);
ClosedLoop optomech_no_control(const OptomechScenario& sc);

// Readout view of the probe beam where it leaves the controller, after the
// controller's reflection/leakage but before the return bounce writes
// K2 x_m onto it once more. The returned system reuses the closed-loop
// dynamics and noise list; its single output pair is that beam, so
// output_spectrum(view.ss, F, 0, grid) gives the cooling sidebands carried
// by the light. Decoupled (K = 0) and driven by vacuum, the channel stays
// vacuum: zero flux.
ClosedLoop optomech_photon_channel(const OptomechScenario& sc,
                                   const StateSpace& ctrl);

// Series-product view of the optomech loop: the cascade
//   [(Cav2 [+] I) <| ctrl <| (Cav1 [+] I)] [+] (Spr)
// built on the shared register [mirror mode, controller modes]. Ports:
// [loop, controller extras..., phonon bath].
LinearSLH optomech_circuit(const OptomechScenario& sc, const LinearSLH& ctrl);

// ---- laboratory unit conversions ----

struct PhysicalParams {
    std::array<double, 2> power;          // laser power per arm, W
    std::array<double, 2> transmittance;  // mirror power transmittance
    std::array<double, 2> length;         // cavity length, m
    double mass = 0.0;                    // mirror mass, kg
    double omega_m = 0.0;                 // spring frequency, rad/s
    double q_factor = 0.0;
    double omega_laser = 0.0;             // rad/s
    double temperature = 0.0;             // K
};

struct PhysicalCouplings {
    std::array<double, 2> coupling;  // K_i
    std::array<double, 2> kappa;     // cavity decay rates
    double k_n = 0.0;
    double k_m = 0.0;
};

PhysicalCouplings physical_params_to_couplings(const PhysicalParams& pp);

}  // namespace qlc
