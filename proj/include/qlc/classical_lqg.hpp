#pragma once

#include "qlc/noise.hpp"
#include "qlc/statespace.hpp"

namespace qlc {

// Measurement/actuation view of a plant:
//
//   dx = A_p x dt + B_p du + dw,   dy = C_p x dt + dv
//
// with dw ~ N(0, F_w dt), dv ~ N(0, F_v dt) and cross-covariance
// M_ik = <dw_i dv_k>. After decorrelate(), M is zero and output_injection
// carries the original M F_v^{-1}, to be folded into the Kalman gain of any
// controller realized against the original plant (this sidesteps the u
// remap, which would need B_p^{-1}).
struct ClassicalPlantForm {
    Mat A_p, B_p, C_p;
    Mat F_w, F_v, M;
    Mat output_injection;
};

// Extract the form for a homodyne x-measurement of meas_port's output,
// actuating through drive_port's input pair. The drive port's own vacuum
// stays inside dw, so the form matches a loop whose controller emits a
// fresh displaced ancilla.
ClassicalPlantForm extract_plant_form(const StateSpace& plant,
                                      const NoiseSpec& noise,
                                      Eigen::Index meas_port,
                                      Eigen::Index drive_port);

// Change of variables A~ = A_p - M F_v^{-1} C_p, F~_w = F_w - M F_v^{-1} M^T.
// Idempotent; accumulates the injection bookkeeping.
ClassicalPlantForm decorrelate(const ClassicalPlantForm& p);

// Kalman filter plus feedback:
//
//   dxhat = (A~ - B_p L - K C_p) xhat dt + (K + injection) dy
//   du    = -L xhat dt
//
// K from the filter Riccati on the decorrelated pair, L = R_w^{-1} B_p^T X
// from the control Riccati.
struct ClassicalController {
    Mat A_c, B_c, C_c;
    Mat kalman_gain;    // includes the output-injection correction
    Mat feedback_gain;
    Mat Q_w, R_w;
};

ClassicalController kalman_lqg_controller(const ClassicalPlantForm& p,
                                          const Mat& q_w, const Mat& r_w);

// Port-device realization: input 0 feeds dy = x-quadrature of the field,
// input 1 is the fresh output ancilla; single output port carries
// ancilla + du dt.
StateSpace controller_statespace(const ClassicalController& k);

// Plant-state covariance of the abstract closed loop (plant form + filter),
// solved directly from the joint Lyapunov equation. Matches the plant block
// of the port-level interconnect when the form was extracted from it.
Mat classical_closed_covariance(const ClassicalPlantForm& p,
                                const ClassicalController& k);

// Photon-number weight of one mode, embedded in an n-state register.
Mat photon_weights(Eigen::Index n_states, Eigen::Index mode);

}  // namespace qlc
