#pragma once

#include <array>
#include <tuple>
#include <vector>

#include "qlc/slh.hpp"

namespace qlc {

// Quadrature-basis input-output model with affine offsets:
//
//   dx = [A x + a] dt + B dw,   dy = [C x + c] dt + D dw
//
// Ports group quadratures in consecutive (x, p) pairs. Theta holds the state
// commutation form: the canonical J for field modes, zero rows/columns for
// classical (filter) states. Input and output port counts may differ for
// classical devices; systems compiled from SLH triples are always square.
struct StateSpace {
    Mat A, B, C, D;
    Vec a, c;
    Mat Theta;

    Eigen::Index n_states() const { return A.rows(); }
    Eigen::Index n_inputs() const { return B.cols(); }
    Eigen::Index n_outputs() const { return C.rows() == 0 ? D.rows() : C.rows(); }
    Eigen::Index in_ports() const { return n_inputs() / 2; }
    Eigen::Index out_ports() const { return n_outputs() / 2; }
};

// Memoryless symplectic (or classical) device: dy = D dw + c dt.
struct StaticDevice {
    Mat D;
    Vec c;
};

// Doubles each port into (x, p) rows: S~ is the real representation of S,
// Lambda~ stacks (2 Re, 2 Im) rows per port. Built through the complex
// change of basis; throws ComplexResidue if the result fails to be real.
std::tuple<Mat, Mat, Vec> quadrature_stack(const CMat& scattering,
                                           const CMat& coupling,
                                           const CVec& coupling_offset);

// Compile an SLH triple to the quadrature state space:
//   A = 2 Theta (R + 1/4 L~^T J L~),  B = Theta L~^T J S~,
//   C = L~,  D = S~,  a = 2 Theta (r + 1/4 L~^T J l~),  c = l~.
StateSpace to_statespace(const LinearSLH& g);

// Commutation-preservation residuals:
//   r1 = ||A Theta + Theta A^T + B J B^T||
//   r2 = ||Theta C^T + B J D^T||
//   r3 = ||D J D^T - J||
std::array<double, 3> check_realizability(const StateSpace& ss);

// Frozen-dynamics limit D - C A^{-1} B for controllers much faster than the
// systems they steer. Requires A Hurwitz.
StaticDevice adiabatic_eliminate(const StateSpace& ss);

StateSpace static_to_statespace(const StaticDevice& dev,
                                Eigen::Index in_ports);

// Port-level loop closure between two state-space systems. Wires carry
// whole (x, p) pairs. Exogenous inputs keep the order [plant unwired,
// controller unwired]; outputs likewise.
struct PortWire {
    Eigen::Index from_port = 0;
    Eigen::Index to_port = 0;
};

struct Wiring {
    std::vector<PortWire> plant_to_ctrl;
    std::vector<PortWire> ctrl_to_plant;
};

StateSpace interconnect(const StateSpace& plant, const StateSpace& ctrl,
                        const Wiring& wiring);

}  // namespace qlc
