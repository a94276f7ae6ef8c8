#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qlc/linalg.hpp"

namespace qlc {

// Linear open quantum system (S, L, H) over interleaved quadrature
// coordinates x = (x1, p1, x2, p2, ...):
//
//   L = coupling * x + coupling_offset
//   H = 1/2 x^T quad_hamiltonian x + lin_hamiltonian^T x
//
// S is unitary. Static elements (phases, beamsplitters, displacements) carry
// n_modes = 0. Port names are audit metadata only; relabeling never permutes
// matrices behind the caller's back.
struct LinearSLH {
    Eigen::Index n_modes = 0;
    Eigen::Index n_ports = 0;
    CMat scattering;
    CMat coupling;
    CVec coupling_offset;
    Mat quad_hamiltonian;
    Vec lin_hamiltonian;
    std::vector<std::string> port_names;
};

// Validating constructor; symmetrizes R and checks S for unitarity.
LinearSLH make_linear_slh(const CMat& scattering, const CMat& coupling,
                          const CVec& coupling_offset,
                          const Mat& quad_hamiltonian,
                          const Vec& lin_hamiltonian);

// n-port passthrough with no internal modes.
LinearSLH identity_circuit(Eigen::Index n_ports);

// Reindex a system's modes into a larger register (ports untouched).
LinearSLH embed(const LinearSLH& g, Eigen::Index total_modes,
                Eigen::Index mode_offset);

// Stack ports of two systems that share one mode register; Hamiltonians add.
LinearSLH concat_ports(const LinearSLH& g1, const LinearSLH& g2);

// Group product on a shared register: signal flows inner -> outer.
//   (S2 S1, L2 + S2 L1, H1 + H2 + Im(L2^dag S2 L1))
LinearSLH series_shared(const LinearSLH& outer, const LinearSLH& inner);

// Disjoint-system composites; mode registers are concatenated
// (concatenate: [g1 | g2], series: [outer | inner]).
LinearSLH concatenate(const LinearSLH& g1, const LinearSLH& g2);
LinearSLH series(const LinearSLH& outer, const LinearSLH& inner);

// Close output port out_port onto input port in_port by linear-fractional
// elimination with pivot (1 - S_{out,in}). The result has one less port;
// remaining inputs and outputs keep their original relative order.
LinearSLH feedback(const LinearSLH& g, Eigen::Index out_port,
                   Eigen::Index in_port);

// Reorder ports (rows and columns of S, rows of the coupling) by perm, where
// perm[i] names the old port placed at position i.
LinearSLH permute_ports(const LinearSLH& g,
                        const std::vector<Eigen::Index>& perm);

LinearSLH relabel_ports(const LinearSLH& g, std::vector<std::string> names);

// Composition tree for netlists: leaves hold components, inner nodes apply
// the circuit algebra. evaluate() checks arities before composing.
class CircuitExpr {
  public:
    static CircuitExpr leaf(LinearSLH g, std::string id = {});
    static CircuitExpr concat(CircuitExpr a, CircuitExpr b);
    static CircuitExpr chain(CircuitExpr outer, CircuitExpr inner);
    static CircuitExpr loop(CircuitExpr inner, Eigen::Index out_port,
                            Eigen::Index in_port);
    static CircuitExpr relabel(CircuitExpr inner,
                               std::vector<std::string> names);

    LinearSLH evaluate() const;
    Eigen::Index port_count() const;

    struct Node;

  private:
    std::shared_ptr<const Node> node_;
};

}  // namespace qlc
