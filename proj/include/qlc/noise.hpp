#pragma once

#include <vector>

#include "qlc/linalg.hpp"

namespace qlc {

// Per-port noise statistics for the exogenous inputs of a compiled system.
// Vacuum contributes the identity block to the symmetrized Ito matrix,
// a thermal port (1 + 2 k_n) I.
enum class NoiseKind { vacuum, thermal };

struct PortNoise {
    NoiseKind kind = NoiseKind::vacuum;
    double occupation = 0.0;  // k_n, used for thermal ports
};

using NoiseSpec = std::vector<PortNoise>;

PortNoise vacuum_port();
PortNoise thermal_port(double occupation);

// Symmetrized quadrature Ito matrix F of the stacked input vector.
struct ItoMatrix {
    Mat F;
};

ItoMatrix build_ito_matrix(const NoiseSpec& spec);

// A physical input model must keep F + iJ positive semidefinite.
bool is_quantum_valid(const Mat& f);

}  // namespace qlc
