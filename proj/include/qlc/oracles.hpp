#pragma once

#include "qlc/linalg.hpp"

namespace qlc {

// Closed-form steady-state photon numbers for the driven-cavity loop,
// kept verbatim as ground truth for the numerical pipeline.
enum class CavityOracleKind { no_control, trivial, heterodyne, squeezer,
                              two_mode };

struct CavityOracleParams {
    double k1 = 0.01;
    double k2 = 0.01;
    double k3 = 0.01;
    double k_n = 1.0;
    double eta = 0.0;    // amplification / squeezing
    double phi = 0.0;    // loop phase (squeezer only)
    double delta = 0.0;  // plant detuning (squeezer only)
};

double oracle_cavity_cost(CavityOracleKind kind, const CavityOracleParams& p);

// Squeezer cost with the thermal numerator term weighted by k3. The
// verbatim closed form above carries a bare 2 k_n there; the acceptance
// suite compares both variants against the simulated loop and reports the
// discrepancy.
double oracle_squeezer_k3(const CavityOracleParams& p);

// Noise level below which any squeezing only heats the cavity:
// k1 (k1+k2+k3+2 sqrt(k1 k2)) / (sqrt(k1 k2) k3).
double oracle_threshold(double k1, double k2, double k3);

// Steady-state temperature of a spring damped by a cold load kappa against
// a hot bath k_m: T_sys = k_m T_h / (kappa + k_m).
double oracle_refrigerator(double k_m, double kappa, double t_hot);

}  // namespace qlc
