#pragma once

#include <optional>

#include "qlc/noise.hpp"
#include "qlc/statespace.hpp"

namespace qlc {

// Steady-state second moments of the fluctuations, with the commutation form
// carried along for uncertainty-principle checks.
struct Covariance {
    Mat sigma;
    Mat Theta;
};

// Quadratic performance index: photon number of one designated mode, or a
// general weight 1/2 <x^T Q x> when weights are provided.
struct CostSpec {
    Eigen::Index mode = 0;
    std::optional<Mat> weights;
};

struct ClosedLoop {
    StateSpace ss;
    NoiseSpec noise;
    CostSpec cost;
    Eigen::Index probe_port = 0;  // output port carrying the loop light
};

// Solves A sigma + sigma A^T + B F B^T = 0. Requires A Hurwitz; enforces the
// relative residual bound before returning.
Covariance steady_state_covariance(const StateSpace& ss, const ItoMatrix& f);

// <a^dag a> of mode m from its 2x2 covariance block: (s_xx + s_pp - 2) / 4.
double photon_number(const Covariance& cov, Eigen::Index mode);

double lqg_cost(const ClosedLoop& loop);

// Spectral abscissa of the drift; negative means stable.
double stability_margin(const StateSpace& ss);

// Two-sided symmetrized output spectrum S(w) = H(w) F H(w)^dag restricted to
// one output port, with the vacuum-subtracted photon-flux density
// (tr block - 2) / 4 on the grid.
struct Spectrum {
    Vec omega;
    std::vector<Eigen::Matrix2cd> blocks;
    Vec flux;
};

Spectrum output_spectrum(const StateSpace& ss, const ItoMatrix& f,
                         Eigen::Index port, const Vec& omega_grid);

// Frequencies of the flux trace's local maxima, merged at the resolution
// min_separation: of two maxima closer than that, only the higher survives.
// Hybridized modes split by less than a linewidth report as one feature.
std::vector<double> spectral_peaks(const Spectrum& spec,
                                   double min_separation);

}  // namespace qlc
