#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qlc/errors.hpp"
#include "qlc/tolerances.hpp"

namespace qlc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

// Canonical commutation form J = I_n (x) [[0,1],[-1,0]] on interleaved
// quadratures (x1, p1, x2, p2, ...).
Mat canonical_j(Eigen::Index n_pairs);

// Quadrature rotation matching a scalar phase factor e^{i phi}.
Eigen::Matrix2d rotation2(double phi);

Mat symmetrize(const Mat& m);

double spectral_abscissa(const Mat& a);
bool is_hurwitz(const Mat& a, double margin = tol::hurwitz_margin);

// Smallest eigenvalue of the Hermitian matrix H + i K (H, K real, K = -K^T).
double min_eig_hermitian(const Mat& h, const Mat& k);

// Solve A X + X A^T + W = 0 by Kronecker vectorization with one refinement
// pass. Sized for small dense problems; throws SolverFailure on breakdown.
Mat lyapunov_solve(const Mat& a, const Mat& w);

// Stabilizing solution of A^T X + X A + Q - X B R^{-1} B^T X = 0 via the
// stable invariant subspace of the Hamiltonian matrix, polished by Newton
// iterations (each one a Lyapunov solve). Throws NoStabilizingSolution when
// the stable subspace does not split cleanly or the closed loop fails to be
// Hurwitz.
Mat care_solve(const Mat& a, const Mat& b, const Mat& q, const Mat& r);

}  // namespace qlc
