#pragma once

namespace qlc::tol {

inline constexpr double unitary = 1e-10;           // ||S S^dag - I||_F for scattering matrices
inline constexpr double pivot = 1e-12;             // feedback elimination pivot |1 - S_kl|
inline constexpr double complex_residue = 1e-10;   // imaginary leakage in quadrature stacking
inline constexpr double realizability = 1e-9;      // commutation-preservation residuals
inline constexpr double hurwitz_margin = -1e-9;    // spectral abscissa must lie below this
inline constexpr double lyapunov_residual = 1e-10; // relative to ||B F B^T||_F
inline constexpr double quantum_psd = -1e-10;      // min eig of F + iJ
inline constexpr double heisenberg_psd = -1e-9;    // min eig of sigma + i Theta
inline constexpr double riccati_residual = 1e-9;   // relative to max(1, ||Q||_F)

}  // namespace qlc::tol
