#pragma once

#include <cstddef>
#include <vector>

#include "sympal/linalg.hpp"
#include "sympal/matrix.hpp"

namespace sympal {

// One symplectic S diagonalizing every input form: for each i,
// S^T M_i S = diag(spectra[i]) (+) diag(spectra[i]).
struct SimDiagResult {
  Matrix s;
  std::vector<std::vector<double>> spectra;
};

// {f, g} = 0 iff [J M_A, J M_B] = 0.
bool poisson_commutes(const Matrix& a, const Matrix& b,
                      const Tolerances& tol = {});

// ||[JA, JB]||_inf / (max(1,||A||) max(1,||B||)); the quantity the
// commutation checks and CLI diagnostics report.
double poisson_commutator_residual(const Matrix& a, const Matrix& b);

// Simultaneous Williamson diagonalization of a Poisson-commuting PD pair:
// diagonalize a, then refine orthosymplectically inside each of a's
// eigenvalue clusters using b.
SimDiagResult simultaneous_williamson(const Matrix& a, const Matrix& b,
                                      const Tolerances& tol = {});

// PSD variant; requires the intersection of the radicals to be a symplectic
// subspace. Joint-radical coordinates carry paired zeros in both spectra.
SimDiagResult simultaneous_williamson_psd(const Matrix& a, const Matrix& b,
                                          const Tolerances& tol = {});

// One S for a whole Poisson-commuting PD family, by folding the cluster
// refinement over the list.
SimDiagResult family_diagonalize(const std::vector<Matrix>& forms,
                                 const Tolerances& tol = {});

// ||[JA^s, JB^s]||_inf / (||A^s|| ||B^s||) for a PD pair with [A,B] = 0 and
// [JA,JB] = 0; the power theorem predicts numerical noise.
double power_commutator_residual(const Matrix& a, const Matrix& b, double s,
                                 const Tolerances& tol = {});

// A #_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2} for t in [0, 1].
Matrix geometric_mean(const Matrix& a, const Matrix& b, double t,
                      const Tolerances& tol = {});

}  // namespace sympal
