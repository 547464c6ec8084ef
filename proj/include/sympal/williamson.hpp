#pragma once

#include <cstddef>
#include <vector>

#include "sympal/linalg.hpp"
#include "sympal/matrix.hpp"

namespace sympal {

// Williamson normal form of a positive-definite M: S symplectic with
// S^T M S = diag(spectrum) (+) diag(spectrum).
struct WilliamsonDecomposition {
  Matrix s;
  std::vector<double> spectrum;  // n positive reals, ascending
};

// Real projector onto the symplectic eigenspace of mu; commutes with F = JM.
struct SpectralProjector {
  double mu;
  Matrix p;
};

// Symplectic eigenvalues mu_1 <= ... <= mu_n of a PD matrix, obtained as
// square roots of the doubled eigenvalues of -K^2, K = M^{1/2} J M^{1/2}.
// Only the symmetric eigensolver is ever involved.
std::vector<double> symplectic_spectrum(const Matrix& m,
                                        const Tolerances& tol = {});

WilliamsonDecomposition williamson_decompose(const Matrix& m,
                                             const Tolerances& tol = {});

// True iff JM = MJ within tolerance.
bool is_orthosymplectically_diagonalizable(const Matrix& m,
                                           const Tolerances& tol = {});

// Williamson decomposition with an orthogonal (hence orthosymplectic) S;
// requires JM = MJ.
WilliamsonDecomposition orthosymplectic_decompose(const Matrix& m,
                                                  const Tolerances& tol = {});

// One projector per distinct symplectic eigenvalue (clusters merged at
// relative gap 1e-6), built by evaluating real-combined Lagrange polynomial
// pairs at F = JM.
std::vector<SpectralProjector> eigenspace_projectors(const Matrix& m,
                                                     const Tolerances& tol = {});

// z(t) = e^{tJM} z0 evaluated through normal modes: each Williamson pair
// rotates exactly with angular frequency mu_j. For m = I the flow is e^{tJ}.
std::vector<double> hamiltonian_flow(const Matrix& m,
                                     const std::vector<double>& z0, double t,
                                     const Tolerances& tol = {});

namespace detail {

// Shared cluster threshold for symplectic eigenvalue multiplicities.
inline constexpr double kClusterRelGap = 1e-6;

// Inverse of a symplectic matrix: J^T S^T J.
Matrix symplectic_inverse(const Matrix& s);

// Orthosymplectic Williamson for a J-commuting PSD matrix: columns are
// eigenvector pairs (x, -Jx), spectrum entries are the eigenvalues of m (one
// per pair, zeros clamped exactly). The workhorse behind
// orthosymplectic_decompose and the simultaneous refinements.
WilliamsonDecomposition jcommuting_orthosymplectic(const Matrix& m,
                                                   const Tolerances& tol,
                                                   bool require_pd);

}  // namespace detail

}  // namespace sympal
