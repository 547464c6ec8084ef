#pragma once

#include <cstddef>
#include <vector>

#include "sympal/linalg.hpp"
#include "sympal/matrix.hpp"

namespace sympal {

// Symplectic diagonalization of a PSD form whose kernel is symplectic:
// S^T M S = diag(spectrum) (+) diag(spectrum) with the first k spectrum
// entries positive ascending and the remaining n-k exactly zero.
struct DegenerateDecomposition {
  Matrix s;
  std::vector<double> spectrum;
  std::size_t k = 0;  // rank(M) / 2
};

// General Hoermander PSD normal form: S^T M S = [[A_n, 0], [0, B_n]] with
// A_n = diag(mu_1..mu_k, 1 x l, 0...) and B_n = diag(mu_1..mu_k, 0...).
struct HormanderPSDForm {
  Matrix s;
  std::size_t k = 0;       // elliptic pairs
  std::size_t l = 0;       // parabolic directions
  std::vector<double> mu;  // k positive reals, ascending
};

// True iff the omega-Gram matrix of nullspace(m) is nondegenerate
// (|det| above the rank threshold); vacuously true for a trivial kernel.
bool kernel_is_symplectic(const Matrix& m, const Tolerances& tol = {});

DegenerateDecomposition degenerate_williamson(const Matrix& m,
                                              const Tolerances& tol = {});

HormanderPSDForm hormander_psd_normal_form(const Matrix& m,
                                           const Tolerances& tol = {});

}  // namespace sympal
