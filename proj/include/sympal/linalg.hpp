#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "sympal/matrix.hpp"

namespace sympal {

// Relative thresholds, scaled by max(1, ||input||_inf) where they are used.
struct Tolerances {
  double rank_tol = 1e-9;  // null/singular decisions
  double sym_tol = 1e-8;   // symmetry and commutator checks
  double conv_tol = 1e-12; // eigensolver off-diagonal stopping rule

  Tolerances scaled(double factor) const {
    return {rank_tol * factor, sym_tol * factor, conv_tol * factor};
  }
};

struct EigenDecomposition {
  Matrix q;                    // orthogonal; columns are eigenvectors
  std::vector<double> values;  // ascending
};

// The 2n x 2n block matrix [[0, I], [-I, 0]] in (x_1..x_n, p_1..p_n) order.
Matrix standard_symplectic_form(std::size_t n);

// omega(x, y) = x^T J y without forming J.
double omega(const std::vector<double>& x, const std::vector<double>& y);

// Cyclic Jacobi for symmetric matrices. Values ascending; eigenvector signs
// normalized (first significant component positive) so output is
// deterministic for identical inputs.
EigenDecomposition symmetric_eigen(const Matrix& m, const Tolerances& tol = {});

// q diag(values^s) q^T for symmetric PSD m. For non-integer or negative s,
// eigenvalues below the rank threshold are clamped to zero; s < 0 further
// requires strict positivity.
Matrix matrix_power(const Matrix& m, double s, const Tolerances& tol = {});

// Orthonormal basis of the kernel (eigenvalues below the rank threshold),
// one column per zero mode; empty matrix for trivial kernel.
Matrix nullspace(const Matrix& m, const Tolerances& tol = {});

bool is_symplectic(const Matrix& s, const Tolerances& tol = {});
bool is_orthosymplectic(const Matrix& s, const Tolerances& tol = {});

// Turns the columns (spanning a symplectic subspace, even count) into a
// symplectic basis {u_1..u_m, v_1..v_m} with omega(u_i, v_j) = delta_ij.
// Pivots on the largest remaining |omega(b_i, b_j)|; throws if the span is
// omega-degenerate, reporting the offending pivot value.
Matrix symplectic_gram_schmidt(const Matrix& basis, const Tolerances& tol = {});

namespace detail {

// Groups ascending values into clusters whose neighbours differ by at most
// rel_gap * max(1, |value|). Returns one (first, last] index range per
// cluster as (begin, end) pairs.
std::vector<std::pair<std::size_t, std::size_t>> cluster_ascending(
    const std::vector<double>& values, double rel_gap);

double determinant(Matrix a);

// w minus its omega-projection onto the symplectic plane span{u, v},
// omega(u, v) = 1. The result is omega-orthogonal to both u and v.
std::vector<double> omega_deflate(const std::vector<double>& w,
                                  const std::vector<double>& u,
                                  const std::vector<double>& v);

// Sequential Gram-Schmidt dropping vectors whose residual norm falls below
// drop_tol; returns orthonormal columns.
std::vector<std::vector<double>> orthonormalize(
    std::vector<std::vector<double>> vs, double drop_tol);

void flip_to_canonical_sign(std::vector<double>& v);

}  // namespace detail

}  // namespace sympal
