#pragma once

#include <cstddef>
#include <vector>

#include "sympal/linalg.hpp"
#include "sympal/matrix.hpp"

namespace sympal {

// Quadratic Hamiltonian H(z) = <z, M z> for N particles in d dimensions;
// phase dimension 2Nd.
struct QuadraticHamiltonian {
  QuadraticHamiltonian(Matrix m, std::size_t particles,
                       std::size_t dims_per_particle);

  Matrix m;
  std::size_t particles;
  std::size_t dims_per_particle;
};

struct ThermoParams {
  ThermoParams(double beta, double hbar);

  double beta;  // inverse temperature
  double hbar;  // action scale
};

// Ellipsoid {z : <z, M z> <= 1}, cylinder Z_j(R) : x_j^2 + p_j^2 <= R^2,
// or ball B(R) : sum (x_i^2 + p_i^2) <= R^2.
struct PhaseSpaceRegion {
  enum class Kind { Ellipsoid, Cylinder, Ball };

  static PhaseSpaceRegion ellipsoid(Matrix m);
  static PhaseSpaceRegion cylinder(std::size_t axis, double radius);
  static PhaseSpaceRegion ball(double radius);

  Kind kind = Kind::Ball;
  Matrix m;              // ellipsoid
  std::size_t axis = 1;  // cylinder, 1-based
  double radius = 0.0;   // cylinder / ball
};

// Extension of a degenerate Hamiltonian off its constraint surface:
// Htilde(Sz) = H(Sz) + sum_l chi_l C_ll chi_l. chi_indices are the 0-based
// normal coordinates forced to zero on the surface (slots k..n-1 and
// n+k..2n-1), c holds the C_ll coefficients in the same order.
struct ConstraintReport {
  Matrix s;
  std::size_t k = 0;
  std::vector<std::size_t> chi_indices;
  std::vector<double> c;
};

// Z = (2 hbar beta)^{-Nd} prod_i det(H_i)^{-1/2} for N non-interacting
// particles, each Hamiltonian PD on its own 2d block.
double partition_noninteracting(const std::vector<QuadraticHamiltonian>& hs,
                                const ThermoParams& params,
                                const Tolerances& tol = {});

// Z = (2 hbar beta)^{-Nd} prod_j (sum_i lambda_{i,j})^{-1} with the spectra
// aligned by one shared diagonalizing basis.
double partition_interacting(const std::vector<QuadraticHamiltonian>& hs,
                             const ThermoParams& params,
                             const Tolerances& tol = {});

// Simultaneous normal form of a degenerate/non-degenerate pair sharing their
// elliptic modes; exposes the constrained coordinates and coefficients.
ConstraintReport hormander_constraints(const Matrix& m, const Matrix& mt,
                                       const Tolerances& tol = {});

// Ball and cylinder: pi R^2. Ellipsoid {<z,Mz> <= 1}: pi / lambda_max(M)
// with lambda_max the largest symplectic eigenvalue.
double capacity(const PhaseSpaceRegion& region, const Tolerances& tol = {});

// A ball of radius ball_r embeds symplectically into a cylinder of radius
// cyl_r only if its capacity does not exceed the cylinder's.
bool nonsqueezing_embeddable(double ball_r, double cyl_r);

// g(z) - 2 where g(z) = sum_l chi_l(z) C_ll chi_l(z); zero on the Gromov
// hypersurface.
double gromov_gap(const ConstraintReport& report, const std::vector<double>& z);

}  // namespace sympal
