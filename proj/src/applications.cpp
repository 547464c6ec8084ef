#include "sympal/applications.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sympal/degenerate.hpp"
#include "sympal/errors.hpp"
#include "sympal/simultaneous.hpp"
#include "sympal/williamson.hpp"

namespace sympal {

namespace {

void require_pd_form(const Matrix& m, const Tolerances& tol, const char* who) {
  const EigenDecomposition eig = symmetric_eigen(m, tol);
  if (eig.values.front() <= tol.rank_tol * norm_scale(m)) {
    throw PreconditionError(std::string(who) + ": Hamiltonian is not positive-definite",
                            eig.values.front());
  }
}

// Places a per-particle Hamiltonian on particle `slot` of an N-particle
// phase space, in (x_1..x_Nd, p_1..p_Nd) coordinates.
Matrix block_embed(const Matrix& h, std::size_t slot, std::size_t n_particles,
                   std::size_t d) {
  const std::size_t nd = n_particles * d;
  Matrix out(2 * nd, 2 * nd);
  const auto full = [&](std::size_t local) {
    return local < d ? slot * d + local : nd + slot * d + (local - d);
  };
  for (std::size_t i = 0; i < 2 * d; ++i)
    for (std::size_t j = 0; j < 2 * d; ++j) out(full(i), full(j)) = h(i, j);
  return out;
}

}  // namespace

QuadraticHamiltonian::QuadraticHamiltonian(Matrix m_in, std::size_t particles_in,
                                           std::size_t dims_per_particle_in)
    : m(std::move(m_in)), particles(particles_in), dims_per_particle(dims_per_particle_in) {
  if (particles == 0 || dims_per_particle == 0) {
    throw PreconditionError("QuadraticHamiltonian: particle and dimension counts must be positive");
  }
  if (!m.square() || m.rows() != 2 * particles * dims_per_particle) {
    throw PreconditionError("QuadraticHamiltonian: matrix dimension must equal 2*N*d");
  }
}

ThermoParams::ThermoParams(double beta_in, double hbar_in) : beta(beta_in), hbar(hbar_in) {
  if (!(beta > 0.0) || !(hbar > 0.0)) {
    throw PreconditionError("ThermoParams: beta and hbar must be strictly positive");
  }
}

PhaseSpaceRegion PhaseSpaceRegion::ellipsoid(Matrix m) {
  PhaseSpaceRegion r;
  r.kind = Kind::Ellipsoid;
  r.m = std::move(m);
  return r;
}

PhaseSpaceRegion PhaseSpaceRegion::cylinder(std::size_t axis, double radius) {
  if (axis == 0) throw PreconditionError("cylinder: axis index is 1-based");
  if (!(radius > 0.0)) throw PreconditionError("cylinder: radius must be positive");
  PhaseSpaceRegion r;
  r.kind = Kind::Cylinder;
  r.axis = axis;
  r.radius = radius;
  return r;
}

PhaseSpaceRegion PhaseSpaceRegion::ball(double radius) {
  if (!(radius > 0.0)) throw PreconditionError("ball: radius must be positive");
  PhaseSpaceRegion r;
  r.kind = Kind::Ball;
  r.radius = radius;
  return r;
}

double partition_noninteracting(const std::vector<QuadraticHamiltonian>& hs,
                                const ThermoParams& params, const Tolerances& tol) {
  const char* who = "partition_noninteracting";
  if (hs.empty()) throw PreconditionError(std::string(who) + ": no Hamiltonians given");
  const std::size_t d = hs.front().dims_per_particle;
  for (const auto& h : hs) {
    if (h.particles != 1 || h.dims_per_particle != d) {
      throw PreconditionError(std::string(who) +
                              ": each Hamiltonian must act on its own 2d block "
                              "with a shared d");
    }
  }
  const std::size_t n_particles = hs.size();

  // Block-embedded copies commute pairwise; checked all the same.
  std::vector<Matrix> embedded;
  embedded.reserve(n_particles);
  for (std::size_t i = 0; i < n_particles; ++i)
    embedded.push_back(block_embed(hs[i].m, i, n_particles, d));
  for (std::size_t i = 0; i < n_particles; ++i) {
    for (std::size_t j = i + 1; j < n_particles; ++j) {
      if (!poisson_commutes(embedded[i], embedded[j], tol)) {
        throw PreconditionError(
            std::string(who) + ": Hamiltonians " + std::to_string(i) + " and " +
                std::to_string(j) + " do not Poisson-commute",
            poisson_commutator_residual(embedded[i], embedded[j]));
      }
    }
  }

  double z = std::pow(2.0 * params.hbar * params.beta,
                      -static_cast<double>(n_particles * d));
  for (const auto& h : hs) {
    const EigenDecomposition eig = symmetric_eigen(h.m, tol);
    if (eig.values.front() <= tol.rank_tol * norm_scale(h.m)) {
      throw PreconditionError(std::string(who) + ": Hamiltonian is not positive-definite",
                              eig.values.front());
    }
    double det = 1.0;
    for (double v : eig.values) det *= v;
    z /= std::sqrt(det);
  }
  return z;
}

double partition_interacting(const std::vector<QuadraticHamiltonian>& hs,
                             const ThermoParams& params, const Tolerances& tol) {
  const char* who = "partition_interacting";
  if (hs.empty()) throw PreconditionError(std::string(who) + ": no Hamiltonians given");
  const std::size_t nd = hs.front().particles * hs.front().dims_per_particle;
  for (const auto& h : hs) {
    if (h.particles * h.dims_per_particle != nd || h.m.rows() != 2 * nd) {
      throw PreconditionError(std::string(who) +
                              ": all Hamiltonians must act on the same 2Nd phase space");
    }
    require_pd_form(h.m, tol, who);
  }

  std::vector<Matrix> forms;
  forms.reserve(hs.size());
  for (const auto& h : hs) forms.push_back(h.m);
  const SimDiagResult sim = family_diagonalize(forms, tol);

  double z = std::pow(2.0 * params.hbar * params.beta, -static_cast<double>(nd));
  for (std::size_t j = 0; j < nd; ++j) {
    double sum = 0.0;
    for (const auto& sp : sim.spectra) sum += sp[j];
    if (sum <= tol.rank_tol) {
      throw PreconditionError(std::string(who) + ": zero mode at coordinate " +
                                  std::to_string(j) + "; the integral diverges",
                              sum);
    }
    z /= sum;
  }
  return z;
}

ConstraintReport hormander_constraints(const Matrix& m, const Matrix& mt,
                                       const Tolerances& tol) {
  const char* who = "hormander_constraints";
  if (!poisson_commutes(m, mt, tol)) {
    throw PreconditionError(
        std::string(who) + ": [JM, JMtilde] != 0 (residual " +
            std::to_string(poisson_commutator_residual(m, mt)) + ")",
        poisson_commutator_residual(m, mt));
  }
  require_pd_form(mt, tol, who);
  if (!kernel_is_symplectic(m, tol)) {
    throw PreconditionError(std::string(who) + ": kernel of M is not a symplectic subspace");
  }

  const SimDiagResult sim = simultaneous_williamson_psd(m, mt, tol);
  const std::size_t n = m.rows() / 2;
  const std::vector<double>& lam = sim.spectra[0];
  const std::vector<double>& lamt = sim.spectra[1];

  std::size_t k = 0;
  while (k < n && lam[k] > 0.0) ++k;
  for (std::size_t i = 0; i < k; ++i) {
    const double rel = std::abs(lam[i] - lamt[i]) / std::max(1e-300, std::abs(lamt[i]));
    if (rel > 1e-6) {
      throw PreconditionError(std::string(who) + ": shared mode " + std::to_string(i) +
                                  " has mismatched symplectic eigenvalues (" +
                                  std::to_string(lam[i]) + " vs " + std::to_string(lamt[i]) +
                                  ")",
                              rel);
    }
  }

  ConstraintReport out;
  out.s = sim.s;
  out.k = k;
  for (std::size_t i = k; i < n; ++i) out.chi_indices.push_back(i);
  for (std::size_t i = k; i < n; ++i) out.chi_indices.push_back(n + i);
  for (std::size_t i = k; i < n; ++i) out.c.push_back(lamt[i]);
  for (std::size_t i = k; i < n; ++i) out.c.push_back(lamt[i]);
  return out;
}

double capacity(const PhaseSpaceRegion& region, const Tolerances& tol) {
  switch (region.kind) {
    case PhaseSpaceRegion::Kind::Ball:
    case PhaseSpaceRegion::Kind::Cylinder:
      return std::numbers::pi * region.radius * region.radius;
    case PhaseSpaceRegion::Kind::Ellipsoid: {
      const std::vector<double> spectrum = symplectic_spectrum(region.m, tol);
      return std::numbers::pi / spectrum.back();
    }
  }
  throw PreconditionError("capacity: unknown region kind");
}

bool nonsqueezing_embeddable(double ball_r, double cyl_r) {
  if (!(ball_r > 0.0) || !(cyl_r > 0.0)) {
    throw PreconditionError("nonsqueezing_embeddable: radii must be positive");
  }
  const double cb = std::numbers::pi * ball_r * ball_r;
  const double cz = std::numbers::pi * cyl_r * cyl_r;
  return cb <= cz;
}

double gromov_gap(const ConstraintReport& report, const std::vector<double>& z) {
  if (z.size() != report.s.rows()) {
    throw PreconditionError("gromov_gap: z dimension does not match the report");
  }
  double g = 0.0;
  for (std::size_t l = 0; l < report.chi_indices.size(); ++l) {
    const double chi = z[report.chi_indices[l]];
    g += chi * report.c[l] * chi;
  }
  return g - 2.0;
}

}  // namespace sympal
