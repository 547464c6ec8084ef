#include "sympal/williamson.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "sympal/errors.hpp"

namespace sympal {

namespace {

using detail::kClusterRelGap;

void require_symmetric_even(const Matrix& m, const Tolerances& tol, const char* who) {
  if (!m.square() || m.rows() == 0 || m.rows() % 2 != 0) {
    throw PreconditionError(std::string(who) + ": matrix must be square with even dimension");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
  if (worst > tol.sym_tol * norm_scale(m)) {
    throw PreconditionError(std::string(who) + ": matrix is not symmetric", worst);
  }
}

EigenDecomposition require_pd(const Matrix& m, const Tolerances& tol, const char* who) {
  require_symmetric_even(m, tol, who);
  EigenDecomposition eig = symmetric_eigen(m, tol);
  const double cut = tol.rank_tol * norm_scale(m);
  if (eig.values.front() <= cut) {
    throw PreconditionError(
        std::string(who) + ": matrix is not positive-definite (smallest eigenvalue " +
            std::to_string(eig.values.front()) + ")",
        eig.values.front());
  }
  return eig;
}

// Eigenvalues of -K^2 come in equal pairs; collapse them to the n values
// mu_j^2 and take roots. Pair mismatches indicate numerical degeneracy.
std::vector<double> paired_roots(const std::vector<double>& p, double scale,
                                 const Tolerances& tol, const char* who) {
  const std::size_t n = p.size() / 2;
  std::vector<double> mu(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = p[2 * i], b = p[2 * i + 1];
    if (std::abs(a - b) > tol.sym_tol * std::max(1.0, scale)) {
      throw PreconditionError(
          std::string(who) + ": eigenvalues of -K^2 fail to pair (numerical degeneracy: " +
              std::to_string(a) + " vs " + std::to_string(b) + ")",
          std::abs(a - b));
    }
    mu[i] = std::sqrt(std::max(0.0, 0.5 * (a + b)));
  }
  return mu;
}

// Orthogonal O with O^T K O = [[0, L], [-L, 0]]: per eigenvalue cluster of
// -K^2 pick unit x, set y = -Kx/mu, deflate, repeat.
Matrix pairing_frame(const Matrix& k, const EigenDecomposition& peig,
                     const char* who) {
  const std::size_t dim = k.rows();
  const std::size_t n = dim / 2;

  const auto clusters = detail::cluster_ascending(peig.values, kClusterRelGap);
  std::vector<std::vector<double>> xs, ys;
  xs.reserve(n);
  ys.reserve(n);

  for (const auto& [begin, end] : clusters) {
    const std::size_t size = end - begin;
    if (size % 2 != 0) {
      throw PreconditionError(std::string(who) +
                              ": odd eigenvalue cluster of -K^2 (numerical degeneracy)");
    }
    double mean = 0.0;
    for (std::size_t i = begin; i < end; ++i) mean += peig.values[i];
    const double mu = std::sqrt(std::max(0.0, mean / static_cast<double>(size)));

    std::vector<std::vector<double>> basis;
    for (std::size_t i = begin; i < end; ++i) basis.push_back(peig.q.column(i));

    while (!basis.empty()) {
      std::vector<double> x = basis.front();
      std::vector<double> y = k * x;
      for (double& e : y) e /= -mu;
      const double ny = norm2(y);
      if (!(ny > 0.5)) {
        throw PreconditionError(std::string(who) +
                                ": pairing construction degenerated (||Kx||/mu = " +
                                std::to_string(ny) + ")");
      }
      for (double& e : y) e /= ny;

      std::vector<std::vector<double>> rest(basis.begin() + 1, basis.end());
      for (auto& w : rest) {
        const double cx = dot(w, x), cy = dot(w, y);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cx * x[i] + cy * y[i];
      }
      rest = detail::orthonormalize(std::move(rest), 1e-6);
      if (rest.size() != basis.size() - 2) {
        throw PreconditionError(std::string(who) +
                                ": cluster deflation lost track of a pair "
                                "(numerical degeneracy)");
      }
      xs.push_back(std::move(x));
      ys.push_back(std::move(y));
      basis = std::move(rest);
    }
  }

  if (xs.size() != n) {
    throw PreconditionError(std::string(who) + ": pairing produced " +
                            std::to_string(xs.size()) + " planes, expected " +
                            std::to_string(n));
  }
  Matrix o(dim, dim);
  for (std::size_t j = 0; j < n; ++j) {
    o.set_column(j, xs[j]);
    o.set_column(n + j, ys[j]);
  }
  return o;
}

}  // namespace

std::vector<double> symplectic_spectrum(const Matrix& m, const Tolerances& tol) {
  require_pd(m, tol, "symplectic_spectrum");
  const std::size_t n = m.rows() / 2;
  const Matrix mh = matrix_power(m, 0.5, tol);
  const Matrix j = standard_symplectic_form(n);
  const Matrix k = mh * j * mh;
  Matrix p = -1.0 * (k * k);
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t jj = i + 1; jj < p.cols(); ++jj) {
      const double v = 0.5 * (p(i, jj) + p(jj, i));
      p(i, jj) = v;
      p(jj, i) = v;
    }
  const EigenDecomposition peig = symmetric_eigen(p, tol);
  return paired_roots(peig.values, max_abs(p), tol, "symplectic_spectrum");
}

WilliamsonDecomposition williamson_decompose(const Matrix& m, const Tolerances& tol) {
  require_pd(m, tol, "williamson_decompose");
  const std::size_t n = m.rows() / 2;
  const Matrix mh = matrix_power(m, 0.5, tol);
  const Matrix mhinv = matrix_power(m, -0.5, tol);
  const Matrix j = standard_symplectic_form(n);
  const Matrix k = mh * j * mh;
  Matrix p = -1.0 * (k * k);
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t jj = i + 1; jj < p.cols(); ++jj) {
      const double v = 0.5 * (p(i, jj) + p(jj, i));
      p(i, jj) = v;
      p(jj, i) = v;
    }
  const EigenDecomposition peig = symmetric_eigen(p, tol);
  const std::vector<double> mu =
      paired_roots(peig.values, max_abs(p), tol, "williamson_decompose");

  const Matrix o = pairing_frame(k, peig, "williamson_decompose");

  // S = M^{-1/2} O (L (+) L)^{1/2}
  Matrix s = mhinv * o;
  for (std::size_t jj = 0; jj < n; ++jj) {
    const double r = std::sqrt(mu[jj]);
    for (std::size_t i = 0; i < s.rows(); ++i) {
      s(i, jj) *= r;
      s(i, n + jj) *= r;
    }
  }
  return {std::move(s), mu};
}

bool is_orthosymplectically_diagonalizable(const Matrix& m, const Tolerances& tol) {
  require_symmetric_even(m, tol, "is_orthosymplectically_diagonalizable");
  const Matrix j = standard_symplectic_form(m.rows() / 2);
  return max_abs(j * m - m * j) <= tol.sym_tol * norm_scale(m);
}

WilliamsonDecomposition orthosymplectic_decompose(const Matrix& m, const Tolerances& tol) {
  if (!is_orthosymplectically_diagonalizable(m, tol)) {
    const Matrix j = standard_symplectic_form(m.rows() / 2);
    throw PreconditionError(
        "orthosymplectic_decompose: JM != MJ, matrix is not orthosymplectically "
        "diagonalizable",
        max_abs(j * m - m * j));
  }
  return detail::jcommuting_orthosymplectic(m, tol, /*require_pd=*/true);
}

std::vector<SpectralProjector> eigenspace_projectors(const Matrix& m, const Tolerances& tol) {
  const std::vector<double> spectrum = symplectic_spectrum(m, tol);
  const auto clusters = detail::cluster_ascending(spectrum, kClusterRelGap);
  const std::size_t k = clusters.size();

  std::vector<double> mus(k);
  for (std::size_t c = 0; c < k; ++c) {
    double mean = 0.0;
    for (std::size_t i = clusters[c].first; i < clusters[c].second; ++i)
      mean += spectrum[i];
    mus[c] = mean / static_cast<double>(clusters[c].second - clusters[c].first);
  }

  // Nodes i*mu_1..i*mu_k, -i*mu_1..-i*mu_k. The projector for cluster c is
  // (p_c + p_{k+c})(F); the two Lagrange polynomials are conjugates, so the
  // combined coefficients are real.
  using cplx = std::complex<double>;
  std::vector<cplx> nodes(2 * k);
  for (std::size_t c = 0; c < k; ++c) {
    nodes[c] = cplx(0.0, mus[c]);
    nodes[k + c] = cplx(0.0, -mus[c]);
  }

  const Matrix f = standard_symplectic_form(m.rows() / 2) * m;
  std::vector<SpectralProjector> out;
  out.reserve(k);

  for (std::size_t c = 0; c < k; ++c) {
    // Expand prod_{l != c} (z - z_l) / (z_c - z_l).
    std::vector<cplx> coeff{1.0};
    cplx denom = 1.0;
    for (std::size_t l = 0; l < 2 * k; ++l) {
      if (l == c) continue;
      std::vector<cplx> next(coeff.size() + 1, cplx(0.0));
      for (std::size_t d = 0; d < coeff.size(); ++d) {
        next[d + 1] += coeff[d];
        next[d] -= nodes[l] * coeff[d];
      }
      coeff = std::move(next);
      denom *= nodes[c] - nodes[l];
    }
    std::vector<double> real_coeff(coeff.size());
    for (std::size_t d = 0; d < coeff.size(); ++d)
      real_coeff[d] = 2.0 * (coeff[d] / denom).real();

    // Horner on F with the real-combined coefficients.
    Matrix p(m.rows(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) p(i, i) = real_coeff.back();
    for (std::size_t d = real_coeff.size() - 1; d-- > 0;) {
      p = p * f;
      for (std::size_t i = 0; i < m.rows(); ++i) p(i, i) += real_coeff[d];
    }
    out.push_back({mus[c], std::move(p)});
  }
  return out;
}

std::vector<double> hamiltonian_flow(const Matrix& m, const std::vector<double>& z0,
                                     double t, const Tolerances& tol) {
  if (z0.size() != m.rows()) {
    throw PreconditionError("hamiltonian_flow: z0 dimension does not match the matrix");
  }
  const WilliamsonDecomposition wd = williamson_decompose(m, tol);
  const std::size_t n = m.rows() / 2;
  const Matrix sinv = detail::symplectic_inverse(wd.s);

  std::vector<double> w = sinv * z0;
  for (std::size_t j = 0; j < n; ++j) {
    const double c = std::cos(wd.spectrum[j] * t);
    const double s = std::sin(wd.spectrum[j] * t);
    const double xj = w[j], pj = w[n + j];
    w[j] = c * xj + s * pj;
    w[n + j] = -s * xj + c * pj;
  }
  return wd.s * w;
}

namespace detail {

Matrix symplectic_inverse(const Matrix& s) {
  const Matrix j = standard_symplectic_form(s.rows() / 2);
  return transpose(j) * transpose(s) * j;
}

WilliamsonDecomposition jcommuting_orthosymplectic(const Matrix& m, const Tolerances& tol,
                                                   bool require_pd_flag) {
  const char* who = "orthosymplectic diagonalization";
  require_symmetric_even(m, tol, who);
  const std::size_t dim = m.rows();
  const std::size_t n = dim / 2;
  const Matrix j = standard_symplectic_form(n);

  EigenDecomposition eig = symmetric_eigen(m, tol);
  const double cut = tol.rank_tol * norm_scale(m);
  if (eig.values.front() < -cut) {
    throw PreconditionError(std::string(who) + ": matrix is not positive-semidefinite",
                            eig.values.front());
  }
  if (require_pd_flag && eig.values.front() <= cut) {
    throw PreconditionError(std::string(who) + ": matrix is not positive-definite",
                            eig.values.front());
  }

  // Eigenspaces of a J-commuting matrix are J-invariant; the pairing
  // (x, -Jx) is orthonormal and symplectically normalized at once.
  const auto clusters = cluster_ascending(eig.values, kClusterRelGap);
  std::vector<std::vector<double>> xs, ys;
  std::vector<double> spectrum;

  for (const auto& [begin, end] : clusters) {
    const std::size_t size = end - begin;
    if (size % 2 != 0) {
      throw PreconditionError(std::string(who) +
                              ": odd eigenvalue multiplicity; matrix does not commute "
                              "with J within tolerance");
    }
    double mean = 0.0;
    for (std::size_t i = begin; i < end; ++i) mean += eig.values[i];
    mean /= static_cast<double>(size);
    const double mu = (std::abs(mean) <= cut) ? 0.0 : mean;

    std::vector<std::vector<double>> basis;
    for (std::size_t i = begin; i < end; ++i) basis.push_back(eig.q.column(i));

    while (!basis.empty()) {
      std::vector<double> x = basis.front();
      std::vector<double> y = j * x;
      for (double& e : y) e = -e;

      std::vector<std::vector<double>> rest(basis.begin() + 1, basis.end());
      for (auto& w : rest) {
        const double cx = dot(w, x), cy = dot(w, y);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cx * x[i] + cy * y[i];
      }
      rest = orthonormalize(std::move(rest), 1e-6);
      if (rest.size() != basis.size() - 2) {
        throw PreconditionError(std::string(who) +
                                ": eigenspace is not J-invariant within tolerance");
      }
      xs.push_back(std::move(x));
      ys.push_back(std::move(y));
      spectrum.push_back(mu);
      basis = std::move(rest);
    }
  }

  Matrix o(dim, dim);
  for (std::size_t c = 0; c < n; ++c) {
    o.set_column(c, xs[c]);
    o.set_column(n + c, ys[c]);
  }
  return {std::move(o), std::move(spectrum)};
}

}  // namespace detail

}  // namespace sympal
