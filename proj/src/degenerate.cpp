#include "sympal/degenerate.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "sympal/errors.hpp"
#include "sympal/williamson.hpp"

namespace sympal {

namespace {

struct PlanePair {
  std::vector<double> x;
  std::vector<double> y;
};

EigenDecomposition require_psd(const Matrix& m, const Tolerances& tol, const char* who) {
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
  EigenDecomposition eig = symmetric_eigen(m, tol);
  const double cut = tol.rank_tol * norm_scale(m);
  if (eig.values.front() < -cut) {
    throw PreconditionError(
        std::string(who) + ": matrix is not positive-semidefinite (eigenvalue " +
            std::to_string(eig.values.front()) + ")",
        -eig.values.front());
  }
  return eig;
}

std::vector<double> omega_deflate_all(std::vector<double> w,
                                      const std::vector<PlanePair>& pairs) {
  for (const auto& p : pairs) w = detail::omega_deflate(w, p.x, p.y);
  return w;
}

// Basis of the omega-complement of the given symplectic pairs, obtained by
// deflating the identity columns.
std::vector<std::vector<double>> complement_basis(std::size_t dim,
                                                  const std::vector<PlanePair>& pairs,
                                                  const char* who) {
  std::vector<std::vector<double>> cand;
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> e(dim, 0.0);
    e[i] = 1.0;
    cand.push_back(omega_deflate_all(std::move(e), pairs));
  }
  auto basis = detail::orthonormalize(std::move(cand), 1e-8);
  if (basis.size() != dim - 2 * pairs.size()) {
    throw PreconditionError(std::string(who) +
                            ": residual subspace has unexpected dimension " +
                            std::to_string(basis.size()));
  }
  return basis;
}

}  // namespace

bool kernel_is_symplectic(const Matrix& m, const Tolerances& tol) {
  require_psd(m, tol, "kernel_is_symplectic");
  const Matrix n = nullspace(m, tol);
  if (n.cols() == 0) return true;
  if (n.cols() % 2 != 0) return false;
  Matrix gram(n.cols(), n.cols());
  for (std::size_t i = 0; i < n.cols(); ++i)
    for (std::size_t j = 0; j < n.cols(); ++j)
      gram(i, j) = omega(n.column(i), n.column(j));
  return std::abs(detail::determinant(gram)) > tol.rank_tol;
}

DegenerateDecomposition degenerate_williamson(const Matrix& m, const Tolerances& tol) {
  const char* who = "degenerate_williamson";
  require_psd(m, tol, who);
  const std::size_t dim = m.rows();
  const std::size_t n = dim / 2;

  const Matrix kernel = nullspace(m, tol);
  if (kernel.cols() == 0) {
    WilliamsonDecomposition wd = williamson_decompose(m, tol);
    return {std::move(wd.s), std::move(wd.spectrum), n};
  }
  if (kernel.cols() % 2 != 0) {
    throw PreconditionError(std::string(who) + ": kernel has odd dimension " +
                            std::to_string(kernel.cols()) + ", not a symplectic subspace");
  }
  {
    Matrix gram(kernel.cols(), kernel.cols());
    for (std::size_t i = 0; i < kernel.cols(); ++i)
      for (std::size_t j = 0; j < kernel.cols(); ++j)
        gram(i, j) = omega(kernel.column(i), kernel.column(j));
    const double det = std::abs(detail::determinant(gram));
    if (det <= tol.rank_tol) {
      throw PreconditionError(std::string(who) + ": kernel (dimension " +
                                  std::to_string(kernel.cols()) +
                                  ") is not a symplectic subspace; |det| of its "
                                  "omega-Gram is " + std::to_string(det),
                              det);
    }
  }

  // Symplectic basis {q_i} of N = Ker(M).
  const Matrix q = symplectic_gram_schmidt(kernel, tol);
  const std::size_t nk = q.cols() / 2;  // n - k
  std::vector<PlanePair> kernel_pairs(nk);
  for (std::size_t i = 0; i < nk; ++i)
    kernel_pairs[i] = {q.column(i), q.column(nk + i)};

  const std::size_t k = n - nk;
  DegenerateDecomposition out;
  out.k = k;
  out.spectrum.assign(n, 0.0);

  std::vector<std::vector<double>> xcols, pcols;
  if (k > 0) {
    // Complement basis: range eigenvectors of M, omega-projected against the
    // kernel pairs so that the assembled S stays symplectic, then brought to
    // a symplectic basis of N^omega.
    EigenDecomposition eig = symmetric_eigen(m, tol);
    const double cut = tol.rank_tol * norm_scale(m);
    std::vector<std::vector<double>> range;
    for (std::size_t i = 0; i < eig.values.size(); ++i) {
      if (std::abs(eig.values[i]) > cut)
        range.push_back(omega_deflate_all(eig.q.column(i), kernel_pairs));
    }
    if (range.size() != 2 * k) {
      throw PreconditionError(std::string(who) + ": rank " + std::to_string(range.size()) +
                              " is odd or inconsistent with the kernel dimension");
    }
    const Matrix comp = symplectic_gram_schmidt(from_columns(dim, range), tol);

    // Restricted PD form in the symplectic coordinates of the complement.
    const Matrix mres = transpose(comp) * m * comp;
    WilliamsonDecomposition wd = williamson_decompose(mres, tol);
    const Matrix scols = comp * wd.s;
    for (std::size_t jj = 0; jj < k; ++jj) {
      out.spectrum[jj] = wd.spectrum[jj];
      xcols.push_back(scols.column(jj));
      pcols.push_back(scols.column(k + jj));
    }
  }
  for (std::size_t i = 0; i < nk; ++i) {
    xcols.push_back(kernel_pairs[i].x);
    pcols.push_back(kernel_pairs[i].y);
  }

  std::vector<std::vector<double>> cols = std::move(xcols);
  cols.insert(cols.end(), pcols.begin(), pcols.end());
  out.s = from_columns(dim, cols);
  return out;
}

HormanderPSDForm hormander_psd_normal_form(const Matrix& m, const Tolerances& tol) {
  const char* who = "hormander_psd_normal_form";
  require_psd(m, tol, who);
  const std::size_t dim = m.rows();
  const std::size_t n = dim / 2;
  const Matrix j = standard_symplectic_form(n);
  const double scale_cut = tol.rank_tol * norm_scale(m);

  HormanderPSDForm out;
  std::vector<PlanePair> elliptic, parabolic, kernel;

  // Elliptic planes via -K^2, K = M^{1/2} J M^{1/2}: a unit eigenvector u for
  // mu^2 and w = -Ku/mu map to the Lemma-3 plane x = J M^{1/2} u,
  // y = J M^{1/2} w with omega(x, y) = mu > 0.
  const Matrix mh = matrix_power(m, 0.5, tol);
  const Matrix kk = mh * j * mh;
  Matrix p = -1.0 * (kk * kk);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t jj = i + 1; jj < dim; ++jj) {
      const double v = 0.5 * (p(i, jj) + p(jj, i));
      p(i, jj) = v;
      p(jj, i) = v;
    }
  const EigenDecomposition peig = symmetric_eigen(p, tol);
  const double pcut = tol.rank_tol * norm_scale(p);

  std::size_t first_nonzero = 0;
  while (first_nonzero < dim && peig.values[first_nonzero] <= pcut) ++first_nonzero;
  std::vector<double> positive(peig.values.begin() + first_nonzero, peig.values.end());
  const auto clusters = detail::cluster_ascending(positive, detail::kClusterRelGap);

  for (const auto& [cb, ce] : clusters) {
    const std::size_t begin = first_nonzero + cb;
    const std::size_t end = first_nonzero + ce;
    if ((end - begin) % 2 != 0) {
      throw PreconditionError(std::string(who) +
                              ": odd elliptic eigenvalue cluster (numerical degeneracy)");
    }
    double mean = 0.0;
    for (std::size_t i = begin; i < end; ++i) mean += peig.values[i];
    const double mu = std::sqrt(mean / static_cast<double>(end - begin));

    std::vector<std::vector<double>> basis;
    for (std::size_t i = begin; i < end; ++i) basis.push_back(peig.q.column(i));

    while (!basis.empty()) {
      std::vector<double> u = basis.front();
      std::vector<double> w = kk * u;
      for (double& e : w) e /= -mu;
      const double nw = norm2(w);
      if (!(nw > 0.5)) {
        throw PreconditionError(std::string(who) + ": elliptic pairing degenerated");
      }
      for (double& e : w) e /= nw;

      std::vector<double> x = j * (mh * u);
      std::vector<double> y = j * (mh * w);
      const double g = omega(x, y);
      if (g <= scale_cut) {
        throw PreconditionError(std::string(who) +
                                    ": elliptic plane is omega-degenerate (omega = " +
                                    std::to_string(g) + ")",
                                g);
      }
      const double c = std::sqrt(g);
      for (double& e : x) e /= c;
      for (double& e : y) e /= c;

      std::vector<std::vector<double>> rest(basis.begin() + 1, basis.end());
      for (auto& r : rest) {
        const double cu = dot(r, u), cw = dot(r, w);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= cu * u[i] + cw * w[i];
      }
      rest = detail::orthonormalize(std::move(rest), 1e-6);
      if (rest.size() != basis.size() - 2) {
        throw PreconditionError(std::string(who) +
                                ": elliptic cluster deflation lost a pair");
      }
      elliptic.push_back({std::move(x), std::move(y)});
      out.mu.push_back(mu);
      basis = std::move(rest);
    }
  }
  out.k = elliptic.size();

  // Residual problem on the omega-complement of the elliptic planes, in the
  // symplectic coordinates produced by the Gram-Schmidt pass. There F = JM
  // is nilpotent: parabolic (Case 1) planes {y, Fy} with F^2 y = 0 and
  // y^T M y > 0 first, kernel (Case 2) planes last.
  if (2 * out.k < dim) {
    auto rbasis = complement_basis(dim, elliptic, who);
    Matrix csub = (out.k == 0 && rbasis.size() == dim)
                      ? Matrix::identity(dim)
                      : symplectic_gram_schmidt(from_columns(dim, rbasis), tol);

    while (csub.cols() > 0) {
      const std::size_t r2 = csub.cols();
      const std::size_t r = r2 / 2;
      const Matrix jr = standard_symplectic_form(r);
      const Matrix msub = transpose(csub) * m * csub;

      if (max_abs(msub) <= scale_cut) {
        // Pure kernel: csub's columns are already a symplectic basis.
        for (std::size_t i = 0; i < r; ++i)
          kernel.push_back({csub.column(i), csub.column(r + i)});
        break;
      }

      // Ker(F^2) = Ker(M J M), located through the PSD matrix (MJM)^T (MJM).
      const Matrix b = msub * jr * msub;
      Matrix g = transpose(b) * b;
      for (std::size_t i = 0; i < r2; ++i)
        for (std::size_t jj = i + 1; jj < r2; ++jj) {
          const double v = 0.5 * (g(i, jj) + g(jj, i));
          g(i, jj) = v;
          g(jj, i) = v;
        }
      const Matrix z = nullspace(g, tol);
      if (z.cols() == 0) {
        throw PreconditionError(std::string(who) +
                                    ": residual subspace of dimension " +
                                    std::to_string(r2) +
                                    " admits no case; input is not PSD within tolerance",
                                static_cast<double>(r2));
      }

      // Best Case-1 vector: maximize y^T M y over Ker(F^2).
      const Matrix mz = transpose(z) * msub * z;
      const EigenDecomposition zeig = symmetric_eigen(mz, tol);
      const double lam = zeig.values.back();
      if (lam <= scale_cut) {
        throw PreconditionError(std::string(who) +
                                    ": residual subspace of dimension " +
                                    std::to_string(r2) +
                                    " admits no case; input is not PSD within tolerance",
                                lam);
      }
      std::vector<double> y = z * zeig.q.column(z.cols() - 1);
      std::vector<double> fy = jr * (msub * y);
      const double inv = 1.0 / std::sqrt(lam);
      std::vector<double> a = y, bvec = fy;
      for (double& e : a) e *= inv;
      for (double& e : bvec) e *= -inv;

      parabolic.push_back({csub * a, csub * bvec});

      // Shrink the subproblem to the omega-complement of {a, b}.
      std::vector<std::vector<double>> next;
      for (std::size_t i = 0; i < r2; ++i) {
        std::vector<double> e(r2, 0.0);
        e[i] = 1.0;
        next.push_back(detail::omega_deflate(e, a, bvec));
      }
      next = detail::orthonormalize(std::move(next), 1e-8);
      if (next.size() != r2 - 2) {
        throw PreconditionError(std::string(who) + ": parabolic deflation lost a plane");
      }
      const Matrix csub_next = symplectic_gram_schmidt(from_columns(r2, next), tol);
      csub = csub * csub_next;
    }
  }
  out.l = parabolic.size();

  std::vector<std::vector<double>> xcols, pcols;
  for (const auto& pp : elliptic) {
    xcols.push_back(pp.x);
    pcols.push_back(pp.y);
  }
  for (const auto& pp : parabolic) {
    xcols.push_back(pp.x);
    pcols.push_back(pp.y);
  }
  for (const auto& pp : kernel) {
    xcols.push_back(pp.x);
    pcols.push_back(pp.y);
  }
  std::vector<std::vector<double>> cols = std::move(xcols);
  cols.insert(cols.end(), pcols.begin(), pcols.end());
  out.s = from_columns(dim, cols);
  return out;
}

}  // namespace sympal
