#include "sympal/simultaneous.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "sympal/errors.hpp"
#include "sympal/williamson.hpp"

namespace sympal {

namespace {

using detail::kClusterRelGap;

void require_symmetric_even_pair(const Matrix& a, const Matrix& b, const char* who) {
  if (!a.square() || !b.square() || a.rows() != b.rows() || a.rows() == 0 ||
      a.rows() % 2 != 0) {
    throw PreconditionError(std::string(who) +
                            ": matrices must be square with equal even dimensions");
  }
}

void require_commuting(const Matrix& a, const Matrix& b, const Tolerances& tol,
                       const char* who) {
  if (!poisson_commutes(a, b, tol)) {
    throw PreconditionError(
        std::string(who) + ": forms do not Poisson-commute ([JA, JB] residual " +
            std::to_string(poisson_commutator_residual(a, b)) + ")",
        poisson_commutator_residual(a, b));
  }
}

// Coordinate slots of a pair cluster: x indices then p indices.
std::vector<std::size_t> cluster_slots(std::size_t n, std::size_t begin, std::size_t end) {
  std::vector<std::size_t> idx;
  for (std::size_t i = begin; i < end; ++i) idx.push_back(i);
  for (std::size_t i = begin; i < end; ++i) idx.push_back(n + i);
  return idx;
}

void embed_block(Matrix& o, const Matrix& blk, std::size_t n, std::size_t begin,
                 std::size_t end) {
  const std::size_t c = end - begin;
  const auto slot = [&](std::size_t s) { return s < c ? begin + s : n + begin + (s - c); };
  for (std::size_t i = 0; i < 2 * c; ++i)
    for (std::size_t j = 0; j < 2 * c; ++j) o(slot(i), slot(j)) = blk(i, j);
}

// Refine one anchor cluster with the restriction of a second form. The block
// inherits J-commutation from the Poisson bracket, so it diagonalizes
// orthosymplectically, leaving the anchor's (scalar) block untouched.
Matrix refine_clusters(const std::vector<double>& anchor, const Matrix& transformed,
                       std::vector<double>& gamma, const Tolerances& tol, bool psd,
                       const char* who) {
  const std::size_t n = anchor.size();
  const auto clusters = detail::cluster_ascending(anchor, kClusterRelGap);
  Matrix o = Matrix::identity(2 * n);
  gamma.assign(n, 0.0);

  for (const auto& [begin, end] : clusters) {
    const auto idx = cluster_slots(n, begin, end);
    const Matrix blk = transformed.submatrix(idx, idx);
    WilliamsonDecomposition wd;
    try {
      wd = detail::jcommuting_orthosymplectic(blk, tol, /*require_pd=*/!psd);
    } catch (const PreconditionError& e) {
      throw PreconditionError(std::string(who) +
                              ": cluster refinement failed (numerical degeneracy): " +
                              e.what());
    }
    embed_block(o, wd.s, n, begin, end);
    for (std::size_t i = begin; i < end; ++i) gamma[i] = wd.spectrum[i - begin];
  }
  return o;
}

struct SpectraOrder {
  std::vector<std::size_t> perm;  // pair permutation
};

// Canonical pair order: positive leading spectrum first, lexicographically
// ascending across the forms; all-zero (joint radical) pairs last.
SpectraOrder canonical_order(const std::vector<std::vector<double>>& spectra) {
  const std::size_t n = spectra.empty() ? 0 : spectra.front().size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  auto group = [&](std::size_t j) {
    for (std::size_t f = 0; f < spectra.size(); ++f)
      if (spectra[f][j] > 0.0) return f;  // first form with a positive entry
    return spectra.size();                // joint zero
  };
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t i, std::size_t j) {
    const std::size_t gi = group(i), gj = group(j);
    if (gi != gj) return gi < gj;
    for (std::size_t f = 0; f < spectra.size(); ++f) {
      if (spectra[f][i] != spectra[f][j]) return spectra[f][i] < spectra[f][j];
    }
    return false;
  });
  return {std::move(perm)};
}

void apply_pair_permutation(Matrix& s, std::vector<std::vector<double>>& spectra,
                            const std::vector<std::size_t>& perm) {
  const std::size_t n = perm.size();
  Matrix out(s.rows(), s.cols());
  for (std::size_t j = 0; j < n; ++j) {
    out.set_column(j, s.column(perm[j]));
    out.set_column(n + j, s.column(n + perm[j]));
  }
  s = std::move(out);
  for (auto& sp : spectra) {
    std::vector<double> reordered(n);
    for (std::size_t j = 0; j < n; ++j) reordered[j] = sp[perm[j]];
    sp = std::move(reordered);
  }
}

// Residual gate: every result must reproduce its forms' normal blocks.
void verify_result(const Matrix& s, const std::vector<Matrix>& forms,
                   const std::vector<std::vector<double>>& spectra, const char* who) {
  const std::size_t n = s.rows() / 2;
  for (std::size_t f = 0; f < forms.size(); ++f) {
    Matrix target(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      target(i, i) = spectra[f][i];
      target(n + i, n + i) = spectra[f][i];
    }
    const double resid = max_abs(transpose(s) * forms[f] * s - target);
    if (resid > 1e-7 * norm_scale(forms[f])) {
      throw PreconditionError(std::string(who) + ": refinement failed to diagonalize form " +
                                  std::to_string(f) + " (residual " + std::to_string(resid) +
                                  "); numerical degeneracy",
                              resid);
    }
  }
}

EigenDecomposition check_psd(const Matrix& m, const Tolerances& tol, const char* who) {
  EigenDecomposition eig = symmetric_eigen(m, tol);
  const double cut = tol.rank_tol * norm_scale(m);
  if (eig.values.front() < -cut) {
    throw PreconditionError(std::string(who) + ": matrix is not positive-semidefinite",
                            -eig.values.front());
  }
  return eig;
}

}  // namespace

bool poisson_commutes(const Matrix& a, const Matrix& b, const Tolerances& tol) {
  require_symmetric_even_pair(a, b, "poisson_commutes");
  return poisson_commutator_residual(a, b) <= tol.sym_tol;
}

double poisson_commutator_residual(const Matrix& a, const Matrix& b) {
  require_symmetric_even_pair(a, b, "poisson_commutator_residual");
  const Matrix j = standard_symplectic_form(a.rows() / 2);
  const Matrix ja = j * a;
  const Matrix jb = j * b;
  return max_abs(ja * jb - jb * ja) / (norm_scale(a) * norm_scale(b));
}

SimDiagResult simultaneous_williamson(const Matrix& a, const Matrix& b,
                                      const Tolerances& tol) {
  const char* who = "simultaneous_williamson";
  require_symmetric_even_pair(a, b, who);
  require_commuting(a, b, tol, who);

  WilliamsonDecomposition wa = williamson_decompose(a, tol);
  const Matrix bp = transpose(wa.s) * b * wa.s;

  std::vector<double> gamma;
  const Matrix o = refine_clusters(wa.spectrum, bp, gamma, tol, /*psd=*/false, who);

  SimDiagResult out;
  out.s = wa.s * o;
  out.spectra = {wa.spectrum, std::move(gamma)};
  apply_pair_permutation(out.s, out.spectra, canonical_order(out.spectra).perm);
  verify_result(out.s, {a, b}, out.spectra, who);
  return out;
}

SimDiagResult simultaneous_williamson_psd(const Matrix& a, const Matrix& b,
                                          const Tolerances& tol) {
  const char* who = "simultaneous_williamson_psd";
  require_symmetric_even_pair(a, b, who);
  check_psd(a, tol, who);
  check_psd(b, tol, who);
  require_commuting(a, b, tol, who);

  const std::size_t dim = a.rows();
  const std::size_t n = dim / 2;

  // Joint radical Ker(A) cap Ker(B): null directions of the concatenated
  // nullspace bases.
  const Matrix na = nullspace(a, tol);
  const Matrix nb = nullspace(b, tol);
  std::vector<std::vector<double>> radical;
  if (na.cols() > 0 && nb.cols() > 0) {
    const std::size_t da = na.cols(), db = nb.cols();
    Matrix cc(dim, da + db);
    for (std::size_t j = 0; j < da; ++j) cc.set_column(j, na.column(j));
    for (std::size_t j = 0; j < db; ++j) cc.set_column(da + j, nb.column(j));
    const Matrix gram = transpose(cc) * cc;
    const EigenDecomposition geig = symmetric_eigen(gram, tol);
    const double cut = tol.rank_tol * norm_scale(gram);
    for (std::size_t i = 0; i < geig.values.size(); ++i) {
      if (std::abs(geig.values[i]) > cut) continue;
      std::vector<double> alpha(geig.q.column(i).begin(), geig.q.column(i).begin() + da);
      radical.push_back(na * alpha);
    }
    radical = detail::orthonormalize(std::move(radical), 1e-8);
  }

  std::vector<std::pair<std::vector<double>, std::vector<double>>> kernel_pairs;
  if (!radical.empty()) {
    if (radical.size() % 2 != 0) {
      throw PreconditionError(std::string(who) + ": joint radical has odd dimension " +
                              std::to_string(radical.size()) +
                              ", not a symplectic subspace");
    }
    Matrix gram(radical.size(), radical.size());
    for (std::size_t i = 0; i < radical.size(); ++i)
      for (std::size_t j = 0; j < radical.size(); ++j)
        gram(i, j) = omega(radical[i], radical[j]);
    const double det = std::abs(detail::determinant(gram));
    if (det <= tol.rank_tol) {
      throw PreconditionError(std::string(who) +
                                  ": joint radical is not a symplectic subspace "
                                  "(omega-Gram |det| " + std::to_string(det) + ")",
                              det);
    }
    const Matrix q = symplectic_gram_schmidt(from_columns(dim, radical), tol);
    const std::size_t half = q.cols() / 2;
    for (std::size_t i = 0; i < half; ++i)
      kernel_pairs.emplace_back(q.column(i), q.column(half + i));
  }

  const std::size_t r = n - kernel_pairs.size();  // complement pairs

  Matrix su(dim, 0);
  std::vector<double> alpha, beta;
  if (r > 0) {
    // Symplectic basis of the omega-complement of the joint radical.
    Matrix comp;
    if (kernel_pairs.empty()) {
      comp = Matrix::identity(dim);
    } else {
      std::vector<std::vector<double>> cand;
      for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> e(dim, 0.0);
        e[i] = 1.0;
        for (const auto& [u, v] : kernel_pairs) e = detail::omega_deflate(e, u, v);
        cand.push_back(std::move(e));
      }
      cand = detail::orthonormalize(std::move(cand), 1e-8);
      if (cand.size() != 2 * r) {
        throw PreconditionError(std::string(who) + ": radical complement has dimension " +
                                std::to_string(cand.size()) + ", expected " +
                                std::to_string(2 * r));
      }
      comp = symplectic_gram_schmidt(from_columns(dim, cand), tol);
    }

    const Matrix au = transpose(comp) * a * comp;
    const Matrix bu = transpose(comp) * b * comp;
    const Matrix cu = au + bu;

    // A + B is PD off the joint radical and Poisson-commutes with both, so it
    // anchors the refinement; within its clusters B restricts to mu*I - A.
    WilliamsonDecomposition wc;
    try {
      wc = williamson_decompose(cu, tol);
    } catch (const PreconditionError& e) {
      throw PreconditionError(std::string(who) +
                              ": joint radical extraction left a singular sum form: " +
                              e.what());
    }
    const Matrix ap = transpose(wc.s) * au * wc.s;
    std::vector<double> alpha_u;
    const Matrix o = refine_clusters(wc.spectrum, ap, alpha_u, tol, /*psd=*/true, who);

    su = comp * (wc.s * o);
    alpha = std::move(alpha_u);
    // Read b's spectrum off the final frame.
    const Matrix bread = transpose(su) * b * su;
    beta.resize(r);
    const double bcut = tol.rank_tol * norm_scale(b);
    for (std::size_t i = 0; i < r; ++i) {
      const double v = 0.5 * (bread(i, i) + bread(r + i, r + i));
      beta[i] = (std::abs(v) <= bcut) ? 0.0 : v;
    }
    const double acut = tol.rank_tol * norm_scale(a);
    for (double& v : alpha)
      if (std::abs(v) <= acut) v = 0.0;
  }

  SimDiagResult out;
  std::vector<std::vector<double>> xcols, pcols;
  for (std::size_t i = 0; i < r; ++i) {
    xcols.push_back(su.column(i));
    pcols.push_back(su.column(r + i));
  }
  for (const auto& [u, v] : kernel_pairs) {
    xcols.push_back(u);
    pcols.push_back(v);
  }
  std::vector<std::vector<double>> cols = std::move(xcols);
  cols.insert(cols.end(), pcols.begin(), pcols.end());
  out.s = from_columns(dim, cols);

  std::vector<double> sa(n, 0.0), sb(n, 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    sa[i] = alpha[i];
    sb[i] = beta[i];
  }
  out.spectra = {std::move(sa), std::move(sb)};
  apply_pair_permutation(out.s, out.spectra, canonical_order(out.spectra).perm);
  verify_result(out.s, {a, b}, out.spectra, who);
  return out;
}

SimDiagResult family_diagonalize(const std::vector<Matrix>& forms, const Tolerances& tol) {
  const char* who = "family_diagonalize";
  if (forms.empty()) throw PreconditionError("family_diagonalize: empty family");
  for (std::size_t i = 0; i < forms.size(); ++i) {
    for (std::size_t j = i + 1; j < forms.size(); ++j) {
      if (!poisson_commutes(forms[i], forms[j], tol)) {
        throw PreconditionError(
            std::string(who) + ": forms " + std::to_string(i) + " and " + std::to_string(j) +
                " do not Poisson-commute (residual " +
                std::to_string(poisson_commutator_residual(forms[i], forms[j])) + ")",
            poisson_commutator_residual(forms[i], forms[j]));
      }
    }
  }

  WilliamsonDecomposition w0 = williamson_decompose(forms.front(), tol);
  Matrix s = std::move(w0.s);
  const std::size_t n = forms.front().rows() / 2;

  // Fold: refine the shared frame inside the joint clusters of everything
  // processed so far. The lexicographic cluster key keeps splits canonical.
  std::vector<std::vector<double>> spectra{std::move(w0.spectrum)};
  for (std::size_t f = 1; f < forms.size(); ++f) {
    const Matrix gp = transpose(s) * forms[f] * s;

    // Joint clusters: pairs i-1 and i stay together only while every
    // processed spectrum agrees at the cluster gap.
    std::vector<std::pair<std::size_t, std::size_t>> clusters;
    {
      std::size_t begin = 0;
      for (std::size_t i = 1; i <= n; ++i) {
        bool split = (i == n);
        if (!split) {
          for (const auto& sp : spectra) {
            if (sp[i] - sp[i - 1] > kClusterRelGap * std::max(1.0, std::abs(sp[i]))) {
              split = true;
              break;
            }
          }
        }
        if (split) {
          clusters.emplace_back(begin, i);
          begin = i;
        }
      }
    }

    Matrix o = Matrix::identity(2 * n);
    std::vector<double> gamma(n, 0.0);
    for (const auto& [begin, end] : clusters) {
      const auto idx = cluster_slots(n, begin, end);
      const Matrix blk = gp.submatrix(idx, idx);
      WilliamsonDecomposition wd;
      try {
        wd = detail::jcommuting_orthosymplectic(blk, tol, /*require_pd=*/true);
      } catch (const PreconditionError& e) {
        throw PreconditionError(std::string(who) + ": refinement for form " +
                                std::to_string(f) + " failed: " + e.what());
      }
      embed_block(o, wd.s, n, begin, end);
      for (std::size_t i = begin; i < end; ++i) gamma[i] = wd.spectrum[i - begin];
    }
    s = s * o;
    spectra.push_back(std::move(gamma));
  }

  SimDiagResult out;
  out.s = std::move(s);
  out.spectra = std::move(spectra);
  apply_pair_permutation(out.s, out.spectra, canonical_order(out.spectra).perm);
  verify_result(out.s, forms, out.spectra, who);
  return out;
}

double power_commutator_residual(const Matrix& a, const Matrix& b, double s,
                                 const Tolerances& tol) {
  const char* who = "power_commutator_residual";
  require_symmetric_even_pair(a, b, who);
  const double plain = max_abs(a * b - b * a) / (norm_scale(a) * norm_scale(b));
  if (plain > tol.sym_tol) {
    throw PreconditionError(std::string(who) + ": [A, B] != 0 (residual " +
                                std::to_string(plain) + ")",
                            plain);
  }
  require_commuting(a, b, tol, who);

  const Matrix as = matrix_power(a, s, tol);
  const Matrix bs = matrix_power(b, s, tol);
  const Matrix j = standard_symplectic_form(a.rows() / 2);
  const Matrix jas = j * as;
  const Matrix jbs = j * bs;
  return max_abs(jas * jbs - jbs * jas) / (max_abs(as) * max_abs(bs));
}

Matrix geometric_mean(const Matrix& a, const Matrix& b, double t, const Tolerances& tol) {
  const char* who = "geometric_mean";
  if (!(t >= 0.0 && t <= 1.0)) {
    throw PreconditionError(std::string(who) + ": t must lie in [0, 1]", t);
  }
  if (!a.square() || !b.square() || a.rows() != b.rows()) {
    throw PreconditionError(std::string(who) + ": matrices must be square of equal size");
  }
  for (const Matrix* m : {&a, &b}) {
    const EigenDecomposition eig = symmetric_eigen(*m, tol);
    if (eig.values.front() <= tol.rank_tol * norm_scale(*m)) {
      throw PreconditionError(std::string(who) + ": matrix is not positive-definite",
                              eig.values.front());
    }
  }
  const Matrix ah = matrix_power(a, 0.5, tol);
  const Matrix ahi = matrix_power(a, -0.5, tol);
  Matrix inner = ahi * b * ahi;
  for (std::size_t i = 0; i < inner.rows(); ++i)
    for (std::size_t j = i + 1; j < inner.cols(); ++j) {
      const double v = 0.5 * (inner(i, j) + inner(j, i));
      inner(i, j) = v;
      inner(j, i) = v;
    }
  const Matrix mid = matrix_power(inner, t, tol);
  Matrix out = ah * mid * ah;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = i + 1; j < out.cols(); ++j) {
      const double v = 0.5 * (out(i, j) + out(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

}  // namespace sympal
