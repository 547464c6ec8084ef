#include "sympal/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sympal/errors.hpp"

namespace sympal {

namespace {

void require_square(const Matrix& m, const char* who) {
  if (!m.square() || m.rows() == 0) {
    throw PreconditionError(std::string(who) + ": matrix must be square and nonempty");
  }
}

void require_symmetric(const Matrix& m, double sym_tol, const char* who) {
  require_square(m, who);
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
  if (worst > sym_tol * norm_scale(m)) {
    throw PreconditionError(std::string(who) + ": matrix is not symmetric", worst);
  }
}

void require_even(const Matrix& m, const char* who) {
  require_square(m, who);
  if (m.rows() % 2 != 0) {
    throw PreconditionError(std::string(who) + ": dimension must be even");
  }
}

double offdiag_frobenius(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

Matrix standard_symplectic_form(std::size_t n) {
  if (n == 0) throw PreconditionError("standard_symplectic_form: n must be >= 1");
  Matrix j(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    j(i, n + i) = 1.0;
    j(n + i, i) = -1.0;
  }
  return j;
}

double omega(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() % 2 != 0) {
    throw PreconditionError("omega: vectors must share an even dimension");
  }
  const std::size_t n = x.size() / 2;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[n + i] - x[n + i] * y[i];
  return s;
}

EigenDecomposition symmetric_eigen(const Matrix& m, const Tolerances& tol) {
  require_symmetric(m, tol.sym_tol, "symmetric_eigen");
  const std::size_t n = m.rows();

  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Matrix v = Matrix::identity(n);

  const double fnorm = frobenius_norm(a);
  const double stop = tol.conv_tol * std::max(1.0, fnorm);

  // Cyclic sweeps of Jacobi rotations.
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (offdiag_frobenius(a) <= stop) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        // Pin the rotated pivot; the two-sided update leaves roundoff there.
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.values.resize(n);
  out.q = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    std::vector<double> col = v.column(order[j]);
    detail::flip_to_canonical_sign(col);
    out.q.set_column(j, col);
  }
  return out;
}

Matrix matrix_power(const Matrix& m, double s, const Tolerances& tol) {
  EigenDecomposition eig = symmetric_eigen(m, tol);
  const double rank_cut = tol.rank_tol * norm_scale(m);
  const bool integral = (s == std::floor(s));

  std::vector<double> powered(eig.values.size());
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    double v = eig.values[i];
    if (v < -rank_cut) {
      throw PreconditionError(
          "matrix_power: eigenvalue " + std::to_string(v) +
              " is negative beyond tolerance; matrix is not PSD",
          -v);
    }
    if (s < 0.0 && v <= rank_cut) {
      throw PreconditionError(
          "matrix_power: negative exponent requires a strictly positive matrix", v);
    }
    if ((!integral || s < 0.0) && v <= rank_cut) v = 0.0;
    powered[i] = (s == 0.0) ? 1.0 : std::pow(v, s);
  }

  const std::size_t n = m.rows();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        acc += eig.q(i, k) * powered[k] * eig.q(j, k);
      out(i, j) = acc;
      out(j, i) = acc;
    }
  }
  return out;
}

Matrix nullspace(const Matrix& m, const Tolerances& tol) {
  EigenDecomposition eig = symmetric_eigen(m, tol);
  const double cut = tol.rank_tol * norm_scale(m);
  std::vector<std::vector<double>> cols;
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    if (std::abs(eig.values[i]) <= cut) cols.push_back(eig.q.column(i));
  }
  return from_columns(m.rows(), cols);
}

bool is_symplectic(const Matrix& s, const Tolerances& tol) {
  require_even(s, "is_symplectic");
  const Matrix j = standard_symplectic_form(s.rows() / 2);
  const double resid = max_abs(transpose(s) * j * s - j);
  const double scale = max_abs(s);
  return resid <= tol.sym_tol * std::max(1.0, scale * scale);
}

bool is_orthosymplectic(const Matrix& s, const Tolerances& tol) {
  if (!is_symplectic(s, tol)) return false;
  const double resid = max_abs(transpose(s) * s - Matrix::identity(s.rows()));
  return resid <= tol.sym_tol * std::max(1.0, max_abs(s) * max_abs(s));
}

Matrix symplectic_gram_schmidt(const Matrix& basis, const Tolerances& tol) {
  if (basis.rows() == 0 || basis.rows() % 2 != 0) {
    throw PreconditionError("symplectic_gram_schmidt: ambient dimension must be even");
  }
  if (basis.cols() == 0 || basis.cols() % 2 != 0) {
    throw PreconditionError("symplectic_gram_schmidt: column count must be even");
  }

  std::vector<std::vector<double>> work;
  for (std::size_t j = 0; j < basis.cols(); ++j) {
    std::vector<double> c = basis.column(j);
    const double nn = norm2(c);
    if (nn > 0.0)
      for (double& e : c) e /= nn;
    work.push_back(std::move(c));
  }

  const double pivot_cut = tol.rank_tol * norm_scale(basis);
  std::vector<std::vector<double>> us, vs;

  while (!work.empty()) {
    // Pivot on the largest remaining omega pairing.
    std::size_t bi = 0, bj = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < work.size(); ++i) {
      for (std::size_t j = i + 1; j < work.size(); ++j) {
        const double w = std::abs(omega(work[i], work[j]));
        if (w > best) {
          best = w;
          bi = i;
          bj = j;
        }
      }
    }
    if (best <= pivot_cut) {
      throw PreconditionError(
          "symplectic_gram_schmidt: span is omega-degenerate (largest pairing " +
              std::to_string(best) + ")",
          best);
    }

    std::vector<double> u = work[bi], v = work[bj];
    if (omega(u, v) < 0.0) std::swap(u, v);
    const double c = std::sqrt(omega(u, v));
    for (double& e : u) e /= c;
    for (double& e : v) e /= c;
    // Joint sign flip keeps omega(u, v) = 1 and the output deterministic.
    double peak = 0.0;
    for (double e : u) peak = std::max(peak, std::abs(e));
    for (double e : u) {
      if (std::abs(e) > 1e-12 * peak) {
        if (e < 0.0) {
          for (double& x : u) x = -x;
          for (double& x : v) x = -x;
        }
        break;
      }
    }

    std::vector<std::vector<double>> rest;
    for (std::size_t i = 0; i < work.size(); ++i) {
      if (i == bi || i == bj) continue;
      std::vector<double> w = detail::omega_deflate(work[i], u, v);
      const double nn = norm2(w);
      if (nn > 0.0)
        for (double& e : w) e /= nn;
      rest.push_back(std::move(w));
    }
    work = std::move(rest);
    us.push_back(std::move(u));
    vs.push_back(std::move(v));
  }

  std::vector<std::vector<double>> cols = us;
  cols.insert(cols.end(), vs.begin(), vs.end());
  return from_columns(basis.rows(), cols);
}

namespace detail {

std::vector<std::pair<std::size_t, std::size_t>> cluster_ascending(
    const std::vector<double>& values, double rel_gap) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= values.size(); ++i) {
    const bool split =
        i == values.size() ||
        values[i] - values[i - 1] > rel_gap * std::max(1.0, std::abs(values[i]));
    if (split) {
      out.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

double determinant(Matrix a) {
  const std::size_t n = a.rows();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

std::vector<double> omega_deflate(const std::vector<double>& w,
                                  const std::vector<double>& u,
                                  const std::vector<double>& v) {
  const double cu = omega(w, v);
  const double cv = omega(w, u);
  std::vector<double> out = w;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += -cu * u[i] + cv * v[i];
  return out;
}

std::vector<std::vector<double>> orthonormalize(
    std::vector<std::vector<double>> vs, double drop_tol) {
  std::vector<std::vector<double>> out;
  for (auto& v : vs) {
    for (const auto& b : out) {
      const double c = dot(v, b);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
    const double nn = norm2(v);
    if (nn <= drop_tol) continue;
    for (double& e : v) e /= nn;
    out.push_back(std::move(v));
  }
  return out;
}

void flip_to_canonical_sign(std::vector<double>& v) {
  double peak = 0.0;
  for (double e : v) peak = std::max(peak, std::abs(e));
  if (peak == 0.0) return;
  for (double e : v) {
    if (std::abs(e) > 1e-12 * peak) {
      if (e < 0.0)
        for (double& x : v) x = -x;
      return;
    }
  }
}

}  // namespace detail

}  // namespace sympal
