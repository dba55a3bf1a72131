#include "sgc/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sgc {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  return dot(a.data(), b.data(), a.size());
}

double norm2_sq(const Vector& v) { return dot(v.data(), v.data(), v.size()); }

double norm2(const Vector& v) { return std::sqrt(norm2_sq(v)); }

Vector matvec(const Matrix& X, const Vector& v) {
  if (v.size() != X.cols) throw std::invalid_argument("matvec: size mismatch");
  Vector out(X.rows, 0.0);
  for (std::size_t i = 0; i < X.rows; ++i) out[i] = dot(X.row(i), v.data(), X.cols);
  return out;
}

Vector mat_t_vec(const Matrix& X, const Vector& v) {
  if (v.size() != X.rows) throw std::invalid_argument("mat_t_vec: size mismatch");
  Vector out(X.cols, 0.0);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double* r = X.row(i);
    const double w = v[i];
    for (std::size_t j = 0; j < X.cols; ++j) out[j] += w * r[j];
  }
  return out;
}

Matrix gram(const Matrix& X) {
  Matrix G(X.cols, X.cols);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double* r = X.row(i);
    for (std::size_t j = 0; j < X.cols; ++j) {
      const double rj = r[j];
      if (rj == 0.0) continue;
      double* gj = G.row(j);
      for (std::size_t k = 0; k < X.cols; ++k) gj[k] += rj * r[k];
    }
  }
  return G;
}

double frobenius_sq(const Matrix& X) { return dot(X.a.data(), X.a.data(), X.a.size()); }

namespace {

// one symmetric matvec G v for a square matrix
Vector sym_apply(const Matrix& G, const Vector& v) {
  Vector out(G.rows, 0.0);
  for (std::size_t i = 0; i < G.rows; ++i) out[i] = dot(G.row(i), v.data(), G.cols);
  return out;
}

void normalize(Vector& v) {
  const double nv = norm2(v);
  if (nv == 0.0) throw std::runtime_error("power iteration: zero vector");
  for (auto& e : v) e /= nv;
}

// Power iteration on a symmetric PSD matrix. Residual test ||G v - r v|| <=
// tol * r with r the Rayleigh quotient of the current unit iterate.
double power_iteration(const Matrix& G, double tol, std::size_t max_iters) {
  const std::size_t n = G.rows;
  Vector v(n, 1.0);
  normalize(v);
  double rayleigh = 0.0;
  double resid = 0.0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    for (std::size_t it = 0; it < max_iters; ++it) {
      Vector gv = sym_apply(G, v);
      rayleigh = dot(gv, v);
      if (rayleigh <= 0.0) break;  // the current iterate lies in the null space
      resid = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double d = gv[k] - rayleigh * v[k];
        resid += d * d;
      }
      resid = std::sqrt(resid);
      if (resid <= tol * rayleigh) return rayleigh;
      normalize(gv);
      v = std::move(gv);
    }
    if (attempt == 0) {
      // Deterministic perturbation for starts orthogonal to (or stuck outside)
      // the top eigenspace: tilt each coordinate by a distinct amount.
      for (std::size_t k = 0; k < n; ++k) v[k] += 1e-3 * static_cast<double>(k + 1) + 1e-6;
      normalize(v);
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "power iteration did not converge: last value %.17g, residual %.17g", rayleigh,
                resid);
  throw std::runtime_error(buf);
}

// Cholesky factor L (lower) of a symmetric positive-definite matrix. A pivot
// below rel_tol times the original diagonal counts as singular.
Matrix cholesky(const Matrix& A, const char* context, double rel_tol = 0.0) {
  const std::size_t n = A.rows;
  Matrix L(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = A.at(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= L.at(i, k) * L.at(j, k);
      if (i == j) {
        if (s <= rel_tol * std::abs(A.at(i, i))) {
          char buf[128];
          std::snprintf(buf, sizeof buf, "%s: matrix is not positive definite", context);
          throw std::runtime_error(buf);
        }
        L.at(i, i) = std::sqrt(s);
      } else {
        L.at(i, j) = s / L.at(j, j);
      }
    }
  }
  return L;
}

Vector cholesky_solve(const Matrix& L, const Vector& b) {
  const std::size_t n = L.rows;
  Vector z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= L.at(i, k) * z[k];
    z[i] = s / L.at(i, i);
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = z[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= L.at(k, ii) * x[k];
    x[ii] = s / L.at(ii, ii);
  }
  return x;
}

}  // namespace

double spectral_norm(const Matrix& X, double tol, std::size_t max_iters) {
  if (X.rows == 0 || X.cols == 0) throw std::invalid_argument("spectral_norm: empty matrix");
  if (frobenius_sq(X) == 0.0) throw std::invalid_argument("spectral_norm: zero matrix");
  return power_iteration(gram(X), tol, max_iters);
}

SpectralSummary incoherence_mu(const Matrix& X) {
  SpectralSummary s;
  s.frobenius_sq = frobenius_sq(X);
  if (s.frobenius_sq == 0.0) throw std::invalid_argument("incoherence_mu: zero matrix");
  s.spectral_norm = spectral_norm(X);
  s.mu = (s.frobenius_sq / static_cast<double>(X.rows)) / s.spectral_norm;
  if (s.mu < 0.0 || s.mu > 1.0 + 1e-10) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "incoherence_mu: mu = %.17g outside [0, 1]", s.mu);
    throw std::runtime_error(buf);
  }
  if (s.mu > 1.0) s.mu = 1.0;
  return s;
}

Vector least_squares_optimum(const Matrix& X, const Vector& y, double tol) {
  if (y.size() != X.rows) throw std::invalid_argument("least_squares_optimum: size mismatch");
  // CGLS silently converges to one of the many optima of a rank-deficient
  // system, so singularity is checked up front via a pivoted Cholesky pass.
  try {
    cholesky(gram(X), "least_squares_optimum", 1e-12);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("least_squares_optimum: rank-deficient system");
  }
  const std::size_t ell = X.cols;
  Vector beta(ell, 0.0);
  Vector r = y;                // residual y - X beta at beta = 0
  Vector s = mat_t_vec(X, r);  // normal-equation residual X^T r
  Vector p = s;
  const double target = tol * norm2(s);
  double s_sq = norm2_sq(s);
  if (std::sqrt(s_sq) <= target) return beta;  // X^T y = 0 edge case
  const std::size_t max_iters = 20 * (ell + 2);
  for (std::size_t it = 0; it < max_iters; ++it) {
    const Vector q = matvec(X, p);
    const double q_sq = norm2_sq(q);
    if (q_sq == 0.0 || !std::isfinite(q_sq))
      throw std::runtime_error("least_squares_optimum: breakdown");
    const double alpha = s_sq / q_sq;
    for (std::size_t k = 0; k < ell; ++k) beta[k] += alpha * p[k];
    for (std::size_t k = 0; k < X.rows; ++k) r[k] -= alpha * q[k];
    s = mat_t_vec(X, r);
    const double s_sq_new = norm2_sq(s);
    if (std::sqrt(s_sq_new) <= target) return beta;
    const double omega = s_sq_new / s_sq;
    if (!std::isfinite(omega)) throw std::runtime_error("least_squares_optimum: breakdown");
    for (std::size_t k = 0; k < ell; ++k) p[k] = s[k] + omega * p[k];
    s_sq = s_sq_new;
  }
  throw std::runtime_error("least_squares_optimum: did not converge");
}

double lambda_min(const Matrix& gram_matrix, double tol, std::size_t max_iters) {
  if (gram_matrix.rows != gram_matrix.cols || gram_matrix.rows == 0)
    throw std::invalid_argument("lambda_min: matrix must be square and non-empty");
  const std::size_t n = gram_matrix.rows;
  const Matrix L = cholesky(gram_matrix, "lambda_min");
  Vector v(n, 1.0);
  normalize(v);
  double rayleigh = 0.0;
  double resid = 0.0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    for (std::size_t it = 0; it < max_iters; ++it) {
      const Vector w = cholesky_solve(L, v);  // dominant in the 1/lambda_min direction
      Vector u = w;
      normalize(u);
      const Vector au = sym_apply(gram_matrix, u);
      rayleigh = dot(au, u);
      resid = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double d = au[k] - rayleigh * u[k];
        resid += d * d;
      }
      resid = std::sqrt(resid);
      if (resid <= tol * rayleigh) return rayleigh;
      v = std::move(u);
    }
    if (attempt == 0) {
      for (std::size_t k = 0; k < n; ++k) v[k] += 1e-3 * static_cast<double>(k + 1) + 1e-6;
      normalize(v);
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "lambda_min did not converge: last value %.17g, residual %.17g",
                rayleigh, resid);
  throw std::runtime_error(buf);
}

}  // namespace sgc
