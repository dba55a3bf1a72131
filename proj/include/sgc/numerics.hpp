#pragma once
// Dense row-major vector/matrix primitives and the spectral quantities
// (||X^T X||_2, ||X||_F^2, incoherence mu, least-squares optimum) consumed by
// every other module. All operations are pure functions over immutable inputs.

#include <cstddef>
#include <string>
#include <vector>

namespace sgc {

using Vector = std::vector<double>;

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // row-major, rows*cols entries

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  double* row(std::size_t i) { return a.data() + i * cols; }
  const double* row(std::size_t i) const { return a.data() + i * cols; }
};

struct SpectralSummary {
  double spectral_norm = 0.0;  // ||X^T X||_2
  double frobenius_sq = 0.0;   // ||X||_F^2
  double mu = 0.0;             // (||X||_F^2 / m) / ||X^T X||_2, in [0, 1]
};

// ---- basic dense kernels ----

double dot(const double* a, const double* b, std::size_t n);
double dot(const Vector& a, const Vector& b);
double norm2_sq(const Vector& v);
double norm2(const Vector& v);
Vector matvec(const Matrix& X, const Vector& v);     // X v
Vector mat_t_vec(const Matrix& X, const Vector& v);  // X^T v
Matrix gram(const Matrix& X);                        // X^T X
double frobenius_sq(const Matrix& X);

// ---- spectral quantities ----

// Largest eigenvalue of X^T X by power iteration on the Gram matrix with a
// deterministic start vector (normalized all-ones; perturbed deterministically
// if that start is orthogonal to the top eigenspace). Converges when the
// eigen-residual ||G v - lambda v|| <= tol * lambda; throws on non-convergence
// with the last iterate value and residual in the message.
double spectral_norm(const Matrix& X, double tol = 1e-10, std::size_t max_iters = 10000);

// Full spectral summary; throws on an all-zero matrix. mu overshoot within
// 1e-10 of [0,1] is clamped, larger excursions are an error.
SpectralSummary incoherence_mu(const Matrix& X);

// Least-squares optimum via conjugate directions on the normal equations
// (CGLS). Stops when ||X^T (X beta - y)|| <= tol * ||X^T y||; throws when the
// iteration breaks down (rank deficiency) or fails to converge.
Vector least_squares_optimum(const Matrix& X, const Vector& y, double tol = 1e-10);

// Smallest eigenvalue of a symmetric positive-definite matrix (a Gram matrix)
// by inverse power iteration with Cholesky solves. Throws if the matrix is not
// positive definite or the iteration does not converge.
double lambda_min(const Matrix& gram_matrix, double tol = 1e-10, std::size_t max_iters = 10000);

}  // namespace sgc
