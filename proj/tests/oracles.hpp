#pragma once
// Independent oracles used by the test suite. Everything here is written
// against first principles (closed forms, finite differences, exhaustive
// enumeration) and deliberately avoids the library's own linear-algebra and
// estimator code paths, so tests compare two unrelated computations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sgc/assignment.hpp"
#include "sgc/datagen.hpp"
#include "sgc/numerics.hpp"
#include "sgc/rng.hpp"

namespace oracle {

// ---- symmetric eigenvalue closed forms --------------------------------------

// Largest eigenvalue of a symmetric 2x2 matrix.
inline double sym2_max_eig(double a, double b, double c, double d) {
  const double tr = a + d;
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return tr / 2.0 + disc;
}

// Largest eigenvalue of a symmetric 3x3 matrix via the trigonometric solution
// of the characteristic cubic.
inline double sym3_max_eig(const sgc::Matrix& A) {
  if (A.rows != 3 || A.cols != 3) throw std::invalid_argument("sym3_max_eig: need 3x3");
  const double a00 = A.at(0, 0), a01 = A.at(0, 1), a02 = A.at(0, 2);
  const double a11 = A.at(1, 1), a12 = A.at(1, 2), a22 = A.at(2, 2);
  const double p1 = a01 * a01 + a02 * a02 + a12 * a12;
  if (p1 == 0.0) return std::max(a00, std::max(a11, a22));
  const double q = (a00 + a11 + a22) / 3.0;
  const double p2 = (a00 - q) * (a00 - q) + (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  // B = (A - q I) / p; r = det(B) / 2
  const double b00 = (a00 - q) / p, b01 = a01 / p, b02 = a02 / p;
  const double b11 = (a11 - q) / p, b12 = a12 / p, b22 = (a22 - q) / p;
  double detb = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
                b02 * (b01 * b12 - b11 * b02);
  double r = detb / 2.0;
  r = std::min(1.0, std::max(-1.0, r));
  const double phi = std::acos(r) / 3.0;
  return q + 2.0 * p * std::cos(phi);
}

// ---- Cramer's rule for 3x3 systems ------------------------------------------

inline double det3(const double M[3][3]) {
  return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
         M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
         M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
}

// Solve A x = b for 3x3 A by Cramer's rule.
inline sgc::Vector cramer3(const sgc::Matrix& A, const sgc::Vector& b) {
  if (A.rows != 3 || A.cols != 3 || b.size() != 3) throw std::invalid_argument("cramer3: need 3x3");
  double M[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M[i][j] = A.at(i, j);
  const double d = det3(M);
  if (d == 0.0) throw std::invalid_argument("cramer3: singular");
  sgc::Vector x(3);
  for (int k = 0; k < 3; ++k) {
    double Mk[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) Mk[i][j] = (j == k) ? b[i] : M[i][j];
    x[k] = det3(Mk) / d;
  }
  return x;
}

// ---- calculus oracles --------------------------------------------------------

// Central finite differences of the squared-residual loss 0.5*(x.beta - y)^2.
inline sgc::Vector fd_row_gradient(const sgc::Vector& x, double y, const sgc::Vector& beta,
                                   double h = 1e-6) {
  auto loss = [&](const sgc::Vector& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * b[k];
    const double r = s - y;
    return 0.5 * r * r;
  };
  sgc::Vector g(beta.size());
  sgc::Vector bp = beta, bm = beta;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    bp[k] = beta[k] + h;
    bm[k] = beta[k] - h;
    g[k] = (loss(bp) - loss(bm)) / (2.0 * h);
    bp[k] = beta[k];
    bm[k] = beta[k];
  }
  return g;
}

// X^T (X beta - y) computed with straight index arithmetic (no library calls).
inline sgc::Vector direct_normal_residual(const sgc::Matrix& X, const sgc::Vector& y,
                                          const sgc::Vector& beta) {
  sgc::Vector r(X.rows, 0.0);
  for (std::size_t i = 0; i < X.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < X.cols; ++j) s += X.at(i, j) * beta[j];
    r[i] = s - y[i];
  }
  sgc::Vector g(X.cols, 0.0);
  for (std::size_t i = 0; i < X.rows; ++i)
    for (std::size_t j = 0; j < X.cols; ++j) g[j] += X.at(i, j) * r[i];
  return g;
}

// ---- exhaustive straggler-pattern enumeration --------------------------------

// For a fixed assignment and iid straggling with probability p, enumerate all
// 2^n straggler patterns and return E[Z_{i1} Z_{i2}], where Z_i counts the
// non-straggler workers holding row i. Pure combinatorics over the assignment.
inline double enumerate_second_moment(const sgc::Assignment& a, double p, int i1, int i2) {
  const int n = a.n;
  if (n > 20) throw std::invalid_argument("enumerate_second_moment: n too large");
  // holder mask per row
  auto holders = [&](int row) {
    std::uint32_t mask = 0;
    for (int j = 0; j < n; ++j)
      for (int r : a.worker_sets[static_cast<std::size_t>(j)])
        if (r == row) mask |= (1u << j);
    return mask;
  };
  const std::uint32_t h1 = holders(i1), h2 = holders(i2);
  double acc = 0.0;
  for (std::uint32_t pat = 0; pat < (1u << n); ++pat) {
    // bit set in pat = worker straggles
    double w = 1.0;
    for (int j = 0; j < n; ++j) w *= (pat >> j & 1u) ? p : (1.0 - p);
    const int z1 = __builtin_popcount(h1 & ~pat);
    const int z2 = __builtin_popcount(h2 & ~pat);
    acc += w * static_cast<double>(z1) * static_cast<double>(z2);
  }
  return acc;
}

// ---- small statistics ---------------------------------------------------------

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

// Spearman rank correlation (average ranks on ties).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < rx.size(); ++k) {
    sxy += (rx[k] - mx) * (ry[k] - my);
    sxx += (rx[k] - mx) * (rx[k] - mx);
    syy += (ry[k] - my) * (ry[k] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Relative error with an absolute fallback near zero.
inline double rel_err(double got, double want) {
  const double scale = std::max(1.0, std::abs(want));
  return std::abs(got - want) / scale;
}

inline double vec_rel_err(const sgc::Vector& got, const sgc::Vector& want) {
  double dn = 0.0, wn = 0.0;
  for (std::size_t k = 0; k < got.size(); ++k) {
    dn += (got[k] - want[k]) * (got[k] - want[k]);
    wn += want[k] * want[k];
  }
  return std::sqrt(dn) / std::max(1e-300, std::sqrt(wn));
}

inline double vec_max_abs_diff(const sgc::Vector& a, const sgc::Vector& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// Deterministic small random matrix for property sweeps.
inline sgc::Matrix random_matrix(sgc::RngStream& rng, std::size_t rows, std::size_t cols,
                                 double scale = 1.0) {
  sgc::Matrix X(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) X.at(i, j) = scale * rng.next_gaussian();
  return X;
}

}  // namespace oracle
