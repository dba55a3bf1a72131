#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sgc/numerics.hpp"
#include "sgc/rng.hpp"

using namespace sgc;

namespace {
Matrix identity(std::size_t n) {
  Matrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I.at(i, i) = 1.0;
  return I;
}
}  // namespace

TEST_CASE("spectral_norm: identity and diagonal") {
  CHECK(spectral_norm(identity(2)) == doctest::Approx(1.0).epsilon(1e-12));

  Matrix D(2, 2);
  D.at(0, 0) = 3.0;
  D.at(1, 1) = 1.0;
  CHECK(spectral_norm(D) == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("spectral_norm: random 5x3 matches characteristic-polynomial oracle") {
  RngStream rng(derive_seed({99, 5}));
  for (int rep = 0; rep < 25; ++rep) {
    const Matrix X = oracle::random_matrix(rng, 5, 3, 1.0 + rep * 0.1);
    const Matrix G = gram(X);
    const double want = oracle::sym3_max_eig(G);
    const double got = spectral_norm(X, 1e-12, 20000);
    CHECK(oracle::rel_err(got, want) <= 1e-8);
  }
}

TEST_CASE("spectral_norm: start vector orthogonal to top eigenspace still converges") {
  // all-ones is in the null space of this Gram matrix
  Matrix X(1, 2);
  X.at(0, 0) = 1.0;
  X.at(0, 1) = -1.0;
  CHECK(spectral_norm(X) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("spectral_norm: non-convergence reports an error with the residual") {
  RngStream rng(derive_seed({99, 6}));
  const Matrix X = oracle::random_matrix(rng, 6, 4);
  CHECK_THROWS_WITH_AS(spectral_norm(X, 1e-14, 1),
                       doctest::Contains("power iteration"), std::runtime_error);
}

TEST_CASE("spectral_norm: lower-bounded by any Rayleigh probe") {
  RngStream rng(derive_seed({99, 7}));
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix X = oracle::random_matrix(rng, 7, 4);
    const double S = spectral_norm(X);
    for (int pr = 0; pr < 5; ++pr) {
      Vector v(4);
      for (auto& e : v) e = rng.next_gaussian();
      const double q = norm2_sq(matvec(X, v)) / norm2_sq(v);
      CHECK(S >= q * (1.0 - 1e-9));
    }
  }
}

TEST_CASE("incoherence_mu: orthogonal, rank-one, and hand-computed cases") {
  SUBCASE("orthogonal X has mu = 1") {
    const auto s = incoherence_mu(identity(5));
    CHECK(s.mu == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("all-ones m x m has mu = 1/m") {
    const std::size_t m = 6;
    Matrix X(m, m);
    for (auto& e : X.a) e = 1.0;
    const auto s = incoherence_mu(X);
    CHECK(s.mu == doctest::Approx(1.0 / static_cast<double>(m)).epsilon(1e-9));
  }
  SUBCASE("diag(2,1): frobenius 5, spectral 4, mu 5/8") {
    Matrix X(2, 2);
    X.at(0, 0) = 2.0;
    X.at(1, 1) = 1.0;
    const auto s = incoherence_mu(X);
    CHECK(s.frobenius_sq == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(s.spectral_norm == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(s.mu == doctest::Approx(5.0 / 8.0).epsilon(1e-10));
  }
  SUBCASE("zero matrix is an error") {
    Matrix Z(3, 2);
    CHECK_THROWS_AS(incoherence_mu(Z), std::invalid_argument);
  }
}

TEST_CASE("incoherence_mu: in [0,1] for 1000 random matrices") {
  RngStream rng(derive_seed({99, 8}));
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t r = 1 + rng.next_below(12);
    const std::size_t c = 1 + rng.next_below(6);
    Matrix X = oracle::random_matrix(rng, r, c, 0.25 + rng.next_unit() * 4.0);
    if (frobenius_sq(X) == 0.0) X.at(0, 0) = 1.0;
    const auto s = incoherence_mu(X);
    CHECK(s.mu >= 0.0);
    CHECK(s.mu <= 1.0);
    // invariant: mu = frobenius_sq / (m * spectral_norm), up to the clamp
    CHECK(oracle::rel_err(s.mu, s.frobenius_sq / (static_cast<double>(r) * s.spectral_norm)) <=
          1e-9);
  }
}

TEST_CASE("least_squares_optimum: consistent system recovers the planted model") {
  RngStream rng(derive_seed({99, 9}));
  const Matrix X = oracle::random_matrix(rng, 12, 4);
  Vector beta_bar(4);
  for (auto& e : beta_bar) e = rng.next_gaussian();
  const Vector y = matvec(X, beta_bar);
  const Vector beta = least_squares_optimum(X, y, 1e-12);
  CHECK(oracle::vec_rel_err(beta, beta_bar) <= 1e-10);
}

TEST_CASE("least_squares_optimum: constant column fits the label mean") {
  Matrix X(2, 1);
  X.at(0, 0) = 1.0;
  X.at(1, 0) = 1.0;
  const Vector beta = least_squares_optimum(X, {0.0, 2.0}, 1e-14);
  REQUIRE(beta.size() == 1);
  CHECK(beta[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("least_squares_optimum: random noisy 20x3 matches Cramer's rule") {
  RngStream rng(derive_seed({99, 10}));
  for (int rep = 0; rep < 25; ++rep) {
    const Matrix X = oracle::random_matrix(rng, 20, 3);
    Vector y(20);
    for (auto& e : y) e = rng.next_gaussian() * 2.0;
    const Vector got = least_squares_optimum(X, y, 1e-13);
    const Vector want = oracle::cramer3(gram(X), mat_t_vec(X, y));
    CHECK(oracle::vec_rel_err(got, want) <= 1e-8);
  }
}

TEST_CASE("least_squares_optimum: residual orthogonality X^T r ~ 0") {
  RngStream rng(derive_seed({99, 11}));
  const Matrix X = oracle::random_matrix(rng, 30, 5);
  Vector y(30);
  for (auto& e : y) e = 3.0 * rng.next_gaussian();
  const double tol = 1e-11;
  const Vector beta = least_squares_optimum(X, y, tol);
  Vector res = matvec(X, beta);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] -= y[i];
  const Vector nt = mat_t_vec(X, res);
  CHECK(norm2(nt) <= tol * norm2(mat_t_vec(X, y)) * (1.0 + 1e-6));
}

TEST_CASE("least_squares_optimum: rank deficiency is detected") {
  Matrix X(3, 2);  // second column identical to the first
  for (int i = 0; i < 3; ++i) {
    X.at(i, 0) = i + 1.0;
    X.at(i, 1) = i + 1.0;
  }
  CHECK_THROWS_AS(least_squares_optimum(X, {1.0, 2.0, 4.0}, 1e-14), std::runtime_error);
}

TEST_CASE("lambda_min: diagonal case and Rayleigh consistency") {
  Matrix D(3, 3);
  D.at(0, 0) = 9.0;
  D.at(1, 1) = 4.0;
  D.at(2, 2) = 0.5;
  CHECK(lambda_min(D) == doctest::Approx(0.5).epsilon(1e-9));

  RngStream rng(derive_seed({99, 12}));
  const Matrix X = oracle::random_matrix(rng, 20, 4);
  const Matrix G = gram(X);
  const double lmin = lambda_min(G);
  // Rayleigh quotients never fall below lambda_min
  for (int pr = 0; pr < 10; ++pr) {
    Vector v(4);
    for (auto& e : v) e = rng.next_gaussian();
    const double q = dot(v, matvec(G, v)) / norm2_sq(v);
    CHECK(q >= lmin * (1.0 - 1e-9));
  }
}
