// Python bindings: synthetic data generation, spectral quantities, placement
// profiles, the single-cell scheme runner and both convergence-bound
// evaluators. Matrices cross the boundary as nested lists of floats, so the
// module has no third-party array dependency.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgc/experiments.hpp"

namespace py = pybind11;
using namespace sgc;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty())
    throw std::invalid_argument("matrix must be non-empty");
  Matrix X(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != X.cols) throw std::invalid_argument("matrix rows have unequal lengths");
    for (std::size_t j = 0; j < X.cols; ++j) X.at(i, j) = rows[i][j];
  }
  return X;
}

std::vector<std::vector<double>> from_matrix(const Matrix& X) {
  std::vector<std::vector<double>> rows(X.rows, std::vector<double>(X.cols));
  for (std::size_t i = 0; i < X.rows; ++i)
    for (std::size_t j = 0; j < X.cols; ++j) rows[i][j] = X.at(i, j);
  return rows;
}

py::dict py_generate_synthetic(std::size_t m, std::size_t ell, double feature_std,
                               double label_noise_std, long long coeff_low, long long coeff_high,
                               std::uint64_t seed) {
  SynthConfig cfg;
  cfg.m = m;
  cfg.ell = ell;
  cfg.feature_std = feature_std;
  cfg.label_noise_std = label_noise_std;
  cfg.coeff_low = coeff_low;
  cfg.coeff_high = coeff_high;
  cfg.seed = seed;
  const Dataset data = generate_synthetic(cfg);
  py::dict out;
  out["X"] = from_matrix(data.X);
  out["y"] = data.y;
  out["beta_bar"] = *data.beta_bar;
  return out;
}

py::dict py_spectral_summary(const std::vector<std::vector<double>>& rows) {
  const SpectralSummary ss = incoherence_mu(to_matrix(rows));
  py::dict out;
  out["spectral_norm"] = ss.spectral_norm;
  out["frobenius_sq"] = ss.frobenius_sq;
  out["mu"] = ss.mu;
  return out;
}

Vector py_least_squares(const std::vector<std::vector<double>>& rows, const Vector& y) {
  return least_squares_optimum(to_matrix(rows), y);
}

double py_lambda_min_gram(const std::vector<std::vector<double>>& rows) {
  return lambda_min(gram(to_matrix(rows)));
}

py::dict py_replication_degrees(const std::vector<std::vector<double>>& rows, double d, int n) {
  const DegreeProfile prof = replication_degrees(to_matrix(rows), d, n);
  py::dict out;
  out["degrees"] = prof.degrees;
  out["sigma"] = prof.sigma;
  out["avg_degree"] = prof.avg_degree;
  return out;
}

std::vector<std::vector<int>> py_assign_replicated(const std::vector<std::vector<double>>& rows,
                                                   double d, int n, std::uint64_t seed) {
  const Assignment a = assign_replicated(replication_degrees(to_matrix(rows), d, n), n, seed);
  return a.worker_sets;
}

std::vector<std::vector<int>> py_assign_partition(std::size_t m, int n) {
  return assign_partition(m, n).worker_sets;
}

std::vector<std::vector<int>> py_assign_fractional(std::size_t m, int n, int d) {
  return assign_fractional_repetition(m, n, d).worker_sets;
}

py::dict py_run_scheme(const std::vector<std::vector<double>>& rows, const Vector& y,
                       const std::string& scheme, int workers, double redundancy, double p,
                       std::uint64_t nu, std::uint64_t iterations, std::uint64_t seed,
                       const std::string& schedule, double scale, double power,
                       double log_base_exponent, double epsilon, double lam,
                       const std::string& normalization, double projection_radius) {
  Matrix X = to_matrix(rows);
  if (y.size() != X.rows) throw std::invalid_argument("y must have one entry per row of X");
  const std::size_t m = X.rows, ell = X.cols;
  Dataset data{std::move(X), y, std::nullopt};

  const SchemeKind kind = scheme_from_name(scheme);
  const std::uint64_t cell_seed = derive_seed({seed, kTagCell, 0, 0, 0, 0});
  const int dint = static_cast<int>(std::llround(redundancy));
  Assignment a;
  switch (kind) {
    case SchemeKind::SGC:
    case SchemeKind::SGCSendAll:
      a = assign_replicated(replication_degrees(data.X, redundancy, workers), workers, cell_seed);
      break;
    case SchemeKind::BGC:
      a = assign_replicated(constant_degrees(m, std::max(1, dint), workers), workers, cell_seed);
      break;
    case SchemeKind::ErasureHead:
      a = assign_fractional_repetition(m, workers, std::max(1, dint));
      break;
    default: a = assign_partition(m, workers); break;
  }

  StepSchedule sched;
  if (schedule == "empirical") {
    sched = StepSchedule::empirical(scale, power, log_base_exponent);
  } else if (schedule == "theorem_l2") {
    sched = StepSchedule::theorem_l2(epsilon, spectral_norm(data.X));
  } else if (schedule == "inverse_lambda_t") {
    sched = StepSchedule::inverse_lambda_t(lam > 0.0 ? lam : lambda_min(gram(data.X)));
  } else {
    throw std::invalid_argument("schedule must be empirical, theorem_l2 or inverse_lambda_t");
  }
  if (normalization == "none") {
    sched.update_scale = 1.0;
  } else if (normalization == "inverse_spectral_norm") {
    sched.update_scale = 1.0 / spectral_norm(data.X);
  } else if (normalization == "sum_gradient") {
    sched.update_scale = static_cast<double>(m);
  } else {
    throw std::invalid_argument(
        "normalization must be none, inverse_spectral_norm or sum_gradient");
  }

  const Vector beta_star = least_squares_optimum(data.X, data.y);
  const SchemeSpec spec{kind, sched, p};
  const StragglerModel model{p, nu, workers, cell_seed};
  ProjectionSpec proj;
  if (projection_radius > 0.0) proj.radius = projection_radius;

  const RunTrace tr =
      run_scheme(spec, data, a, model, Vector(ell, 0.0), beta_star, iterations, proj);
  py::dict out;
  out["scheme"] = tr.scheme;
  out["p"] = tr.p;
  out["nu"] = tr.nu;
  out["errors"] = tr.errors;
  out["final_error"] = tr.errors.back();
  out["beta_star"] = beta_star;
  return out;
}

double py_thm3_bound(double epsilon, std::uint64_t T, double p, double d, double mu,
                     double residual_norm_sq, double spectral_norm_val, double beta0_err_sq,
                     std::uint64_t n) {
  BoundInputs b;
  b.epsilon = epsilon;
  b.T = T;
  b.p = p;
  b.d = d;
  b.mu = mu;
  b.residual_norm_sq = residual_norm_sq;
  b.spectral_norm = spectral_norm_val;
  b.beta0_err_sq = beta0_err_sq;
  b.n = n;
  return thm3_bound(b);
}

double py_thm4_bound(std::uint64_t T, double p, double lambda, double c_sq, std::uint64_t m,
                     std::uint64_t n, std::uint64_t d_min) {
  BoundInputs b;
  b.T = T;
  b.p = p;
  b.lambda = lambda;
  b.C_sq = c_sq;
  b.m = m;
  b.n = n;
  b.d_min = d_min;
  return thm4_bound(b);
}

}  // namespace

PYBIND11_MODULE(sgcsim, mod) {
  mod.doc() = "Deterministic simulator for straggler-tolerant distributed gradient descent";

  mod.def("generate_synthetic", &py_generate_synthetic, py::arg("m"), py::arg("ell"),
          py::arg("feature_std") = 10.0, py::arg("label_noise_std") = 1.0,
          py::arg("coeff_low") = 1, py::arg("coeff_high") = 10, py::arg("seed") = kDefaultSeed,
          "Gaussian features with a planted integer coefficient vector; returns X, y, beta_bar.");

  mod.def("spectral_summary", &py_spectral_summary, py::arg("X"),
          "spectral_norm = ||X^T X||_2, frobenius_sq = ||X||_F^2 and the incoherence mu.");

  mod.def("least_squares_optimum", &py_least_squares, py::arg("X"), py::arg("y"),
          "The least-squares optimum of ||X beta - y||, via conjugated normal equations.");

  mod.def("lambda_min_gram", &py_lambda_min_gram, py::arg("X"),
          "Smallest eigenvalue of X^T X (the strong-convexity constant of the l2 loss).");

  mod.def("replication_degrees", &py_replication_degrees, py::arg("X"), py::arg("d"),
          py::arg("n"), "Norm-proportional replication degrees with average d over n workers.");

  mod.def("assign_replicated", &py_assign_replicated, py::arg("X"), py::arg("d"), py::arg("n"),
          py::arg("seed") = kDefaultSeed,
          "Random replicated placement onto n workers; returns per-worker row lists.");

  mod.def("assign_partition", &py_assign_partition, py::arg("m"), py::arg("n"),
          "Contiguous near-equal partition of m rows onto n workers.");

  mod.def("assign_fractional_repetition", &py_assign_fractional, py::arg("m"), py::arg("n"),
          py::arg("d"), "Block placement: n/d worker blocks, each holding one data partition.");

  mod.def("run_scheme", &py_run_scheme, py::arg("X"), py::arg("y"), py::arg("scheme") = "sgc",
          py::arg("workers") = 10, py::arg("redundancy") = 2.0, py::arg("p") = 0.0,
          py::arg("nu") = 1, py::arg("iterations") = 100, py::arg("seed") = kDefaultSeed,
          py::arg("schedule") = "empirical", py::arg("scale") = 7.0, py::arg("power") = 0.7,
          py::arg("log_base_exponent") = 100.0, py::arg("epsilon") = 0.1, py::arg("lam") = 0.0,
          py::arg("normalization") = "inverse_spectral_norm",
          py::arg("projection_radius") = 0.0,
          "Run one (scheme, p, nu) cell on the given data; returns the error trace "
          "||beta_t - beta*|| for t = 0..iterations.");

  mod.def("thm3_bound", &py_thm3_bound, py::arg("epsilon"), py::arg("T"), py::arg("p"),
          py::arg("d"), py::arg("mu"), py::arg("residual_norm_sq"), py::arg("spectral_norm"),
          py::arg("beta0_err_sq"), py::arg("n"),
          "L2-loss convergence bound; raises ValueError if a hypothesis fails.");

  mod.def("thm4_bound", &py_thm4_bound, py::arg("T"), py::arg("p"), py::arg("lam"),
          py::arg("c_sq"), py::arg("m"), py::arg("n"), py::arg("d_min"),
          "Strong-convexity O(1/T) bound for the projected runs.");
}
