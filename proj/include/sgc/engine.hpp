#pragma once
// Per-row gradients, worker messages, the scheme aggregators, step-size
// schedules, projection, the simulation loop, and closed-form moment oracles.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "sgc/assignment.hpp"
#include "sgc/datagen.hpp"
#include "sgc/straggler.hpp"

namespace sgc {

// ---- schemes -----------------------------------------------------------------

enum class SchemeKind {
  SGC,              // norm-weighted replication, weights 1/(d_i (1-p))
  BGC,              // constant-degree replication, same weighting
  ErasureHead,      // fractional repetition; distinct surviving blocks, / m
  IgnoreStragglers, // plain partition; survivors' sums / (m (1-p))
  SGCSendAll,       // distinct surviving rows, each weighted by 1/(m (1 - p^{d_i}))
  ExactGD,          // full gradient / m, stragglers ignored
};

const char* scheme_name(SchemeKind kind);
SchemeKind scheme_from_name(const std::string& name);  // throws on unknown names

// ---- step-size schedules -------------------------------------------------------

struct StepSchedule {
  enum class Kind { Empirical, TheoremL2, InverseLambdaT };
  Kind kind = Kind::Empirical;

  // Empirical: scale * ln(10^log_base_exponent) / t^power
  double scale = 7.0;
  double power = 0.7;
  double log_base_exponent = 100.0;

  // TheoremL2: (1/spectral_norm) * min{1/2, ln(1/epsilon^2)/t}
  double epsilon = 0.1;
  double spectral_norm = 1.0;

  // InverseLambdaT: 1 / (lambda * t)
  double lambda = 1.0;

  // Extra multiplier applied by run_scheme on top of step_size(t). Defaults to
  // 1 (the literal schedule). Experiment configs use it to renormalize the
  // update: 1/||X^T X|| pairs the Empirical schedule with the mean-gradient
  // aggregators; m makes the theorem schedules act on the sum gradient, the
  // dynamics their statements assume.
  double update_scale = 1.0;

  static StepSchedule empirical(double scale = 7.0, double power = 0.7,
                                double log_base_exponent = 100.0);
  static StepSchedule theorem_l2(double epsilon, double spectral_norm);
  static StepSchedule inverse_lambda_t(double lambda);
};

// gamma_t for t >= 1 (update_scale not included; the runner applies it).
double step_size(const StepSchedule& schedule, std::uint64_t t);

struct SchemeSpec {
  SchemeKind kind = SchemeKind::SGC;
  StepSchedule schedule;
  double p_assumed = 0.0;  // the p used inside estimator weights; < 1
};

// ---- projection ----------------------------------------------------------------

struct ProjectionSpec {
  std::optional<double> radius;  // l2 ball radius; empty = unconstrained
};

Vector project_ball(const Vector& beta, const ProjectionSpec& spec);

// ---- gradients and aggregation ---------------------------------------------------

// (x_i . beta - y_i) * x_i
Vector row_gradient(const Vector& x_i, double y_i, const Vector& beta);

// sum_i row_gradient = X^T (X beta - y)
Vector full_gradient(const Dataset& data, const Vector& beta);

// Worker message f_j = sum_{i in S_j} row_gradient_i / (d_i (1 - p_assumed)).
// The step size is applied by the master, not folded into the message.
Vector worker_sum(const std::vector<int>& S_j, const Dataset& data, const Vector& beta,
                  const DegreeProfile& degrees, double p_assumed);

// Master-side estimate of the MEAN gradient (1/m) g given the survivor set.
// An empty survivor set yields the zero vector for the stochastic schemes.
Vector aggregate(const SchemeSpec& spec, const Assignment& a, const std::vector<int>& survivors,
                 const Dataset& data, const Vector& beta);

// ---- simulation loop --------------------------------------------------------------

struct RunTrace {
  std::string scheme;
  double p = 0.0;
  std::uint64_t nu = 1;
  std::uint64_t run = 0;
  std::vector<double> errors;  // ||beta_t - beta*||_2 for t = 0..T
};

using IterateSink = std::function<void(std::uint64_t t, const Vector& beta)>;

// Iterates beta_{t+1} = project(beta_t - gamma_t * update_scale * g_hat_t),
// where g_hat_t aggregates the survivors of round t. Records the error at
// every iteration (T+1 values). Throws on a non-finite iterate, naming the
// iteration. Requires spec.p_assumed == model.p. The optional sink receives
// every iterate (including beta_0).
//
// Internally uses cached per-unit Gram matrices so one iteration costs
// O(min(survivors, stragglers) * ell^2) instead of O(m * ell); the reference
// implementation below is the literal per-iteration aggregate() loop, and a
// test pins the two paths together.
RunTrace run_scheme(const SchemeSpec& spec, const Dataset& data, const Assignment& a,
                    const StragglerModel& model, const Vector& beta0, const Vector& beta_star,
                    std::uint64_t T, const ProjectionSpec& proj, const IterateSink& sink = {});

RunTrace run_scheme_reference(const SchemeSpec& spec, const Dataset& data, const Assignment& a,
                              const StragglerModel& model, const Vector& beta0,
                              const Vector& beta_star, std::uint64_t T, const ProjectionSpec& proj,
                              const IterateSink& sink = {});

// ---- closed-form verification oracles ----------------------------------------------

// E[aggregate] over the iid straggler distribution for a FIXED assignment,
// computed from per-worker / per-block / per-row survival probabilities
// (never by simplifying through (1/m) full_gradient, so unbiasedness checks
// compare genuinely different computations). Requires model.nu == 1.
Vector expected_estimate(const SchemeSpec& spec, const Assignment& a, const StragglerModel& model,
                         const Dataset& data, const Vector& beta);

// E[Z_{i1} Z_{i2}] where Z_i counts surviving holders of row i (iid model):
//   i1 == i2: d_i p (1-p) + d_i^2 (1-p)^2
//   i1 != i2: overlap * p (1-p) + d_{i1} d_{i2} (1-p)^2
double second_moment_oracle(const Assignment& a, double p, int i1, int i2);

}  // namespace sgc
