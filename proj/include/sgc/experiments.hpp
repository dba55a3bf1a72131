#pragma once
// Experiment configuration, the (scheme, p, nu, run) sweep runner with
// repetition averaging, error-floor metrics, theoretical-bound evaluators and
// CSV trace emission.

#include <cstdint>
#include <string>
#include <vector>

#include "sgc/engine.hpp"

namespace sgc {

// ---- configuration ------------------------------------------------------------

struct DataSource {
  bool is_csv = false;
  SynthConfig synth;     // used when !is_csv (synth.seed is derived by the runner)
  std::string csv_path;  // used when is_csv
  bool csv_has_header = false;
};

enum class StepNormalization {
  None,                 // update_scale = 1 (literal schedule)
  InverseSpectralNorm,  // update_scale = 1 / ||X^T X||_2
  SumGradient,          // update_scale = m (theorem dynamics on the sum gradient)
};

struct ProjectionConfig {
  enum class Mode { None, Fixed, ContainOptimum } mode = Mode::None;
  double radius = 0.0;  // Fixed
  double scale = 2.0;   // ContainOptimum: radius = scale * ||beta*||
};

struct ExperimentConfig {
  DataSource data;
  int workers = 0;          // n
  double redundancy = 2.0;  // d, the target average replication
  std::vector<SchemeKind> schemes;
  std::vector<double> p_values;            // each in [0, 1)
  std::vector<std::uint64_t> nu_values{1};
  std::uint64_t iterations = 0;   // T
  std::uint64_t repetitions = 1;
  std::uint64_t floor_window = 100;
  std::uint64_t master_seed = kDefaultSeed;
  StepSchedule schedule;
  StepNormalization normalization = StepNormalization::None;
  ProjectionConfig projection;
  std::uint64_t threads = 1;
  // Optional overrides for the bound evaluators (0 = derive from the instance).
  double bounds_epsilon = 0.1;
  double bounds_lambda = 0.0;
  double bounds_c_sq = 0.0;
};

// Everything derived once per experiment from the dataset: the instance the
// cells share.
struct InstanceInfo {
  Dataset data;
  Vector beta_star;
  SpectralSummary spectral;
  DegreeProfile profile;      // norm-weighted degrees (SGC / SGCSendAll)
  DegreeProfile bgc_profile;  // constant degrees (BGC)
  double lambda_min_gram = 0.0;
  double residual_norm_sq = 0.0;  // ||X beta* - y||^2
  double update_scale = 1.0;
  StepSchedule schedule;     // config schedule with auto fields resolved
  ProjectionSpec projection; // resolved radius
};

// ---- results ---------------------------------------------------------------------

struct SummaryRow {
  std::string scheme;
  double p = 0.0;
  std::uint64_t nu = 1;
  double mean_final_error = 0.0;
  double mean_floor_error = 0.0;
};

struct CellFailure {
  std::string scheme;
  double p = 0.0;
  std::uint64_t nu = 1;
  std::uint64_t run = 0;
  std::string message;
};

struct ExperimentResult {
  std::vector<RunTrace> traces;
  std::vector<SummaryRow> summary;
  std::vector<CellFailure> failures;
};

// ---- operations -----------------------------------------------------------------

// Generate/load the dataset and precompute shared instance quantities.
InstanceInfo prepare_instance(const ExperimentConfig& cfg);

// Run one (scheme, p, nu, run) cell. Sub-seeds are derived from
// (master_seed, scheme index, p index, nu index, run index), so results do not
// depend on which other cells exist or on execution order.
RunTrace run_cell(const InstanceInfo& inst, const ExperimentConfig& cfg, std::size_t scheme_idx,
                  std::size_t p_idx, std::size_t nu_idx, std::uint64_t run_idx);

// Full sweep with repetition averaging. Cells run in parallel across
// cfg.threads, results are deterministic regardless of thread count; a
// diverging cell is recorded as a failure and the other cells are unaffected.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Mean of the last `window` error values.
double error_floor(const RunTrace& trace, std::size_t window = 100);

// traces.csv (scheme,p,nu,run,iteration,error) and summary.csv
// (scheme,p,nu,mean_final_error,mean_floor_error), floats with 17 significant
// digits, rows sorted by (scheme, p, nu, run, iteration).
void write_traces(const std::vector<RunTrace>& traces, const std::vector<SummaryRow>& summary,
                  const std::string& out_dir);

std::string format_g17(double v);

// ---- theoretical bounds -----------------------------------------------------------

struct BoundInputs {
  double epsilon = 0.1;          // target accuracy parameter
  std::uint64_t T = 1;           // iterations
  double p = 0.0;                // straggle probability
  double d = 1.0;                // average replication degree
  double mu = 1.0;               // incoherence
  double residual_norm_sq = 0.0; // ||X beta* - y||^2
  double spectral_norm = 1.0;    // ||X^T X||_2
  double beta0_err_sq = 0.0;     // ||beta_0 - beta*||^2
  double lambda = 1.0;           // strong-convexity constant
  double C_sq = 0.0;             // max row-gradient norm^2 over the feasible set
  std::uint64_t n = 1;           // workers
  std::uint64_t m = 1;           // rows
  std::uint64_t d_min = 1;       // minimum replication degree
};

// epsilon^2 * beta0_err_sq
//   + (2/(T d)) ln^2(1/eps^2) (p/(1-p)) mu (residual_norm_sq / spectral_norm^2).
// Hypotheses T >= 2 ln(1/eps^2), d >= 8 mu p/(1-p), n >= 8 p/(1-p) are
// enforced; a violation throws naming the failed inequality.
double thm3_bound(const BoundInputs& b);

// (4/(lambda^2 T)) m C^2 (p/((1-p) d_min) + (m-1)p/(n(1-p)) + m).
double thm4_bound(const BoundInputs& b);

// Exact supremum of ||row gradient||^2 over the ball ||beta|| <= radius:
// max_i ||x_i||^2 (||x_i|| radius + |y_i|)^2 (Cauchy-Schwarz is tight there).
double feasible_c_sq(const Dataset& data, double radius);

// Monte-Carlo probe of the same quantity from sampled boundary points; always
// <= feasible_c_sq, so it cross-checks the closed form from below.
double sampled_c_sq(const Dataset& data, double radius, std::size_t samples, std::uint64_t seed);

// Assemble BoundInputs for the instance at straggle probability p, with the
// config's bounds_* overrides applied.
BoundInputs bounds_for(const InstanceInfo& inst, const ExperimentConfig& cfg, double p);

}  // namespace sgc
