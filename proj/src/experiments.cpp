#include "sgc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "sgc/rng.hpp"

namespace sgc {

namespace {

long long rounded_redundancy(double d) {
  const long long r = std::llround(d);
  if (r < 1) throw std::invalid_argument("redundancy must round to at least 1");
  return r;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.workers <= 0) throw std::invalid_argument("config: workers must be positive");
  if (cfg.schemes.empty()) throw std::invalid_argument("config: no schemes selected");
  if (cfg.p_values.empty()) throw std::invalid_argument("config: no p values");
  if (cfg.nu_values.empty()) throw std::invalid_argument("config: no nu values");
  if (cfg.repetitions == 0) throw std::invalid_argument("config: repetitions must be >= 1");
  for (double p : cfg.p_values)
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("config: p values must lie in [0, 1)");
  for (std::uint64_t nu : cfg.nu_values)
    if (nu == 0) throw std::invalid_argument("config: nu values must be >= 1");
}

}  // namespace

InstanceInfo prepare_instance(const ExperimentConfig& cfg) {
  validate_config(cfg);
  InstanceInfo inst;
  if (cfg.data.is_csv) {
    inst.data = load_csv(cfg.data.csv_path, cfg.data.csv_has_header);
  } else {
    SynthConfig synth = cfg.data.synth;
    synth.seed = derive_seed({cfg.master_seed, kTagData});
    inst.data = generate_synthetic(synth);
  }
  const std::size_t m = inst.data.X.rows;
  inst.beta_star = least_squares_optimum(inst.data.X, inst.data.y, 1e-10);
  inst.spectral = incoherence_mu(inst.data.X);
  inst.profile = replication_degrees(inst.data.X, cfg.redundancy, cfg.workers);
  inst.bgc_profile =
      constant_degrees(m, static_cast<int>(rounded_redundancy(cfg.redundancy)), cfg.workers);
  inst.lambda_min_gram = lambda_min(gram(inst.data.X));
  Vector resid = matvec(inst.data.X, inst.beta_star);
  for (std::size_t i = 0; i < m; ++i) resid[i] -= inst.data.y[i];
  inst.residual_norm_sq = norm2_sq(resid);

  switch (cfg.normalization) {
    case StepNormalization::None: inst.update_scale = 1.0; break;
    case StepNormalization::InverseSpectralNorm:
      inst.update_scale = 1.0 / inst.spectral.spectral_norm;
      break;
    case StepNormalization::SumGradient: inst.update_scale = static_cast<double>(m); break;
  }

  inst.schedule = cfg.schedule;
  inst.schedule.update_scale = inst.update_scale;
  // auto fields: non-positive placeholders resolve to instance quantities
  if (inst.schedule.kind == StepSchedule::Kind::TheoremL2 && inst.schedule.spectral_norm <= 0.0)
    inst.schedule.spectral_norm = inst.spectral.spectral_norm;
  if (inst.schedule.kind == StepSchedule::Kind::InverseLambdaT && inst.schedule.lambda <= 0.0)
    inst.schedule.lambda = inst.lambda_min_gram;

  switch (cfg.projection.mode) {
    case ProjectionConfig::Mode::None: break;
    case ProjectionConfig::Mode::Fixed:
      if (cfg.projection.radius <= 0.0)
        throw std::invalid_argument("config: fixed projection radius must be positive");
      inst.projection.radius = cfg.projection.radius;
      break;
    case ProjectionConfig::Mode::ContainOptimum:
      if (cfg.projection.scale < 1.0)
        throw std::invalid_argument("config: projection scale must be >= 1 to contain beta*");
      inst.projection.radius = cfg.projection.scale * norm2(inst.beta_star);
      break;
  }
  return inst;
}

RunTrace run_cell(const InstanceInfo& inst, const ExperimentConfig& cfg, std::size_t scheme_idx,
                  std::size_t p_idx, std::size_t nu_idx, std::uint64_t run_idx) {
  const SchemeKind kind = cfg.schemes.at(scheme_idx);
  const double p = cfg.p_values.at(p_idx);
  const std::uint64_t nu = cfg.nu_values.at(nu_idx);
  const std::size_t m = inst.data.X.rows;

  const std::uint64_t cell_seed = derive_seed({cfg.master_seed, kTagCell,
                                               static_cast<std::uint64_t>(scheme_idx),
                                               static_cast<std::uint64_t>(p_idx),
                                               static_cast<std::uint64_t>(nu_idx), run_idx});

  Assignment a;
  switch (kind) {
    case SchemeKind::SGC:
    case SchemeKind::SGCSendAll:
      a = assign_replicated(inst.profile, cfg.workers, cell_seed);
      break;
    case SchemeKind::BGC:
      a = assign_replicated(inst.bgc_profile, cfg.workers, cell_seed);
      break;
    case SchemeKind::ErasureHead:
      a = assign_fractional_repetition(m, cfg.workers,
                                       static_cast<int>(rounded_redundancy(cfg.redundancy)));
      break;
    case SchemeKind::IgnoreStragglers:
    case SchemeKind::ExactGD:
      a = assign_partition(m, cfg.workers);
      break;
  }

  const SchemeSpec spec{kind, inst.schedule, p};
  const StragglerModel model{p, nu, cfg.workers, cell_seed};
  const Vector beta0(inst.data.X.cols, 0.0);
  RunTrace trace = run_scheme(spec, inst.data, a, model, beta0, inst.beta_star, cfg.iterations,
                              inst.projection);
  trace.run = run_idx;
  return trace;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const InstanceInfo inst = prepare_instance(cfg);

  struct CellJob {
    std::size_t s, p, nu;
    std::uint64_t run;
  };
  std::vector<CellJob> jobs;
  for (std::size_t s = 0; s < cfg.schemes.size(); ++s)
    for (std::size_t p = 0; p < cfg.p_values.size(); ++p)
      for (std::size_t nu = 0; nu < cfg.nu_values.size(); ++nu)
        for (std::uint64_t run = 0; run < cfg.repetitions; ++run)
          jobs.push_back({s, p, nu, run});

  std::vector<RunTrace> results(jobs.size());
  std::vector<std::string> issues(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      const CellJob& j = jobs[k];
      try {
        results[k] = run_cell(inst, cfg, j.s, j.p, j.nu, j.run);
      } catch (const std::exception& e) {
        issues[k] = e.what()[0] ? e.what() : "unknown error";
      }
    }
  };

  const std::size_t nthreads =
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(cfg.threads, jobs.size()));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ExperimentResult res;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    if (issues[k].empty()) {
      res.traces.push_back(std::move(results[k]));
    } else {
      const CellJob& j = jobs[k];
      res.failures.push_back({scheme_name(cfg.schemes[j.s]), cfg.p_values[j.p],
                              cfg.nu_values[j.nu], j.run, issues[k]});
    }
  }

  // group means over the successful repetitions, in configuration order
  std::size_t cursor = 0;
  for (std::size_t s = 0; s < cfg.schemes.size(); ++s)
    for (std::size_t p = 0; p < cfg.p_values.size(); ++p)
      for (std::size_t nu = 0; nu < cfg.nu_values.size(); ++nu) {
        double fin = 0.0, flo = 0.0;
        std::size_t count = 0;
        for (std::uint64_t run = 0; run < cfg.repetitions; ++run, ++cursor) {
          if (!issues[cursor].empty()) continue;
          // res.traces keeps job order, so count back from the cursor
          ++count;
        }
        if (count == 0) continue;
        // recompute from the collected traces (they are in job order)
        SummaryRow row{scheme_name(cfg.schemes[s]), cfg.p_values[p], cfg.nu_values[nu], 0.0, 0.0};
        std::size_t seen = 0;
        for (const auto& tr : res.traces) {
          if (tr.scheme != row.scheme || tr.p != row.p || tr.nu != row.nu) continue;
          fin += tr.errors.back();
          flo += error_floor(tr, cfg.floor_window);
          ++seen;
        }
        row.mean_final_error = fin / static_cast<double>(seen);
        row.mean_floor_error = flo / static_cast<double>(seen);
        res.summary.push_back(row);
      }
  return res;
}

double error_floor(const RunTrace& trace, std::size_t window) {
  if (trace.errors.empty()) throw std::invalid_argument("error_floor: empty trace");
  std::size_t w = window == 0 ? 1 : window;
  w = std::min(w, trace.errors.size());
  double s = 0.0;
  for (std::size_t k = trace.errors.size() - w; k < trace.errors.size(); ++k)
    s += trace.errors[k];
  return s / static_cast<double>(w);
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_traces(const std::vector<RunTrace>& traces, const std::vector<SummaryRow>& summary,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::vector<const RunTrace*> order;
  order.reserve(traces.size());
  for (const auto& t : traces) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const RunTrace* a, const RunTrace* b) {
    if (a->scheme != b->scheme) return a->scheme < b->scheme;
    if (a->p != b->p) return a->p < b->p;
    if (a->nu != b->nu) return a->nu < b->nu;
    return a->run < b->run;
  });
  std::string out = "scheme,p,nu,run,iteration,error\n";
  for (const RunTrace* t : order) {
    const std::string prefix = t->scheme + "," + format_g17(t->p) + "," + std::to_string(t->nu) +
                               "," + std::to_string(t->run) + ",";
    for (std::size_t it = 0; it < t->errors.size(); ++it) {
      out += prefix;
      out += std::to_string(it);
      out += ',';
      out += format_g17(t->errors[it]);
      out += '\n';
    }
  }
  {
    std::ofstream f(fs::path(out_dir) / "traces.csv", std::ios::binary | std::ios::trunc);
    if (!f.good()) throw std::runtime_error("write_traces: cannot open traces.csv");
    f << out;
  }

  std::vector<const SummaryRow*> sorder;
  sorder.reserve(summary.size());
  for (const auto& r : summary) sorder.push_back(&r);
  std::sort(sorder.begin(), sorder.end(), [](const SummaryRow* a, const SummaryRow* b) {
    if (a->scheme != b->scheme) return a->scheme < b->scheme;
    if (a->p != b->p) return a->p < b->p;
    return a->nu < b->nu;
  });
  std::string sout = "scheme,p,nu,mean_final_error,mean_floor_error\n";
  for (const SummaryRow* r : sorder) {
    sout += r->scheme + "," + format_g17(r->p) + "," + std::to_string(r->nu) + "," +
            format_g17(r->mean_final_error) + "," + format_g17(r->mean_floor_error) + "\n";
  }
  std::ofstream f(fs::path(out_dir) / "summary.csv", std::ios::binary | std::ios::trunc);
  if (!f.good()) throw std::runtime_error("write_traces: cannot open summary.csv");
  f << sout;
}

// ---- theoretical bounds ---------------------------------------------------------------

double thm3_bound(const BoundInputs& b) {
  if (b.epsilon <= 0.0 || b.epsilon >= 1.0)
    throw std::invalid_argument("thm3_bound: epsilon must lie in (0, 1)");
  if (b.p < 0.0 || b.p >= 1.0) throw std::invalid_argument("thm3_bound: p must lie in [0, 1)");
  if (b.d <= 0.0 || b.mu <= 0.0 || b.spectral_norm <= 0.0 || b.T == 0)
    throw std::invalid_argument("thm3_bound: d, mu, spectral_norm, T must be positive");
  const double lg = -2.0 * std::log(b.epsilon);  // ln(1/eps^2)
  const double ratio = b.p / (1.0 - b.p);
  char buf[160];
  if (static_cast<double>(b.T) < 2.0 * lg) {
    std::snprintf(buf, sizeof buf, "thm3_bound: hypothesis T >= 2 ln(1/eps^2) violated (%llu < %.17g)",
                  static_cast<unsigned long long>(b.T), 2.0 * lg);
    throw std::invalid_argument(buf);
  }
  if (b.d < 8.0 * b.mu * ratio) {
    std::snprintf(buf, sizeof buf, "thm3_bound: hypothesis d >= 8 mu p/(1-p) violated (%.17g < %.17g)",
                  b.d, 8.0 * b.mu * ratio);
    throw std::invalid_argument(buf);
  }
  if (static_cast<double>(b.n) < 8.0 * ratio) {
    std::snprintf(buf, sizeof buf, "thm3_bound: hypothesis n >= 8 p/(1-p) violated (%llu < %.17g)",
                  static_cast<unsigned long long>(b.n), 8.0 * ratio);
    throw std::invalid_argument(buf);
  }
  const double first = b.epsilon * b.epsilon * b.beta0_err_sq;
  const double second = (2.0 / (static_cast<double>(b.T) * b.d)) * lg * lg * ratio * b.mu *
                        (b.residual_norm_sq / (b.spectral_norm * b.spectral_norm));
  return first + second;
}

double thm4_bound(const BoundInputs& b) {
  if (b.lambda <= 0.0) throw std::invalid_argument("thm4_bound: lambda must be positive");
  if (b.T == 0) throw std::invalid_argument("thm4_bound: T must be >= 1");
  if (b.p < 0.0 || b.p >= 1.0) throw std::invalid_argument("thm4_bound: p must lie in [0, 1)");
  if (b.d_min == 0 || b.n == 0 || b.m == 0)
    throw std::invalid_argument("thm4_bound: d_min, n, m must be >= 1");
  const double ratio = b.p / (1.0 - b.p);
  const double inner = ratio / static_cast<double>(b.d_min) +
                       static_cast<double>(b.m - 1) * ratio / static_cast<double>(b.n) +
                       static_cast<double>(b.m);
  return (4.0 / (b.lambda * b.lambda * static_cast<double>(b.T))) * static_cast<double>(b.m) *
         b.C_sq * inner;
}

double feasible_c_sq(const Dataset& data, double radius) {
  if (radius < 0.0) throw std::invalid_argument("feasible_c_sq: radius must be >= 0");
  double best = 0.0;
  for (std::size_t i = 0; i < data.X.rows; ++i) {
    const double* xi = data.X.row(i);
    const double nx_sq = dot(xi, xi, data.X.cols);
    const double nx = std::sqrt(nx_sq);
    const double v = nx_sq * (nx * radius + std::abs(data.y[i])) *
                     (nx * radius + std::abs(data.y[i]));
    best = std::max(best, v);
  }
  return best;
}

double sampled_c_sq(const Dataset& data, double radius, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("sampled_c_sq: samples must be >= 1");
  RngStream rng(derive_seed({seed, kTagCell}));
  const std::size_t ell = data.X.cols;
  Vector beta(ell);
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    double nb = 0.0;
    do {
      for (auto& e : beta) e = rng.next_gaussian();
      nb = norm2(beta);
    } while (nb == 0.0);
    for (auto& e : beta) e *= radius / nb;
    for (std::size_t i = 0; i < data.X.rows; ++i) {
      const double* xi = data.X.row(i);
      const double resid = dot(xi, beta.data(), ell) - data.y[i];
      const double v = resid * resid * dot(xi, xi, ell);
      best = std::max(best, v);
    }
  }
  return best;
}

BoundInputs bounds_for(const InstanceInfo& inst, const ExperimentConfig& cfg, double p) {
  BoundInputs b;
  b.epsilon = cfg.bounds_epsilon;
  b.T = cfg.iterations;
  b.p = p;
  b.d = inst.profile.avg_degree;
  b.mu = inst.spectral.mu;
  b.residual_norm_sq = inst.residual_norm_sq;
  b.spectral_norm = inst.spectral.spectral_norm;
  b.beta0_err_sq = norm2_sq(inst.beta_star);  // runs start from beta_0 = 0
  b.lambda = cfg.bounds_lambda > 0.0 ? cfg.bounds_lambda : inst.lambda_min_gram;
  const double radius = inst.projection.radius.has_value() ? *inst.projection.radius
                                                           : 2.0 * norm2(inst.beta_star);
  b.C_sq = cfg.bounds_c_sq > 0.0 ? cfg.bounds_c_sq : feasible_c_sq(inst.data, radius);
  b.n = static_cast<std::uint64_t>(cfg.workers);
  b.m = inst.data.X.rows;
  int dmin = inst.profile.degrees.empty() ? 1 : inst.profile.degrees[0];
  for (int d : inst.profile.degrees) dmin = std::min(dmin, d);
  b.d_min = static_cast<std::uint64_t>(dmin);
  return b;
}

}  // namespace sgc
