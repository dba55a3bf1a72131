#include "sgc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace sgc {

// ---- scheme names ------------------------------------------------------------------

const char* scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::SGC: return "sgc";
    case SchemeKind::BGC: return "bgc";
    case SchemeKind::ErasureHead: return "erasure_head";
    case SchemeKind::IgnoreStragglers: return "ignore_stragglers";
    case SchemeKind::SGCSendAll: return "sgc_send_all";
    case SchemeKind::ExactGD: return "exact_gd";
  }
  throw std::invalid_argument("scheme_name: unknown scheme");
}

SchemeKind scheme_from_name(const std::string& name) {
  if (name == "sgc") return SchemeKind::SGC;
  if (name == "bgc") return SchemeKind::BGC;
  if (name == "erasure_head") return SchemeKind::ErasureHead;
  if (name == "ignore_stragglers") return SchemeKind::IgnoreStragglers;
  if (name == "sgc_send_all") return SchemeKind::SGCSendAll;
  if (name == "exact_gd") return SchemeKind::ExactGD;
  throw std::invalid_argument(
      "unknown scheme '" + name +
      "' (valid: sgc, bgc, erasure_head, ignore_stragglers, sgc_send_all, exact_gd)");
}

// ---- step-size schedules -------------------------------------------------------------

StepSchedule StepSchedule::empirical(double scale, double power, double log_base_exponent) {
  StepSchedule s;
  s.kind = Kind::Empirical;
  s.scale = scale;
  s.power = power;
  s.log_base_exponent = log_base_exponent;
  return s;
}

StepSchedule StepSchedule::theorem_l2(double epsilon, double spectral_norm) {
  StepSchedule s;
  s.kind = Kind::TheoremL2;
  s.epsilon = epsilon;
  s.spectral_norm = spectral_norm;
  return s;
}

StepSchedule StepSchedule::inverse_lambda_t(double lambda) {
  StepSchedule s;
  s.kind = Kind::InverseLambdaT;
  s.lambda = lambda;
  return s;
}

double step_size(const StepSchedule& schedule, std::uint64_t t) {
  if (t == 0) throw std::invalid_argument("step_size: t must be >= 1");
  const double td = static_cast<double>(t);
  switch (schedule.kind) {
    case StepSchedule::Kind::Empirical:
      return schedule.scale * (schedule.log_base_exponent * std::log(10.0)) /
             std::pow(td, schedule.power);
    case StepSchedule::Kind::TheoremL2: {
      if (schedule.epsilon <= 0.0 || schedule.epsilon >= 1.0)
        throw std::invalid_argument("step_size: epsilon must lie in (0, 1)");
      const double lg = -2.0 * std::log(schedule.epsilon);  // ln(1/eps^2)
      return std::min(0.5, lg / td) / schedule.spectral_norm;
    }
    case StepSchedule::Kind::InverseLambdaT:
      if (schedule.lambda <= 0.0)
        throw std::invalid_argument("step_size: lambda must be positive");
      return 1.0 / (schedule.lambda * td);
  }
  throw std::invalid_argument("step_size: unknown schedule kind");
}

// ---- projection ------------------------------------------------------------------------

Vector project_ball(const Vector& beta, const ProjectionSpec& spec) {
  if (!spec.radius.has_value()) return beta;
  const double r = *spec.radius;
  const double nb = norm2(beta);
  if (nb <= r) return beta;
  Vector out = beta;
  const double f = r / nb;
  for (auto& e : out) e *= f;
  return out;
}

// ---- gradients --------------------------------------------------------------------------

Vector row_gradient(const Vector& x_i, double y_i, const Vector& beta) {
  const double resid = dot(x_i, beta) - y_i;
  Vector out(x_i.size());
  for (std::size_t k = 0; k < x_i.size(); ++k) out[k] = resid * x_i[k];
  return out;
}

Vector full_gradient(const Dataset& data, const Vector& beta) {
  if (beta.size() != data.X.cols) throw std::invalid_argument("full_gradient: size mismatch");
  Vector out(data.X.cols, 0.0);
  for (std::size_t i = 0; i < data.X.rows; ++i) {
    const double* xi = data.X.row(i);
    const double resid = dot(xi, beta.data(), data.X.cols) - data.y[i];
    for (std::size_t k = 0; k < data.X.cols; ++k) out[k] += resid * xi[k];
  }
  return out;
}

Vector worker_sum(const std::vector<int>& S_j, const Dataset& data, const Vector& beta,
                  const DegreeProfile& degrees, double p_assumed) {
  if (p_assumed < 0.0 || p_assumed >= 1.0)
    throw std::invalid_argument("worker_sum: p_assumed must lie in [0, 1)");
  Vector out(data.X.cols, 0.0);
  for (int i : S_j) {
    const double* xi = data.X.row(static_cast<std::size_t>(i));
    const double resid = dot(xi, beta.data(), data.X.cols) - data.y[static_cast<std::size_t>(i)];
    const double w =
        resid / (static_cast<double>(degrees.degrees[static_cast<std::size_t>(i)]) *
                 (1.0 - p_assumed));
    for (std::size_t k = 0; k < data.X.cols; ++k) out[k] += w * xi[k];
  }
  return out;
}

namespace {

// distinct worker sets by content (ErasureHead blocks)
struct SetPtrLess {
  bool operator()(const std::vector<int>* a, const std::vector<int>* b) const {
    return *a < *b;
  }
};

void add_rows_unit(Vector& out, const Dataset& data, const std::vector<int>& rows,
                   const Vector& beta, double scale) {
  for (int i : rows) {
    const double* xi = data.X.row(static_cast<std::size_t>(i));
    const double w =
        scale * (dot(xi, beta.data(), data.X.cols) - data.y[static_cast<std::size_t>(i)]);
    for (std::size_t k = 0; k < data.X.cols; ++k) out[k] += w * xi[k];
  }
}

// Per-row importance weight for the send-all estimate. Row i reaches the
// master unless all d_i of its holders straggle, so scaling its gradient by
// 1/(m (1 - p^{d_i})) keeps the mean-gradient estimate unbiased for any
// degree mix; with uniform degrees this equals dividing the distinct-row sum
// by the expected received count m(1 - p^d).
double send_all_row_weight(const DegreeProfile& degrees, std::size_t i, double p_assumed,
                           std::size_t m) {
  const double survive =
      1.0 - std::pow(p_assumed, static_cast<double>(degrees.degrees[i]));
  if (survive <= 0.0)
    throw std::invalid_argument("aggregate: send-all row survival probability is zero");
  return 1.0 / (survive * static_cast<double>(m));
}

}  // namespace

Vector aggregate(const SchemeSpec& spec, const Assignment& a, const std::vector<int>& survivors,
                 const Dataset& data, const Vector& beta) {
  const std::size_t m = data.X.rows;
  const std::size_t ell = data.X.cols;
  const double p = spec.p_assumed;
  Vector out(ell, 0.0);
  switch (spec.kind) {
    case SchemeKind::SGC:
    case SchemeKind::BGC: {
      for (int j : survivors) {
        const Vector fj =
            worker_sum(a.worker_sets[static_cast<std::size_t>(j)], data, beta, a.degrees, p);
        for (std::size_t k = 0; k < ell; ++k) out[k] += fj[k];
      }
      for (auto& e : out) e /= static_cast<double>(m);
      return out;
    }
    case SchemeKind::ErasureHead: {
      if (p < 0.0 || p >= 1.0)
        throw std::invalid_argument("aggregate: p_assumed must lie in [0, 1)");
      std::set<const std::vector<int>*, SetPtrLess> seen;
      for (int j : survivors)
        seen.insert(&a.worker_sets[static_cast<std::size_t>(j)]);
      for (const auto* rows : seen) add_rows_unit(out, data, *rows, beta, 1.0);
      for (auto& e : out) e /= static_cast<double>(m);
      return out;
    }
    case SchemeKind::IgnoreStragglers: {
      if (p < 0.0 || p >= 1.0)
        throw std::invalid_argument("aggregate: p_assumed must lie in [0, 1)");
      for (int j : survivors)
        add_rows_unit(out, data, a.worker_sets[static_cast<std::size_t>(j)], beta, 1.0);
      const double scale = static_cast<double>(m) * (1.0 - p);
      for (auto& e : out) e /= scale;
      return out;
    }
    case SchemeKind::SGCSendAll: {
      if (p < 0.0 || p >= 1.0)
        throw std::invalid_argument("aggregate: p_assumed must lie in [0, 1)");
      std::vector<char> seen(m, 0);
      for (int j : survivors)
        for (int i : a.worker_sets[static_cast<std::size_t>(j)])
          seen[static_cast<std::size_t>(i)] = 1;
      for (std::size_t i = 0; i < m; ++i) {
        if (!seen[i]) continue;
        const double* xi = data.X.row(i);
        const double w = send_all_row_weight(a.degrees, i, p, m) *
                         (dot(xi, beta.data(), ell) - data.y[i]);
        for (std::size_t k = 0; k < ell; ++k) out[k] += w * xi[k];
      }
      return out;
    }
    case SchemeKind::ExactGD: {
      out = full_gradient(data, beta);
      for (auto& e : out) e /= static_cast<double>(m);
      return out;
    }
  }
  throw std::invalid_argument("aggregate: unknown scheme");
}

// ---- simulation loop ---------------------------------------------------------------------

namespace {

// Per-unit quadratic caches: with row weights w_i, the unit's contribution to
// the estimate at beta is G_u beta - h_u where G_u = sum w_i x_i x_i^T and
// h_u = sum w_i y_i x_i. Units are workers (SGC/BGC/IgnoreStragglers) or
// distinct blocks (ErasureHead); ExactGD keeps only the totals.
struct UnitCaches {
  int units = 0;
  std::vector<Matrix> G;
  std::vector<Vector> h;
  Matrix G_tot;
  Vector h_tot;
  std::vector<int> unit_of_worker;  // size n; which unit each worker feeds
};

void accumulate_unit(Matrix& G, Vector& h, const Dataset& data, int row, double w) {
  const std::size_t ell = data.X.cols;
  const double* xi = data.X.row(static_cast<std::size_t>(row));
  for (std::size_t r = 0; r < ell; ++r) {
    const double wr = w * xi[r];
    if (wr == 0.0) continue;
    double* gr = G.row(r);
    for (std::size_t c = 0; c < ell; ++c) gr[c] += wr * xi[c];
  }
  const double wy = w * data.y[static_cast<std::size_t>(row)];
  for (std::size_t c = 0; c < ell; ++c) h[c] += wy * xi[c];
}

UnitCaches build_unit_caches(const SchemeSpec& spec, const Dataset& data, const Assignment& a) {
  const std::size_t ell = data.X.cols;
  const double m = static_cast<double>(data.X.rows);
  const double p = spec.p_assumed;
  UnitCaches c;
  c.G_tot = Matrix(ell, ell);
  c.h_tot.assign(ell, 0.0);
  c.unit_of_worker.assign(static_cast<std::size_t>(a.n), 0);

  const auto finish_totals = [&] {
    for (int u = 0; u < c.units; ++u) {
      for (std::size_t k = 0; k < c.G[u].a.size(); ++k) c.G_tot.a[k] += c.G[u].a[k];
      for (std::size_t k = 0; k < ell; ++k) c.h_tot[k] += c.h[u][k];
    }
  };

  switch (spec.kind) {
    case SchemeKind::SGC:
    case SchemeKind::BGC:
    case SchemeKind::IgnoreStragglers: {
      c.units = a.n;
      c.G.assign(static_cast<std::size_t>(a.n), Matrix(ell, ell));
      c.h.assign(static_cast<std::size_t>(a.n), Vector(ell, 0.0));
      for (int j = 0; j < a.n; ++j) {
        c.unit_of_worker[static_cast<std::size_t>(j)] = j;
        for (int i : a.worker_sets[static_cast<std::size_t>(j)]) {
          const double w =
              spec.kind == SchemeKind::IgnoreStragglers
                  ? 1.0 / (m * (1.0 - p))
                  : 1.0 / (m * static_cast<double>(
                                   a.degrees.degrees[static_cast<std::size_t>(i)]) *
                           (1.0 - p));
          accumulate_unit(c.G[static_cast<std::size_t>(j)], c.h[static_cast<std::size_t>(j)],
                          data, i, w);
        }
      }
      finish_totals();
      return c;
    }
    case SchemeKind::ErasureHead: {
      std::vector<const std::vector<int>*> unit_rows;
      for (int j = 0; j < a.n; ++j) {
        const auto& s = a.worker_sets[static_cast<std::size_t>(j)];
        int found = -1;
        for (std::size_t u = 0; u < unit_rows.size(); ++u)
          if (*unit_rows[u] == s) {
            found = static_cast<int>(u);
            break;
          }
        if (found < 0) {
          found = static_cast<int>(unit_rows.size());
          unit_rows.push_back(&s);
        }
        c.unit_of_worker[static_cast<std::size_t>(j)] = found;
      }
      c.units = static_cast<int>(unit_rows.size());
      c.G.assign(static_cast<std::size_t>(c.units), Matrix(ell, ell));
      c.h.assign(static_cast<std::size_t>(c.units), Vector(ell, 0.0));
      for (int u = 0; u < c.units; ++u)
        for (int i : *unit_rows[static_cast<std::size_t>(u)])
          accumulate_unit(c.G[static_cast<std::size_t>(u)], c.h[static_cast<std::size_t>(u)],
                          data, i, 1.0 / m);
      finish_totals();
      return c;
    }
    case SchemeKind::ExactGD: {
      c.units = 0;
      for (std::size_t i = 0; i < data.X.rows; ++i)
        accumulate_unit(c.G_tot, c.h_tot, data, static_cast<int>(i), 1.0 / m);
      return c;
    }
    default:
      throw std::invalid_argument("build_unit_caches: scheme has no unit decomposition");
  }
}

// CSR adjacency row -> holder workers, plus weighted totals, for the send-all
// scheme (its estimate is a sum over the union of surviving rows, which is not
// a fixed-unit decomposition).
struct SendAllCaches {
  Matrix G_tot;
  Vector h_tot;
  std::vector<int> offsets;  // m + 1
  std::vector<int> holders;
  std::vector<double> row_w;  // per-row unbiased weights 1/(m (1 - p^{d_i}))
};

SendAllCaches build_send_all(const SchemeSpec& spec, const Dataset& data, const Assignment& a) {
  const std::size_t m = data.X.rows;
  const std::size_t ell = data.X.cols;
  SendAllCaches c;
  c.row_w.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    c.row_w[i] = send_all_row_weight(a.degrees, i, spec.p_assumed, m);
  c.G_tot = Matrix(ell, ell);
  c.h_tot.assign(ell, 0.0);
  for (std::size_t i = 0; i < m; ++i) accumulate_unit(c.G_tot, c.h_tot, data, (int)i, c.row_w[i]);
  std::vector<int> counts(m, 0);
  for (int j = 0; j < a.n; ++j)
    for (int i : a.worker_sets[static_cast<std::size_t>(j)]) ++counts[(std::size_t)i];
  c.offsets.assign(m + 1, 0);
  for (std::size_t i = 0; i < m; ++i) c.offsets[i + 1] = c.offsets[i] + counts[i];
  c.holders.resize(static_cast<std::size_t>(c.offsets[m]));
  std::vector<int> cursor(c.offsets.begin(), c.offsets.end() - 1);
  for (int j = 0; j < a.n; ++j)
    for (int i : a.worker_sets[static_cast<std::size_t>(j)])
      c.holders[static_cast<std::size_t>(cursor[(std::size_t)i]++)] = j;
  return c;
}

void apply_unit(const Matrix& G, const Vector& h, const Vector& beta, double sign, Vector& est) {
  const std::size_t ell = beta.size();
  for (std::size_t r = 0; r < ell; ++r)
    est[r] += sign * (dot(G.row(r), beta.data(), ell) - h[r]);
}

void add_row_term(const Dataset& data, std::size_t i, const Vector& beta, double scale,
                  double sign, Vector& est) {
  const std::size_t ell = beta.size();
  const double* xi = data.X.row(i);
  const double w = sign * scale * (dot(xi, beta.data(), ell) - data.y[i]);
  for (std::size_t k = 0; k < ell; ++k) est[k] += w * xi[k];
}

template <typename EstimateFn>
RunTrace run_loop(const SchemeSpec& spec, const StragglerModel& model, const Vector& beta0,
                  const Vector& beta_star, std::uint64_t T, const ProjectionSpec& proj,
                  const IterateSink& sink, EstimateFn&& estimate) {
  RunTrace trace;
  trace.scheme = scheme_name(spec.kind);
  trace.p = model.p;
  trace.nu = model.nu;
  trace.errors.reserve(T + 1);

  const std::size_t ell = beta0.size();
  Vector beta = beta0;
  Vector est(ell);
  Vector diff(ell);

  const auto record = [&](std::uint64_t t) {
    for (std::size_t k = 0; k < ell; ++k) diff[k] = beta[k] - beta_star[k];
    const double err = norm2(diff);
    if (!std::isfinite(err) || err > 1e100) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "run_scheme: diverged at iteration %llu (error %.17g)",
                    static_cast<unsigned long long>(t), err);
      throw std::runtime_error(buf);
    }
    trace.errors.push_back(err);
    if (sink) sink(t, beta);
  };

  record(0);
  for (std::uint64_t t = 1; t <= T; ++t) {
    std::fill(est.begin(), est.end(), 0.0);
    estimate(t - 1, beta, est);  // straggler rounds are 0-based
    const double gamma = step_size(spec.schedule, t) * spec.schedule.update_scale;
    for (std::size_t k = 0; k < ell; ++k) beta[k] -= gamma * est[k];
    if (proj.radius.has_value()) beta = project_ball(beta, proj);
    record(t);
  }
  return trace;
}

void validate_run_inputs(const SchemeSpec& spec, const Dataset& data, const Assignment& a,
                         const StragglerModel& model, const Vector& beta0,
                         const Vector& beta_star) {
  if (beta0.size() != data.X.cols || beta_star.size() != data.X.cols)
    throw std::invalid_argument("run_scheme: iterate dimension mismatch");
  if (a.n != model.n) throw std::invalid_argument("run_scheme: worker count mismatch");
  if (spec.kind != SchemeKind::ExactGD && a.degrees.degrees.size() != data.X.rows)
    throw std::invalid_argument("run_scheme: assignment covers a different row count");
  if (spec.p_assumed != model.p)
    throw std::invalid_argument("run_scheme: p_assumed must equal the model's p");
  if (model.p < 0.0 || model.p >= 1.0)
    throw std::invalid_argument("run_scheme: p must lie in [0, 1)");
  if (model.nu == 0) throw std::invalid_argument("run_scheme: nu must be >= 1");
}

}  // namespace

RunTrace run_scheme(const SchemeSpec& spec, const Dataset& data, const Assignment& a,
                    const StragglerModel& model, const Vector& beta0, const Vector& beta_star,
                    std::uint64_t T, const ProjectionSpec& proj, const IterateSink& sink) {
  validate_run_inputs(spec, data, a, model, beta0, beta_star);
  const std::size_t m = data.X.rows;
  std::vector<char> worker_alive(static_cast<std::size_t>(model.n));

  const auto fill_alive = [&](std::uint64_t round) {
    for (int j = 0; j < model.n; ++j)
      worker_alive[static_cast<std::size_t>(j)] = !is_straggler(model, round, j);
  };

  if (spec.kind == SchemeKind::SGCSendAll) {
    const SendAllCaches c = build_send_all(spec, data, a);
    std::vector<char> row_alive(m);
    return run_loop(spec, model, beta0, beta_star, T, proj, sink,
                    [&](std::uint64_t round, const Vector& beta, Vector& est) {
                      fill_alive(round);
                      std::size_t alive_count = 0;
                      for (std::size_t i = 0; i < m; ++i) {
                        char alive = 0;
                        for (int k = c.offsets[i]; k < c.offsets[i + 1]; ++k)
                          if (worker_alive[static_cast<std::size_t>(c.holders[(std::size_t)k])]) {
                            alive = 1;
                            break;
                          }
                        row_alive[i] = alive;
                        alive_count += static_cast<std::size_t>(alive);
                      }
                      if (alive_count <= m / 2) {
                        for (std::size_t i = 0; i < m; ++i)
                          if (row_alive[i]) add_row_term(data, i, beta, c.row_w[i], 1.0, est);
                      } else {
                        apply_unit(c.G_tot, c.h_tot, beta, 1.0, est);
                        for (std::size_t i = 0; i < m; ++i)
                          if (!row_alive[i]) add_row_term(data, i, beta, c.row_w[i], -1.0, est);
                      }
                    });
  }

  const UnitCaches c = build_unit_caches(spec, data, a);
  std::vector<char> unit_alive(static_cast<std::size_t>(std::max(c.units, 1)));
  return run_loop(spec, model, beta0, beta_star, T, proj, sink,
                  [&](std::uint64_t round, const Vector& beta, Vector& est) {
                    if (c.units == 0) {  // ExactGD
                      apply_unit(c.G_tot, c.h_tot, beta, 1.0, est);
                      return;
                    }
                    fill_alive(round);
                    std::fill(unit_alive.begin(), unit_alive.end(), 0);
                    for (int j = 0; j < model.n; ++j)
                      if (worker_alive[static_cast<std::size_t>(j)])
                        unit_alive[static_cast<std::size_t>(
                            c.unit_of_worker[static_cast<std::size_t>(j)])] = 1;
                    int alive_units = 0;
                    for (int u = 0; u < c.units; ++u)
                      alive_units += unit_alive[static_cast<std::size_t>(u)];
                    if (alive_units * 2 <= c.units) {
                      for (int u = 0; u < c.units; ++u)
                        if (unit_alive[static_cast<std::size_t>(u)])
                          apply_unit(c.G[(std::size_t)u], c.h[(std::size_t)u], beta, 1.0, est);
                    } else {
                      apply_unit(c.G_tot, c.h_tot, beta, 1.0, est);
                      for (int u = 0; u < c.units; ++u)
                        if (!unit_alive[static_cast<std::size_t>(u)])
                          apply_unit(c.G[(std::size_t)u], c.h[(std::size_t)u], beta, -1.0, est);
                    }
                  });
}

RunTrace run_scheme_reference(const SchemeSpec& spec, const Dataset& data, const Assignment& a,
                              const StragglerModel& model, const Vector& beta0,
                              const Vector& beta_star, std::uint64_t T,
                              const ProjectionSpec& proj, const IterateSink& sink) {
  validate_run_inputs(spec, data, a, model, beta0, beta_star);
  std::vector<int> survivors;
  return run_loop(spec, model, beta0, beta_star, T, proj, sink,
                  [&](std::uint64_t round, const Vector& beta, Vector& est) {
                    survivors.clear();
                    for (int j = 0; j < model.n; ++j)
                      if (!is_straggler(model, round, j)) survivors.push_back(j);
                    const Vector e = aggregate(spec, a, survivors, data, beta);
                    est = e;
                  });
}

// ---- moment oracles -------------------------------------------------------------------

Vector expected_estimate(const SchemeSpec& spec, const Assignment& a, const StragglerModel& model,
                         const Dataset& data, const Vector& beta) {
  if (model.nu != 1) throw std::invalid_argument("expected_estimate: requires nu == 1");
  const double p = model.p;
  const std::size_t m = data.X.rows;
  const std::size_t ell = data.X.cols;
  Vector out(ell, 0.0);
  switch (spec.kind) {
    case SchemeKind::SGC:
    case SchemeKind::BGC: {
      for (const auto& s : a.worker_sets) {
        const Vector fj = worker_sum(s, data, beta, a.degrees, spec.p_assumed);
        for (std::size_t k = 0; k < ell; ++k) out[k] += (1.0 - p) * fj[k];
      }
      for (auto& e : out) e /= static_cast<double>(m);
      return out;
    }
    case SchemeKind::ErasureHead: {
      // distinct blocks; a block survives unless all its d_b workers straggle
      std::vector<const std::vector<int>*> blocks;
      std::vector<int> sizes;
      for (const auto& s : a.worker_sets) {
        bool found = false;
        for (std::size_t u = 0; u < blocks.size(); ++u)
          if (*blocks[u] == s) {
            ++sizes[u];
            found = true;
            break;
          }
        if (!found) {
          blocks.push_back(&s);
          sizes.push_back(1);
        }
      }
      for (std::size_t u = 0; u < blocks.size(); ++u) {
        const double survive = 1.0 - std::pow(p, static_cast<double>(sizes[u]));
        add_rows_unit(out, data, *blocks[u], beta, survive);
      }
      for (auto& e : out) e /= static_cast<double>(m);
      return out;
    }
    case SchemeKind::IgnoreStragglers: {
      for (const auto& s : a.worker_sets) add_rows_unit(out, data, s, beta, 1.0 - p);
      const double scale = static_cast<double>(m) * (1.0 - spec.p_assumed);
      for (auto& e : out) e /= scale;
      return out;
    }
    case SchemeKind::SGCSendAll: {
      // row i reaches the master unless all of its holders straggle; the
      // master weights by the declared degree profile, so the two cancel
      // exactly whenever the assignment honors the profile
      std::vector<int> holder_count(m, 0);
      for (const auto& s : a.worker_sets)
        for (int i : s) ++holder_count[static_cast<std::size_t>(i)];
      for (std::size_t i = 0; i < m; ++i) {
        const double survive = 1.0 - std::pow(p, static_cast<double>(holder_count[i]));
        const double w = send_all_row_weight(a.degrees, i, spec.p_assumed, m);
        add_row_term(data, i, beta, survive * w, 1.0, out);
      }
      return out;
    }
    case SchemeKind::ExactGD: {
      out = full_gradient(data, beta);
      for (auto& e : out) e /= static_cast<double>(m);
      return out;
    }
  }
  throw std::invalid_argument("expected_estimate: unknown scheme");
}

double second_moment_oracle(const Assignment& a, double p, int i1, int i2) {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("second_moment_oracle: p must lie in [0, 1]");
  int d1 = 0, d2 = 0;
  for (const auto& s : a.worker_sets) {
    if (std::binary_search(s.begin(), s.end(), i1)) ++d1;
    if (std::binary_search(s.begin(), s.end(), i2)) ++d2;
  }
  const double q = 1.0 - p;
  if (i1 == i2) {
    const double d = static_cast<double>(d1);
    return d * p * q + d * d * q * q;
  }
  const double o = static_cast<double>(pairwise_overlap(a, i1, i2));
  return o * p * q + static_cast<double>(d1) * static_cast<double>(d2) * q * q;
}

}  // namespace sgc
