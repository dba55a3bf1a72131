#include "sgc/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgc/experiments.hpp"

namespace sgc {

namespace {

using nlohmann::json;

// ---- config file <-> ExperimentConfig ----------------------------------------------------

[[noreturn]] void bad_config(const std::string& what) {
  throw std::invalid_argument("config: " + what);
}

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) bad_config(std::string("unknown key '") + item.key() + "' in " + where);
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    bad_config(std::string("field '") + key + "' has the wrong type");
  }
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) bad_config("top level must be an object");
  check_keys(j, "the top level",
             {"data", "workers", "redundancy", "schemes", "p_values", "nu_values", "iterations",
              "repetitions", "floor_window", "seed", "threads", "schedule", "step_normalization",
              "projection", "bounds"});
  ExperimentConfig cfg;

  if (j.contains("data")) {
    const json& d = j.at("data");
    if (!d.is_object()) bad_config("'data' must be an object");
    check_keys(d, "'data'",
               {"kind", "m", "ell", "feature_std", "label_noise_std", "coeff_low", "coeff_high",
                "path", "has_header"});
    std::string kind = "synthetic";
    read_field(d, "kind", kind);
    if (kind == "synthetic") {
      cfg.data.is_csv = false;
      read_field(d, "m", cfg.data.synth.m);
      read_field(d, "ell", cfg.data.synth.ell);
      read_field(d, "feature_std", cfg.data.synth.feature_std);
      read_field(d, "label_noise_std", cfg.data.synth.label_noise_std);
      read_field(d, "coeff_low", cfg.data.synth.coeff_low);
      read_field(d, "coeff_high", cfg.data.synth.coeff_high);
    } else if (kind == "csv") {
      cfg.data.is_csv = true;
      read_field(d, "path", cfg.data.csv_path);
      read_field(d, "has_header", cfg.data.csv_has_header);
      if (cfg.data.csv_path.empty()) bad_config("'data.path' is required for csv data");
    } else {
      bad_config("'data.kind' must be 'synthetic' or 'csv'");
    }
  }

  read_field(j, "workers", cfg.workers);
  read_field(j, "redundancy", cfg.redundancy);

  if (j.contains("schemes")) {
    const json& s = j.at("schemes");
    if (!s.is_array() || s.empty()) bad_config("'schemes' must be a non-empty array");
    for (const auto& name : s) {
      if (!name.is_string()) bad_config("'schemes' entries must be strings");
      cfg.schemes.push_back(scheme_from_name(name.get<std::string>()));
    }
  }

  read_field(j, "p_values", cfg.p_values);
  if (j.contains("nu_values")) {
    cfg.nu_values.clear();
    read_field(j, "nu_values", cfg.nu_values);
  }
  read_field(j, "iterations", cfg.iterations);
  read_field(j, "repetitions", cfg.repetitions);
  read_field(j, "floor_window", cfg.floor_window);
  read_field(j, "seed", cfg.master_seed);
  read_field(j, "threads", cfg.threads);

  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    if (!s.is_object()) bad_config("'schedule' must be an object");
    check_keys(s, "'schedule'",
               {"variant", "scale", "power", "log_base_exponent", "epsilon", "spectral_norm",
                "lambda"});
    std::string variant = "empirical";
    read_field(s, "variant", variant);
    if (variant == "empirical")
      cfg.schedule.kind = StepSchedule::Kind::Empirical;
    else if (variant == "theorem_l2")
      cfg.schedule.kind = StepSchedule::Kind::TheoremL2;
    else if (variant == "inverse_lambda_t")
      cfg.schedule.kind = StepSchedule::Kind::InverseLambdaT;
    else
      bad_config("'schedule.variant' must be empirical, theorem_l2 or inverse_lambda_t");
    read_field(s, "scale", cfg.schedule.scale);
    read_field(s, "power", cfg.schedule.power);
    read_field(s, "log_base_exponent", cfg.schedule.log_base_exponent);
    read_field(s, "epsilon", cfg.schedule.epsilon);
    read_field(s, "spectral_norm", cfg.schedule.spectral_norm);  // <= 0 resolves from the data
    read_field(s, "lambda", cfg.schedule.lambda);                // <= 0 resolves from the data
  }

  if (j.contains("step_normalization")) {
    const std::string n = j.at("step_normalization").is_string()
                              ? j.at("step_normalization").get<std::string>()
                              : std::string();
    if (n == "none")
      cfg.normalization = StepNormalization::None;
    else if (n == "inverse_spectral_norm")
      cfg.normalization = StepNormalization::InverseSpectralNorm;
    else if (n == "sum_gradient")
      cfg.normalization = StepNormalization::SumGradient;
    else
      bad_config("'step_normalization' must be none, inverse_spectral_norm or sum_gradient");
  }

  if (j.contains("projection")) {
    const json& pr = j.at("projection");
    if (!pr.is_object()) bad_config("'projection' must be an object");
    check_keys(pr, "'projection'", {"mode", "radius", "scale"});
    std::string mode = "none";
    read_field(pr, "mode", mode);
    if (mode == "none")
      cfg.projection.mode = ProjectionConfig::Mode::None;
    else if (mode == "fixed")
      cfg.projection.mode = ProjectionConfig::Mode::Fixed;
    else if (mode == "contain_optimum")
      cfg.projection.mode = ProjectionConfig::Mode::ContainOptimum;
    else
      bad_config("'projection.mode' must be none, fixed or contain_optimum");
    read_field(pr, "radius", cfg.projection.radius);
    read_field(pr, "scale", cfg.projection.scale);
  }

  if (j.contains("bounds")) {
    const json& b = j.at("bounds");
    if (!b.is_object()) bad_config("'bounds' must be an object");
    check_keys(b, "'bounds'", {"epsilon", "lambda", "c_sq"});
    read_field(b, "epsilon", cfg.bounds_epsilon);
    read_field(b, "lambda", cfg.bounds_lambda);
    read_field(b, "c_sq", cfg.bounds_c_sq);
  }

  if (cfg.schemes.empty()) bad_config("'schemes' is required");
  if (cfg.p_values.empty()) bad_config("'p_values' is required");
  if (cfg.workers <= 0) bad_config("'workers' must be positive");
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  if (cfg.data.is_csv) {
    j["data"] = {{"kind", "csv"}, {"path", cfg.data.csv_path},
                 {"has_header", cfg.data.csv_has_header}};
  } else {
    j["data"] = {{"kind", "synthetic"},         {"m", cfg.data.synth.m},
                 {"ell", cfg.data.synth.ell},   {"feature_std", cfg.data.synth.feature_std},
                 {"label_noise_std", cfg.data.synth.label_noise_std},
                 {"coeff_low", cfg.data.synth.coeff_low},
                 {"coeff_high", cfg.data.synth.coeff_high}};
  }
  j["workers"] = cfg.workers;
  j["redundancy"] = cfg.redundancy;
  json schemes = json::array();
  for (SchemeKind k : cfg.schemes) schemes.push_back(scheme_name(k));
  j["schemes"] = schemes;
  j["p_values"] = cfg.p_values;
  j["nu_values"] = cfg.nu_values;
  j["iterations"] = cfg.iterations;
  j["repetitions"] = cfg.repetitions;
  j["floor_window"] = cfg.floor_window;
  j["seed"] = cfg.master_seed;
  j["threads"] = cfg.threads;
  switch (cfg.schedule.kind) {
    case StepSchedule::Kind::Empirical:
      j["schedule"] = {{"variant", "empirical"},
                       {"scale", cfg.schedule.scale},
                       {"power", cfg.schedule.power},
                       {"log_base_exponent", cfg.schedule.log_base_exponent}};
      break;
    case StepSchedule::Kind::TheoremL2:
      j["schedule"] = {{"variant", "theorem_l2"},
                       {"epsilon", cfg.schedule.epsilon},
                       {"spectral_norm", cfg.schedule.spectral_norm}};
      break;
    case StepSchedule::Kind::InverseLambdaT:
      j["schedule"] = {{"variant", "inverse_lambda_t"}, {"lambda", cfg.schedule.lambda}};
      break;
  }
  switch (cfg.normalization) {
    case StepNormalization::None: j["step_normalization"] = "none"; break;
    case StepNormalization::InverseSpectralNorm:
      j["step_normalization"] = "inverse_spectral_norm";
      break;
    case StepNormalization::SumGradient: j["step_normalization"] = "sum_gradient"; break;
  }
  switch (cfg.projection.mode) {
    case ProjectionConfig::Mode::None: j["projection"] = {{"mode", "none"}}; break;
    case ProjectionConfig::Mode::Fixed:
      j["projection"] = {{"mode", "fixed"}, {"radius", cfg.projection.radius}};
      break;
    case ProjectionConfig::Mode::ContainOptimum:
      j["projection"] = {{"mode", "contain_optimum"}, {"scale", cfg.projection.scale}};
      break;
  }
  j["bounds"] = {{"epsilon", cfg.bounds_epsilon},
                 {"lambda", cfg.bounds_lambda},
                 {"c_sq", cfg.bounds_c_sq}};
  return j;
}

// ---- --set dot-path overrides --------------------------------------------------------------

void apply_override(json& root, const std::string& spec) {
  const std::size_t eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("--set expects key.path=value, got '" + spec + "'");
  const std::string path = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;  // unquoted strings pass through verbatim
  }
  json* cur = &root;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw std::invalid_argument("--set: empty key segment in '" + path + "'");
    if (dot == std::string::npos) {
      (*cur)[key] = value;
      return;
    }
    if (!cur->contains(key) || !(*cur)[key].is_object()) (*cur)[key] = json::object();
    cur = &(*cur)[key];
    start = dot + 1;
  }
}

json load_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::invalid_argument("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::uint64_t threads = 0;
  bool threads_given = false;
};

ExperimentConfig resolve_config(const CommonArgs& args) {
  json j = load_config_json(args.config_path);
  for (const auto& o : args.overrides) apply_override(j, o);
  ExperimentConfig cfg = config_from_json(j);
  if (args.seed_given) cfg.master_seed = args.seed;
  if (args.threads_given) cfg.threads = args.threads;
  return cfg;
}

void echo_config(const ExperimentConfig& cfg) {
  std::cout << "resolved-config: " << config_to_json(cfg).dump() << "\n";
}

// ---- subcommand bodies -----------------------------------------------------------------------

int cmd_run(const CommonArgs& args) {
  const ExperimentConfig cfg = resolve_config(args);
  echo_config(cfg);
  const InstanceInfo inst = prepare_instance(cfg);
  const RunTrace trace = run_cell(inst, cfg, 0, 0, 0, 0);
  std::cout << "scheme=" << trace.scheme << " p=" << format_g17(trace.p)
            << " nu=" << trace.nu << " iterations=" << (trace.errors.size() - 1) << "\n";
  std::cout << "final_error=" << format_g17(trace.errors.back()) << "\n";
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  const ExperimentConfig cfg = resolve_config(args);
  echo_config(cfg);
  const ExperimentResult res = run_experiment(cfg);
  for (const auto& f : res.failures)
    std::cerr << "cell-failure scheme=" << f.scheme << " p=" << format_g17(f.p)
              << " nu=" << f.nu << " run=" << f.run << ": " << f.message << "\n";
  if (res.traces.empty()) throw std::runtime_error("sweep: every cell failed");
  write_traces(res.traces, res.summary, args.out_dir);
  std::cout << "wrote " << args.out_dir << "/traces.csv (" << res.traces.size() << " traces)\n";
  std::cout << "wrote " << args.out_dir << "/summary.csv (" << res.summary.size() << " rows)\n";
  return 0;
}

// mean of final squared errors of the named scheme at p, from a traces.csv
bool empirical_final_mse(const std::string& csv_path, const std::string& scheme, double p,
                         double* out) {
  std::ifstream in(csv_path);
  if (!in.good()) return false;
  std::string line;
  if (!std::getline(in, line)) return false;  // header
  // collect the last error of every matching (run) trace
  std::string want_p = format_g17(p);
  std::map<std::string, double> last_by_run;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string f_scheme, f_p, f_nu, f_run, f_it, f_err;
    if (!std::getline(ss, f_scheme, ',') || !std::getline(ss, f_p, ',') ||
        !std::getline(ss, f_nu, ',') || !std::getline(ss, f_run, ',') ||
        !std::getline(ss, f_it, ',') || !std::getline(ss, f_err, ','))
      continue;
    if (f_scheme != scheme || f_p != want_p) continue;
    last_by_run[f_nu + ":" + f_run] = std::strtod(f_err.c_str(), nullptr);
  }
  if (last_by_run.empty()) return false;
  double acc = 0.0;
  for (const auto& kv : last_by_run) acc += kv.second * kv.second;
  *out = acc / static_cast<double>(last_by_run.size());
  return true;
}

int cmd_bounds(const CommonArgs& args) {
  const ExperimentConfig cfg = resolve_config(args);
  echo_config(cfg);
  const InstanceInfo inst = prepare_instance(cfg);
  const std::string traces_csv = args.out_dir + "/traces.csv";
  for (double p : cfg.p_values) {
    const BoundInputs b = bounds_for(inst, cfg, p);
    std::cout << "p=" << format_g17(p);
    std::string thm3;
    try {
      thm3 = format_g17(thm3_bound(b));
    } catch (const std::invalid_argument& e) {
      thm3 = std::string("inapplicable(") + e.what() + ")";
    }
    std::cout << " thm3_bound=" << thm3;
    std::cout << " thm4_bound=" << format_g17(thm4_bound(b));
    double emp = 0.0;
    if (empirical_final_mse(traces_csv, scheme_name(cfg.schemes.front()), p, &emp))
      std::cout << " empirical_final_mse=" << format_g17(emp);
    std::cout << "\n";
  }
  return 0;
}

int cmd_inspect(const CommonArgs& args) {
  const ExperimentConfig cfg = resolve_config(args);
  echo_config(cfg);
  const InstanceInfo inst = prepare_instance(cfg);
  const SchemeKind kind = cfg.schemes.front();
  const std::uint64_t cell_seed = derive_seed({cfg.master_seed, kTagCell, 0, 0, 0, 0});
  const std::size_t m = inst.data.X.rows;
  Assignment a;
  switch (kind) {
    case SchemeKind::SGC:
    case SchemeKind::SGCSendAll: a = assign_replicated(inst.profile, cfg.workers, cell_seed); break;
    case SchemeKind::BGC: a = assign_replicated(inst.bgc_profile, cfg.workers, cell_seed); break;
    case SchemeKind::ErasureHead:
      a = assign_fractional_repetition(m, cfg.workers,
                                       static_cast<int>(std::llround(cfg.redundancy)));
      break;
    default: a = assign_partition(m, cfg.workers); break;
  }

  std::cout << "scheme=" << scheme_name(kind) << " workers=" << a.n << " rows=" << m << "\n";
  std::cout << "avg_degree=" << format_g17(a.degrees.avg_degree)
            << " sigma=" << format_g17(a.degrees.sigma) << "\n";
  std::cout << "degrees:";
  for (int d : a.degrees.degrees) std::cout << ' ' << d;
  std::cout << "\n";

  // pairwise overlap statistics via per-row worker bitmasks
  const std::size_t words = (static_cast<std::size_t>(a.n) + 63) / 64;
  std::vector<std::uint64_t> masks(m * words, 0);
  for (int j = 0; j < a.n; ++j)
    for (int i : a.worker_sets[static_cast<std::size_t>(j)])
      masks[static_cast<std::size_t>(i) * words + static_cast<std::size_t>(j) / 64] |=
          1ULL << (static_cast<std::size_t>(j) % 64);
  double total = 0.0;
  long long lo = -1, hi = -1;
  std::size_t pairs = 0;
  for (std::size_t i1 = 0; i1 < m; ++i1)
    for (std::size_t i2 = i1 + 1; i2 < m; ++i2) {
      long long o = 0;
      for (std::size_t w = 0; w < words; ++w)
        o += __builtin_popcountll(masks[i1 * words + w] & masks[i2 * words + w]);
      total += static_cast<double>(o);
      lo = lo < 0 ? o : std::min(lo, o);
      hi = std::max(hi, o);
      ++pairs;
    }
  if (pairs > 0)
    std::cout << "overlap: mean=" << format_g17(total / static_cast<double>(pairs))
              << " min=" << lo << " max=" << hi << " pairs=" << pairs << "\n";
  else
    std::cout << "overlap: no row pairs\n";
  return 0;
}

void add_common(CLI::App* sub, CommonArgs& args, bool with_out) {
  sub->add_option("--config", args.config_path, "JSON experiment configuration")->required();
  sub->add_option("--set", args.overrides,
                  "override a config field, dot path = JSON value (repeatable)");
  sub->add_option("--seed", args.seed, "override the master seed")
      ->each([&args](const std::string&) { args.seed_given = true; });
  sub->add_option("--threads", args.threads, "override the worker thread count")
      ->each([&args](const std::string&) { args.threads_given = true; });
  if (with_out) sub->add_option("--out", args.out_dir, "output directory (default: out)");
}

}  // namespace

int dispatch(int argc, char** argv) {
  CLI::App app{"straggler-tolerant distributed gradient descent simulator"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* run = app.add_subcommand("run", "run one (scheme, p, nu) cell and print the final error");
  add_common(run, args, false);
  CLI::App* sweep = app.add_subcommand("sweep", "run the full sweep and write traces/summary CSVs");
  add_common(sweep, args, true);
  CLI::App* bounds = app.add_subcommand(
      "bounds", "evaluate the convergence bounds (and empirical errors if traces exist)");
  add_common(bounds, args, true);
  CLI::App* inspect = app.add_subcommand(
      "inspect-assignment", "print degrees and overlap statistics of the first cell's placement");
  add_common(inspect, args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (run->parsed()) return cmd_run(args);
    if (sweep->parsed()) return cmd_sweep(args);
    if (bounds->parsed()) return cmd_bounds(args);
    if (inspect->parsed()) return cmd_inspect(args);
    std::cerr << "error: no subcommand selected\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace sgc
