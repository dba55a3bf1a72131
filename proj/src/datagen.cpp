#include "sgc/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sgc/rng.hpp"

namespace sgc {

Dataset generate_synthetic(const SynthConfig& cfg) {
  if (cfg.m == 0 || cfg.ell == 0)
    throw std::invalid_argument("generate_synthetic: m and ell must be positive");
  if (cfg.coeff_low > cfg.coeff_high)
    throw std::invalid_argument("generate_synthetic: coeff_low > coeff_high");

  Dataset ds;
  ds.X = Matrix(cfg.m, cfg.ell);
  RngStream features(derive_seed({cfg.seed, kTagData}));
  for (auto& e : ds.X.a) e = cfg.feature_std * features.next_gaussian();

  Vector beta_bar(cfg.ell);
  RngStream coeffs(derive_seed({cfg.seed, kTagCoeffs}));
  const std::uint64_t span = static_cast<std::uint64_t>(cfg.coeff_high - cfg.coeff_low) + 1;
  for (auto& c : beta_bar)
    c = static_cast<double>(cfg.coeff_low + static_cast<long long>(coeffs.next_below(span)));

  ds.y.resize(cfg.m);
  RngStream noise(derive_seed({cfg.seed, kTagNoise}));
  for (std::size_t i = 0; i < cfg.m; ++i)
    ds.y[i] = dot(ds.X.row(i), beta_bar.data(), cfg.ell) + cfg.label_noise_std * noise.next_gaussian();

  ds.beta_bar = std::move(beta_bar);
  return ds;
}

namespace {

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "load_csv: line %zu: %s", line_no, what.c_str());
  throw std::invalid_argument(buf);
}

}  // namespace

Dataset load_csv(const std::string& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw std::invalid_argument("load_csv: cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (has_header && line_no == 1) continue;
    if (line.empty()) fail_line(line_no, "empty line");
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t consumed = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &consumed);
      } catch (const std::exception&) {
        fail_line(line_no, "non-numeric field '" + cell + "'");
      }
      while (consumed < cell.size() &&
             (cell[consumed] == ' ' || cell[consumed] == '\t'))
        ++consumed;
      if (consumed != cell.size()) fail_line(line_no, "non-numeric field '" + cell + "'");
      if (!std::isfinite(v)) fail_line(line_no, "non-finite value '" + cell + "'");
      fields.push_back(v);
    }
    if (fields.size() < 2) fail_line(line_no, "need at least one feature and a label");
    if (width == 0) {
      width = fields.size();
    } else if (fields.size() != width) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "expected %zu fields, found %zu", width, fields.size());
      fail_line(line_no, buf);
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw std::invalid_argument("load_csv: no data rows in " + path);

  Dataset ds;
  ds.X = Matrix(rows.size(), width - 1);
  ds.y.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j + 1 < width; ++j) ds.X.at(i, j) = rows[i][j];
    ds.y[i] = rows[i][width - 1];
  }
  return ds;
}

}  // namespace sgc
