#pragma once
// Synthetic regression data generation and CSV ingestion.

#include <cstdint>
#include <optional>
#include <string>

#include "sgc/numerics.hpp"

namespace sgc {

struct Dataset {
  Matrix X;                         // m x ell data matrix
  Vector y;                         // m labels
  std::optional<Vector> beta_bar;   // planted model (synthetic data only)
};

struct SynthConfig {
  std::size_t m = 0;
  std::size_t ell = 0;
  double feature_std = 10.0;       // features iid N(0, feature_std^2)
  double label_noise_std = 1.0;    // labels <x_i, beta_bar> + N(0, label_noise_std^2)
  long long coeff_low = 1;         // beta_bar entries: uniform integers
  long long coeff_high = 10;       //   in [coeff_low, coeff_high]
  std::uint64_t seed = 0;
};

// Deterministic per seed; distinct sub-streams are used for features, planted
// coefficients and label noise so the three never interleave.
Dataset generate_synthetic(const SynthConfig& cfg);

// Comma-separated numeric rows, last field is the label; optional single
// header line. Rejects ragged rows, non-numeric fields and non-finite values
// with the offending line number.
Dataset load_csv(const std::string& path, bool has_header);

}  // namespace sgc
