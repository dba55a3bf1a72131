#pragma once
// Straggler set generation: iid Bernoulli(p) per worker per round, with
// optional nu-persistence (the set is frozen within blocks of nu consecutive
// rounds and redrawn independently across blocks). nu = 1 is the iid model.

#include <cstdint>
#include <vector>

#include "sgc/rng.hpp"

namespace sgc {

struct StragglerModel {
  double p = 0.0;        // per-worker straggle probability, in [0, 1]
  std::uint64_t nu = 1;  // rounds between re-draws, >= 1
  int n = 0;             // worker count
  std::uint64_t seed = 0;
};

// Pure function of (seed, floor(t/nu), worker): usable out of order and from
// any thread without shared state.
inline bool is_straggler(const StragglerModel& model, std::uint64_t t, int worker) {
  const std::uint64_t block = t / model.nu;
  const std::uint64_t key =
      derive_seed({model.seed, kTagStraggle, block, static_cast<std::uint64_t>(worker)});
  const double u = static_cast<double>(key >> 11) * 0x1.0p-53;
  return u < model.p;
}

// The straggler set at round t (sorted worker indices).
std::vector<int> sample_round(const StragglerModel& model, std::uint64_t t);

}  // namespace sgc
