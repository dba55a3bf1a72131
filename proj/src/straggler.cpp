#include "sgc/straggler.hpp"

#include <stdexcept>

namespace sgc {

std::vector<int> sample_round(const StragglerModel& model, std::uint64_t t) {
  if (model.n <= 0) throw std::invalid_argument("sample_round: n must be positive");
  if (model.nu == 0) throw std::invalid_argument("sample_round: nu must be >= 1");
  if (model.p < 0.0 || model.p > 1.0)
    throw std::invalid_argument("sample_round: p must lie in [0, 1]");
  std::vector<int> out;
  for (int j = 0; j < model.n; ++j)
    if (is_straggler(model, t, j)) out.push_back(j);
  return out;
}

}  // namespace sgc
