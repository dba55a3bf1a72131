#include "sgc/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "sgc/rng.hpp"

namespace sgc {

namespace {

double recompute_avg(const std::vector<int>& degrees) {
  double s = 0.0;
  for (int d : degrees) s += d;
  return s / static_cast<double>(degrees.size());
}

}  // namespace

DegreeProfile replication_degrees(const Matrix& X, double d, int n, bool clamp_small_rows) {
  if (X.rows == 0 || X.cols == 0)
    throw std::invalid_argument("replication_degrees: empty matrix");
  if (n <= 0) throw std::invalid_argument("replication_degrees: n must be positive");
  if (d > static_cast<double>(n))
    throw std::invalid_argument("replication_degrees: average degree d exceeds worker count n");
  const double frob_sq = frobenius_sq(X);
  if (frob_sq == 0.0) throw std::invalid_argument("replication_degrees: zero matrix");

  DegreeProfile prof;
  prof.sigma = d * static_cast<double>(X.rows) / frob_sq;
  prof.degrees.resize(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double row_sq = dot(X.row(i), X.row(i), X.cols);
    long long di = std::llround(prof.sigma * row_sq);
    if (di < 1) {
      if (!clamp_small_rows) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "replication_degrees: row %zu rounds to degree 0", i);
        throw std::invalid_argument(buf);
      }
      di = 1;
    }
    if (di > n) di = n;
    prof.degrees[i] = static_cast<int>(di);
  }
  prof.avg_degree = recompute_avg(prof.degrees);
  return prof;
}

DegreeProfile constant_degrees(std::size_t m, int d, int n) {
  if (m == 0) throw std::invalid_argument("constant_degrees: m must be positive");
  if (d < 1 || d > n) throw std::invalid_argument("constant_degrees: need 1 <= d <= n");
  DegreeProfile prof;
  prof.degrees.assign(m, d);
  prof.sigma = 0.0;
  prof.avg_degree = static_cast<double>(d);
  return prof;
}

Assignment assign_replicated(const DegreeProfile& profile, int n, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("assign_replicated: n must be positive");
  Assignment a;
  a.n = n;
  a.degrees = profile;
  a.worker_sets.assign(static_cast<std::size_t>(n), {});
  RngStream rng(derive_seed({seed, kTagAssign}));
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < profile.degrees.size(); ++i) {
    const int di = profile.degrees[i];
    if (di < 1 || di > n) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "assign_replicated: degree %d of row %zu outside [1, %d]",
                    di, i, n);
      throw std::invalid_argument(buf);
    }
    // partial Fisher-Yates: the first di entries are a uniform di-subset
    std::iota(pool.begin(), pool.end(), 0);
    for (int k = 0; k < di; ++k) {
      const std::size_t r =
          static_cast<std::size_t>(k) + rng.next_below(static_cast<std::uint64_t>(n - k));
      std::swap(pool[static_cast<std::size_t>(k)], pool[r]);
      a.worker_sets[static_cast<std::size_t>(pool[static_cast<std::size_t>(k)])].push_back(
          static_cast<int>(i));
    }
  }
  for (auto& s : a.worker_sets) std::sort(s.begin(), s.end());
  return a;
}

Assignment assign_partition(std::size_t m, int n) {
  if (n <= 0) throw std::invalid_argument("assign_partition: n must be positive");
  if (static_cast<std::size_t>(n) > m)
    throw std::invalid_argument("assign_partition: more workers than rows");
  Assignment a;
  a.n = n;
  a.degrees.degrees.assign(m, 1);
  a.degrees.sigma = 0.0;
  a.degrees.avg_degree = 1.0;
  a.worker_sets.assign(static_cast<std::size_t>(n), {});
  // contiguous split: the first (m mod n) workers get one extra row
  const std::size_t base = m / static_cast<std::size_t>(n);
  const std::size_t extra = m % static_cast<std::size_t>(n);
  std::size_t next = 0;
  for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
    const std::size_t len = base + (j < extra ? 1 : 0);
    for (std::size_t k = 0; k < len; ++k) a.worker_sets[j].push_back(static_cast<int>(next++));
  }
  return a;
}

Assignment assign_fractional_repetition(std::size_t m, int n, int d) {
  if (n <= 0 || d <= 0)
    throw std::invalid_argument("assign_fractional_repetition: n and d must be positive");
  if (n % d != 0)
    throw std::invalid_argument("assign_fractional_repetition: d must divide n");
  const int blocks = n / d;
  if (static_cast<std::size_t>(blocks) > m)
    throw std::invalid_argument("assign_fractional_repetition: more blocks than rows");
  const Assignment part = assign_partition(m, blocks);
  Assignment a;
  a.n = n;
  a.degrees.degrees.assign(m, d);
  a.degrees.sigma = 0.0;
  a.degrees.avg_degree = static_cast<double>(d);
  a.worker_sets.assign(static_cast<std::size_t>(n), {});
  // workers j = b*d .. b*d + d - 1 form block b and replicate partition b
  for (int b = 0; b < blocks; ++b)
    for (int k = 0; k < d; ++k)
      a.worker_sets[static_cast<std::size_t>(b * d + k)] =
          part.worker_sets[static_cast<std::size_t>(b)];
  return a;
}

int pairwise_overlap(const Assignment& a, int i1, int i2) {
  int count = 0;
  for (const auto& s : a.worker_sets) {
    const bool has1 = std::binary_search(s.begin(), s.end(), i1);
    const bool has2 = std::binary_search(s.begin(), s.end(), i2);
    if (has1 && has2) ++count;
  }
  return count;
}

std::string assignment_to_text(const Assignment& a) {
  std::string out;
  for (const auto& s : a.worker_sets) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (k) out += ' ';
      out += std::to_string(s[k]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace sgc
