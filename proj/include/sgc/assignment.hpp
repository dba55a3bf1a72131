#pragma once
// Replication degrees and data-to-worker placements for all schemes:
// norm-weighted random replication, constant-degree replication, contiguous
// partitioning, and fractional repetition (block) placement.

#include <cstdint>
#include <string>
#include <vector>

#include "sgc/numerics.hpp"

namespace sgc {

struct DegreeProfile {
  std::vector<int> degrees;  // d_i, one per data row, each in [1, n]
  double sigma = 0.0;        // proportionality constant d_i ~ round(sigma * ||x_i||^2)
  double avg_degree = 0.0;   // (1/m) sum_i d_i, recomputed from the rounded values
};

struct Assignment {
  std::vector<std::vector<int>> worker_sets;  // S_j: sorted row indices per worker
  DegreeProfile degrees;
  int n = 0;  // worker count
};

// Norm-proportional degrees: sigma = d*m / ||X||_F^2, d_i = round(sigma *
// ||x_i||^2) clamped into [1, n]. With clamp_small_rows disabled, a row whose
// rounded degree is 0 (e.g. an all-zero row) is an error instead of being
// raised to 1. Throws if d > n.
DegreeProfile replication_degrees(const Matrix& X, double d, int n, bool clamp_small_rows = true);

// Constant-degree profile (every row replicated exactly d times).
DegreeProfile constant_degrees(std::size_t m, int d, int n);

// Each row i is placed on a uniformly random d_i-subset of the n workers;
// deterministic per seed. Throws if any d_i > n.
Assignment assign_replicated(const DegreeProfile& profile, int n, std::uint64_t seed);

// Contiguous near-equal partition, sizes differing by at most one, d_i = 1.
Assignment assign_partition(std::size_t m, int n);

// Workers grouped into n/d blocks of d; data split into n/d near-equal
// contiguous partitions; every worker of block b holds all of partition b.
// Requires d | n and n/d <= m.
Assignment assign_fractional_repetition(std::size_t m, int n, int d);

// |{j : i1 in S_j and i2 in S_j}|.
int pairwise_overlap(const Assignment& a, int i1, int i2);

// Audit format: one line per worker, space-separated 0-based row indices.
std::string assignment_to_text(const Assignment& a);

}  // namespace sgc
