#pragma once

// Per-update cost of adding one block to a model that already holds N blocks.

#include "hjr/core.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hjr {

enum class BenchMethod { riccati, rls, lsq };

struct BenchSample {
  std::int64_t size = 0;     // N, blocks already absorbed
  double seconds = 0.0;      // median seconds per update
};

struct BenchReport {
  std::string method;
  Index n = 0;
  Index m = 0;
  int repetitions = 0;
  std::vector<BenchSample> samples;

  /// seconds at the largest N over seconds at the smallest.
  double growth() const;
};

struct BenchOptions {
  int repetitions = 21;       // timed samples per N (median reported)
  double step_h = 1e-3;       // riccati only
  std::uint64_t seed = 0;
  double min_batch_seconds = 2e-4; // each timed sample repeats the update until this long
};

BenchMethod parse_bench_method(std::string_view name);
std::string_view bench_method_name(BenchMethod m);

/// Sizes must be ascending. Runs on the calling thread, pinned to one CPU when
/// the platform allows it.
BenchReport bench_incremental(Index n, Index m, std::span<const std::int64_t> sizes, BenchMethod method,
                              const BenchOptions& opts = {});

/// Rows of `method,N,n,m,seconds_per_update` with a header line.
std::string bench_csv(std::span<const BenchReport> reports);

} // namespace hjr
