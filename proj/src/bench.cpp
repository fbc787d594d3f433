#include "hjr/bench.hpp"

#include "hjr/io.hpp"
#include "hjr/lsq.hpp"
#include "hjr/problems.hpp"
#include "hjr/riccati.hpp"
#include "hjr/rls.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#if defined(__linux__)
#include <sched.h>
#endif

namespace hjr {
namespace {

using Clock = std::chrono::steady_clock;

void pin_to_one_cpu() {
#if defined(__linux__)
  cpu_set_t current;
  CPU_ZERO(&current);
  if (sched_getaffinity(0, sizeof current, &current) != 0) return;
  for (int c = 0; c < CPU_SETSIZE; ++c) {
    if (CPU_ISSET(c, &current)) {
      cpu_set_t one;
      CPU_ZERO(&one);
      CPU_SET(c, &one);
      sched_setaffinity(0, sizeof one, &one);
      return;
    }
  }
#endif
}

DataBlock random_block(Rng& rng, Index n, Index m) {
  DataBlock b;
  b.phi.resize(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index i = 0; i < m; ++i)
    for (Index k = 0; k < n; ++k) b.phi(i, k) = scale * rng.normal();
  b.y.resize(m);
  for (Index i = 0; i < m; ++i) b.y(i) = rng.normal();
  b.lambda = 1.0;
  return b;
}

double sink = 0.0;

template <class Fn>
double median_seconds(Fn&& op, int reps, double min_batch) {
  // Warm-up, also used to size the batch.
  const auto t0 = Clock::now();
  sink += op();
  const double once = std::chrono::duration<double>(Clock::now() - t0).count();
  const int batch = std::max(1, static_cast<int>(std::ceil(min_batch / std::max(once, 1e-9))));

  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    const auto start = Clock::now();
    for (int b = 0; b < batch; ++b) sink += op();
    samples.push_back(std::chrono::duration<double>(Clock::now() - start).count() / batch);
  }
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(samples.size() / 2), samples.end());
  return samples[samples.size() / 2];
}

} // namespace

double BenchReport::growth() const {
  if (samples.size() < 2 || samples.front().seconds <= 0.0) return 1.0;
  return samples.back().seconds / samples.front().seconds;
}

BenchMethod parse_bench_method(std::string_view name) {
  if (name == "riccati") return BenchMethod::riccati;
  if (name == "rls") return BenchMethod::rls;
  if (name == "lsq") return BenchMethod::lsq;
  throw InvalidArgument("unknown bench method '" + std::string(name) + "' (expected riccati, rls or lsq)");
}

std::string_view bench_method_name(BenchMethod m) {
  switch (m) {
  case BenchMethod::riccati: return "riccati";
  case BenchMethod::rls: return "rls";
  case BenchMethod::lsq: return "lsq";
  }
  return "unknown";
}

BenchReport bench_incremental(Index n, Index m, std::span<const std::int64_t> sizes, BenchMethod method,
                              const BenchOptions& opts) {
  if (n < 1 || m < 1) throw InvalidArgument("bench needs n >= 1 and m >= 1");
  if (opts.repetitions < 20) throw InvalidArgument("bench needs at least 20 repetitions");
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw InvalidArgument("bench sizes must be ascending");
  pin_to_one_cpu();

  const std::int64_t largest = sizes.empty() ? 0 : sizes.back();
  Rng rng(opts.seed);
  std::vector<DataBlock> pool;
  pool.reserve(static_cast<std::size_t>(largest) + 1);
  for (std::int64_t i = 0; i <= largest; ++i) pool.push_back(random_block(rng, n, m));
  const Hyperparams hyper = Hyperparams::uniform(n, 1.0);
  IntegrationConfig cfg;
  cfg.step_h = opts.step_h;

  BenchReport rep;
  rep.method = std::string(bench_method_name(method));
  rep.n = n;
  rep.m = m;
  rep.repetitions = opts.repetitions;
  for (const std::int64_t size : sizes) {
    if (size < 0) throw InvalidArgument("bench sizes must be >= 0");
    const std::span<const DataBlock> prior(pool.data(), static_cast<std::size_t>(size));
    const DataBlock& extra = pool[static_cast<std::size_t>(size)];
    double seconds = 0.0;
    switch (method) {
    case BenchMethod::riccati: {
      const RiccatiState base = closed_form_state(hyper, prior);
      seconds = median_seconds([&] { return add_block(base, extra, cfg).q(0); }, opts.repetitions,
                               opts.min_batch_seconds);
      break;
    }
    case BenchMethod::rls: {
      const RiccatiState cf = closed_form_state(hyper, prior);
      const RlsState base{cf.p, cf.q, 0.0, cf.elapsed};
      seconds = median_seconds([&] { return rls_add(base, extra).q(0); }, opts.repetitions,
                               opts.min_batch_seconds);
      break;
    }
    case BenchMethod::lsq: {
      const std::span<const DataBlock> all(pool.data(), static_cast<std::size_t>(size) + 1);
      seconds = median_seconds([&] { return solve_direct(hyper, all).theta_star(0); }, opts.repetitions,
                               opts.min_batch_seconds);
      break;
    }
    }
    rep.samples.push_back({size, seconds});
  }
  return rep;
}

std::string bench_csv(std::span<const BenchReport> reports) {
  std::ostringstream os;
  os << "method,N,n,m,seconds_per_update\n";
  for (const auto& r : reports) {
    for (const auto& s : r.samples) {
      os << r.method << ',' << s.size << ',' << r.n << ',' << r.m << ',' << format_double(s.seconds) << '\n';
    }
  }
  return os.str();
}

} // namespace hjr
