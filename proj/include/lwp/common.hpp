#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lwp {

/// Error raised while reading an edge-list file; carries the 1-based line number.
class parse_error : public std::runtime_error {
public:
  parse_error(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// splitmix64: bijective 64-bit mixer used to derive independent seed streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed for the per-link random stream: mixes the run seed with the canonical
/// (min,max) node pair so sample construction is order-independent.
inline std::uint64_t link_seed(std::uint64_t run_seed, int u, int v) {
  const std::uint64_t a = static_cast<std::uint64_t>(std::min(u, v));
  const std::uint64_t b = static_cast<std::uint64_t>(std::max(u, v));
  return mix64(mix64(run_seed) ^ (a << 32 | b));
}

/// In-place Fisher-Yates shuffle. std::shuffle's draw sequence is
/// implementation-defined, so the shuffle is spelled out to keep seeded runs
/// reproducible across standard libraries.
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

/// Uniform double in [0,1) from the top 53 bits of the generator.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Worker count for parallel sections; LWP_WORKERS overrides, default = hardware.
inline unsigned worker_count() {
  if (const char* env = std::getenv("LWP_WORKERS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Index-space parallel for. Results must be written to disjoint slots so the
/// outcome is identical to the serial loop regardless of worker count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = worker_count();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const unsigned used = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  pool.reserve(used);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += used) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lwp
