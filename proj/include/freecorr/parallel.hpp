#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace freecorr::parallel {

inline std::optional<std::size_t>& thread_override() {
  static std::optional<std::size_t> o;
  return o;
}

inline void set_max_threads(std::optional<std::size_t> n) { thread_override() = n; }

inline std::size_t max_threads() {
  if (thread_override()) return std::max<std::size_t>(std::size_t{1}, *thread_override());
  if (const char* env = std::getenv("FREECORR_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Deterministic parallel map over [0, n): the chunk grid is fixed by
// chunk_size alone, workers only race for whole chunks, and the caller
// combines parts in chunk order. Results are therefore independent of the
// worker count.
template <class Part, class Body>
std::vector<Part> chunked_map(std::uint64_t n, std::uint64_t chunk_size, Body&& body) {
  if (chunk_size == 0) throw std::invalid_argument("chunk size must be positive");
  const std::uint64_t n_chunks = n == 0 ? 0 : (n - 1) / chunk_size + 1;
  std::vector<Part> parts(static_cast<std::size_t>(n_chunks));
  const std::size_t workers =
      static_cast<std::size_t>(std::min<std::uint64_t>(max_threads(), std::max<std::uint64_t>(n_chunks, 1)));
  auto run_chunk = [&](std::uint64_t i) {
    const std::uint64_t begin = i * chunk_size;
    const std::uint64_t end = std::min<std::uint64_t>(n, begin + chunk_size);
    parts[static_cast<std::size_t>(i)] = body(begin, end, i);
  };
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < n_chunks; ++i) run_chunk(i);
    return parts;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= n_chunks) return;
      try {
        run_chunk(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return parts;
}

}  // namespace freecorr::parallel
