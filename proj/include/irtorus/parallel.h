#pragma once

// Deterministic work partitioning.
//
// Work is always cut into chunks whose boundaries depend only on the problem
// size and a fixed chunk length, never on the number of workers. Each chunk
// produces one partial result and partials are combined in chunk order, so
// floating-point reductions are bit-identical for any worker count.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace irtorus {

/// Number of worker threads. Read once from IRTORUS_WORKERS (default: the
/// hardware concurrency), and overridable with set_worker_count().
int worker_count();
void set_worker_count(int workers);

inline std::size_t chunk_count(std::size_t n, std::size_t chunk) {
  return chunk == 0 ? 0 : (n + chunk - 1) / chunk;
}

/// Calls body(chunk_index, begin, end) for every chunk of [0, n). Chunks may
/// run concurrently; the first exception thrown by a body is rethrown.
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Sum of term(i) for i in [0, n), compensated within each chunk and combined
/// in chunk order.
double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& term,
                         std::size_t chunk = 4096);

/// Maps each chunk [b, e) to a value of type T; results come back in chunk order.
template <class T, class F>
std::vector<T> map_chunks(std::size_t n, std::size_t chunk, F&& fn) {
  std::vector<T> out(chunk_count(n, chunk));
  parallel_chunks(n, chunk,
                  [&](std::size_t c, std::size_t b, std::size_t e) { out[c] = fn(b, e); });
  return out;
}

}  // namespace irtorus
