#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rpareto {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Covariance factorization failed even after the jitter ladder.
class SingularCovariance : public std::runtime_error {
public:
  SingularCovariance(const std::string& msg, int pivot)
      : std::runtime_error(msg), pivot_index(pivot) {}
  int pivot_index;
};

/// All optimization starts failed to converge.
class NonConvergence : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::atomic<int>& max_threads_ref() {
  static std::atomic<int> n{static_cast<int>(std::thread::hardware_concurrency())};
  return n;
}

inline void set_max_threads(int n) { max_threads_ref().store(n > 0 ? n : 1); }
inline int max_threads() { return std::max(1, max_threads_ref().load()); }

namespace detail {
inline bool& in_parallel_flag() {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

/// Runs body(i) for i in [0, n). Each invocation must touch only its own
/// output slot; the partition is by index so results never depend on the
/// thread count. Nested calls run serially.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  const int nt = max_threads();
  if (n == 0) return;
  if (nt <= 1 || n == 1 || detail::in_parallel_flag()) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(nt, n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&]() {
    detail::in_parallel_flag() = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        break;
      }
    }
    detail::in_parallel_flag() = false;
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Deterministic parallel reduction: terms are computed concurrently but
/// summed in index order.
template <class F>
double parallel_sum(std::size_t n, F&& term) {
  std::vector<double> vals(n);
  parallel_for(n, [&](std::size_t i) { vals[i] = term(i); });
  double s = 0.0;
  for (double v : vals) s += v;
  return s;
}

}  // namespace rpareto
