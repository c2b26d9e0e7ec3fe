#include "deimkit/experiments.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace deimkit {

void ExperimentConfig::validate() const {
  if (example_id < 1 || example_id > 5)
    throw ConfigError("example id must be 1..5");
  if (eta < 1.0) throw ConfigError("eta must be >= 1");
  if (grid_n < 0 || rank < 0) throw ConfigError("sizes must be non-negative");
  if (out_dir.empty()) throw ConfigError("output directory must be set");
}

double ErrorReport::metric(const std::string& key) const {
  auto it = metrics.find(key);
  if (it == metrics.end()) throw ConfigError("unknown report metric: " + key);
  return it->second;
}

ErrorReport run_example(const ExperimentConfig& cfg) {
  cfg.validate();
  switch (cfg.example_id) {
    case 1: return run_example1(cfg);
    case 2: return run_example2(cfg);
    case 3: return run_example3(cfg);
    case 4: return run_example4(cfg);
    case 5: return run_example5(cfg);
  }
  throw ConfigError("example id must be 1..5");
}

int thread_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("DEIMKIT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

void parallel_for(Index n, const std::function<void(Index)>& fn) {
  if (n <= 0) return;
  const int workers = std::min<Index>(thread_count(), n);
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const Index chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const Index lo = static_cast<Index>(w) * chunk;
    const Index hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (Index i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace deimkit
