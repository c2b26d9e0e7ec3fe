#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "deimkit/pod.hpp"
#include "deimkit/rc_ladder.hpp"
#include "deimkit/selection.hpp"

namespace deimkit {

struct ExperimentConfig {
  int example_id = 1;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  SelectionStrategy strategy = SelectionStrategy::Srrqr;
  double eta = 2.0;
  bool small = false;        // reduced presets (example 2: N = 100)
  bool paper_scale = false;  // example 5: 1000 training points
  Index grid_n = 0;          // 0 -> example default
  Index rank = 0;            // 0 -> example default
  bool test_on_training = false;  // example 1 exact-reconstruction mode

  void validate() const;
};

/// Per-example result summary; CSV files carry the full tables, metrics carry
/// the scalar quantities the harness asserts on.
struct ErrorReport {
  std::vector<std::string> csv_files;
  std::map<std::string, double> metrics;
  double wall_seconds = 0.0;

  double metric(const std::string& key) const;
};

ErrorReport run_example1(const ExperimentConfig& cfg);
ErrorReport run_example2(const ExperimentConfig& cfg);
ErrorReport run_example3(const ExperimentConfig& cfg);
ErrorReport run_example4(const ExperimentConfig& cfg);
ErrorReport run_example5(const ExperimentConfig& cfg);
ErrorReport run_example(const ExperimentConfig& cfg);

/// W-POD-Galerkin reduced RC-ladder with pointwise W-DEIM nonlinearity
/// approximation (W = the ladder's diagonal D). The snapshot columns of
/// full_traj (excluding the t = 0 column) train both bases; the reduced
/// trajectory is lifted back to full coordinates.
struct RcReducedResult {
  Matrix traj;  // n x (steps + 1)
  Index pod_rank = 0;
  Index deim_rank = 0;
};
RcReducedResult solve_rc_ladder_reduced(const RcLadderConfig& cfg,
                                        const Matrix& full_traj, RankSpec pod_spec,
                                        RankSpec deim_spec, double eta = 2.0);

/// Worker count: min(hardware, DEIMKIT_THREADS when set).
int thread_count();

/// Static block partition over [0, n); results must be written to
/// index-addressed storage so merges are deterministic.
void parallel_for(Index n, const std::function<void(Index)>& fn);

}  // namespace deimkit
