#pragma once

#include "regcrit/criteria.hpp"
#include "regcrit/solver.hpp"

namespace regcrit {

/// Receives monitor samples and snapshots as a run progresses. Outputs
/// written here survive a NumericalBlowup.
class RunSink {
 public:
  virtual ~RunSink() = default;
  /// Called after each sample is appended; the new one is series.samples.back().
  virtual void on_sample(const MonitorSeries& series) { (void)series; }
  virtual void on_snapshot(const SolverState& state) { (void)state; }
};

/// Integrates from t = 0 to t_end. Samples are taken at step 0, every
/// monitor_stride steps and at the final step; snapshots likewise with
/// snapshot_stride. A NumericalBlowup from `step` is rethrown with the
/// samples gathered so far attached.
MonitorSeries run(const SolverConfig& config, const CriterionConfig& monitors,
                  RunSink* sink = nullptr);

}  // namespace regcrit
