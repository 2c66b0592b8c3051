#include "regcrit/run.hpp"

#include <memory>
#include <optional>

#include "regcrit/errors.hpp"

namespace regcrit {

MonitorSeries run(const SolverConfig& config, const CriterionConfig& monitors, RunSink* sink) {
  monitors.validate();
  MonitorSeries series;
  series.pairs = monitors.pairs;

  std::optional<GronwallTracker> tracker;
  if (monitors.gronwall) tracker.emplace(monitors.gronwall_pair(), monitors.c_cal);

  auto record = [&](const SolverState& state) {
    auto sample = evaluate_sample(state, monitors);
    if (tracker) {
      const auto point = tracker->add(sample.t, sample.pairs.front().lp, sample.linf,
                                      sample.sobolev[2]);
      sample.gronwall_bound = point.bound;
      sample.gronwall_measured = point.measured;
      sample.gronwall_dominated = point.dominated;
    }
    append_sample(series, std::move(sample));
    if (sink) sink->on_sample(series);
  };

  SolverState state = initial_state(config);
  const long steps = config.step_count();
  record(state);
  if (sink) sink->on_snapshot(state);

  try {
    while (state.step_index < steps) {
      state = step(state, config);
      const bool last = state.step_index == steps;
      if (last || state.step_index % config.monitor_stride() == 0) record(state);
      if (sink && (last || state.step_index % config.snapshot_stride() == 0)) {
        sink->on_snapshot(state);
      }
    }
  } catch (const NumericalBlowup& blowup) {
    throw NumericalBlowup(blowup, std::make_shared<const MonitorSeries>(series));
  }
  return series;
}

}  // namespace regcrit
