#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gaitpipe/core_model.hpp"
#include "gaitpipe/step_detection.hpp"

namespace gaitpipe {

struct StepEvent {
  std::size_t frame = 0;
  double time = 0.0;
  /// The swing foot completing the step.
  Foot foot = Foot::Left;
  Point3 left_pos;
  Point3 right_pos;
  /// Raw feet distance at the frame.
  double separation = 0.0;
  /// Set when alternation overrode the displacement rule.
  bool forced = false;

  bool operator==(const StepEvent&) const = default;
};

/// Swing foot = the foot that moved farther (horizontally) since the previous
/// minimum, or since the clip start for the first maximum. Consecutive events
/// must alternate; on conflict alternation wins and the event is flagged.
std::vector<StepEvent> assign_feet(const StepDetectionResult& result, std::span<const Point3> left,
                                   std::span<const Point3> right, Plane plane = {});

enum class WidthSource { Raw, Smoothed };

struct StepRow {
  std::size_t event_index = 0;
  std::size_t frame = 0;
  double time_s = 0.0;
  Foot foot = Foot::Left;
  double stride_m = 0.0;
  /// Time since the previous maximum; absent for the first event.
  std::optional<double> swing_time_s;
  bool forced = false;

  bool operator==(const StepRow&) const = default;
};

/// Samples behind each mean in the report.
struct PerStepSamples {
  std::vector<double> stride_left;
  std::vector<double> stride_right;
  std::vector<double> step_length;
  std::vector<double> step_width;
  std::vector<double> swing_time;

  bool operator==(const PerStepSamples&) const = default;
};

/// Clinical gait parameters. Fields whose minimum event count is unmet are
/// absent rather than zero.
struct GaitReport {
  std::optional<double> speed_mps;
  std::optional<double> stride_left_m;
  std::optional<double> stride_right_m;
  std::optional<double> step_length_m;
  std::optional<double> step_width_m;
  std::optional<double> swing_time_s;
  std::optional<double> asymmetry_index;
  int n_steps = 0;
  PerStepSamples samples;
  std::vector<StepRow> steps;

  bool operator==(const GaitReport&) const = default;
};

struct MetricsOptions {
  Plane plane{};
  WidthSource width_source = WidthSource::Raw;
};

/// Stride per foot is the separation at each of its events; step length is
/// the distance between successive placements of the same foot; step width
/// comes from the retained minima; swing time is the spacing of maxima; speed
/// is the stride sum over the time the strides span (first to last maximum
/// plus one mean swing).
GaitReport compute_gait_report(std::span<const StepEvent> events, std::span<const Extremum> minima,
                               const MetricsOptions& options = {});

/// |L - R| / (0.5 (L + R)). Throws BothZero.
double asymmetry_index(double stride_left, double stride_right);

}  // namespace gaitpipe
