#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gaitpipe/core_model.hpp"

namespace gaitpipe {

struct DetectorParams {
  /// Uniform smoothing window in frames; odd.
  int kernel_width = 5;
  /// False-extremum threshold as a fraction of the extrema range.
  double alpha = 0.2;
  Plane plane{};
  /// Fewer retained maxima than this means "not walking".
  int min_steps = 2;

  void validate() const;
};

/// Horizontal feet distance per frame, raw and smoothed, meters.
struct DistanceSignal {
  std::vector<double> raw;
  std::vector<double> smoothed;
  std::vector<double> timestamps;
};

enum class ExtremumKind { Max, Min };

struct Extremum {
  std::size_t frame = 0;
  /// Raw feet distance at the frame.
  double value = 0.0;
  /// Smoothed feet distance at the frame; thresholding works on this.
  double smoothed_value = 0.0;
  ExtremumKind kind = ExtremumKind::Max;

  bool operator==(const Extremum&) const = default;
};

struct StepDetectionResult {
  /// Surviving extrema, alternating, after false-pair removal and after
  /// dropping the first one.
  std::vector<Extremum> extrema;
  /// Extrema after false-pair removal but before dropping the first.
  std::vector<Extremum> filtered_extrema;
  std::vector<Extremum> candidates;
  double range_r = 0.0;
  double threshold_theta = 0.0;
  std::vector<std::size_t> step_frames;
  std::vector<std::pair<Extremum, Extremum>> removed_pairs;
  /// Same-kind neighbours dropped when re-establishing alternation.
  std::vector<Extremum> merged_out;
  std::optional<Extremum> dropped_first;
  DistanceSignal signal;

  std::vector<Extremum> minima() const;
  std::vector<Extremum> maxima() const;
};

/// Euclidean norm of left[t] - right[t] over the plane axes.
std::vector<double> feet_distance(std::span<const Point3> left, std::span<const Point3> right, Plane plane = {});

/// Centered moving average. The window at t is [max(0, t-h), min(T-1, t+h)]
/// with h = (kernel_width - 1) / 2, averaged over its actual size.
std::vector<double> smooth_uniform(std::span<const double> raw, int kernel_width);

/// Interior strict local extrema. A plateau counts once, at its first index.
/// Endpoints (and plateaus touching them) are never extrema.
std::vector<Extremum> find_extrema(std::span<const double> smoothed);

struct FalseExtremaRemoval {
  std::vector<Extremum> extrema;
  double range_r = 0.0;
  double threshold_theta = 0.0;
  std::vector<std::pair<Extremum, Extremum>> removed_pairs;
  std::vector<Extremum> merged_out;
};

/// Range r = max(Max) - min(Min) and theta = alpha * r are fixed up front.
/// The adjacent pair with the smallest smoothed-value difference is removed
/// while that difference is below theta; the same-kind neighbours left
/// adjacent are merged into the more extreme one.
FalseExtremaRemoval remove_false_extrema(std::vector<Extremum> extrema, double alpha);

/// Full pipeline without the min_steps check; never throws NoStepsDetected.
StepDetectionResult detect_steps_from_signal(std::span<const double> raw, std::span<const double> timestamps,
                                             const DetectorParams& params);

/// Feet of every frame must be present. Throws TooFewFrames and
/// NoStepsDetected.
StepDetectionResult detect_steps(const PoseSequence& seq, const DetectorParams& params,
                                 const FootChoice& feet = {});

/// Feet positions with missing entries rejected (LengthMismatch / FormatError).
std::pair<std::vector<Point3>, std::vector<Point3>> complete_feet(const FootTracks& tracks);

}  // namespace gaitpipe
