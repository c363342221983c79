#pragma once

#include <span>
#include <vector>

#include "gaitpipe/core_model.hpp"

namespace gaitpipe {

/// Thresholds for rejecting false-positive skeletons.
struct FilterParams {
  int min_track_frames = 10;
  int max_gap_frames = 5;
  double min_height_m = 0.5;
  double max_height_m = 2.5;
  double max_width_m = 1.5;
  /// Association radius between consecutive detections of one track.
  double max_centroid_jump_m = 0.5;

  void validate() const;
};

/// Drops frames whose vertical extent lies outside [min_height_m,
/// max_height_m] or whose horizontal extent (the larger of the two plane
/// axes) exceeds max_width_m.
PoseSequence filter_dimensions(const PoseSequence& seq, const FilterParams& p, Plane plane = {});

/// Re-links all detections of the inputs into tracks by nearest centroid,
/// discards tracks shorter than min_track_frames and returns the rest
/// longest first. Inputs must share a timebase.
std::vector<PoseSequence> filter_temporal(std::span<const PoseSequence> detections, const FilterParams& p);

struct InterpolationResult {
  PoseSequence sequence;
  /// Number of cuts made at unrepairable gaps.
  int splits = 0;
  int interpolated_entries = 0;
};

/// Fills missing joints (and missing frame indices) by linear interpolation
/// over spans of at most max_gap_frames. A required joint that stays missing
/// cuts the sequence there; the longest contiguous piece is returned. When
/// `required` is empty, every joint seen in the sequence is required.
InterpolationResult interpolate_gaps(const PoseSequence& seq, const FilterParams& p,
                                     std::span<const JointKind> required = {});

}  // namespace gaitpipe
