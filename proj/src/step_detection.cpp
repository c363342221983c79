#include "gaitpipe/step_detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gaitpipe {

void DetectorParams::validate() const {
  if (kernel_width < 1 || kernel_width % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "kernel_width must be odd and >= 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  if (min_steps < 1) throw Error(ErrorCode::InvalidArgument, "min_steps must be >= 1");
  if (plane.first == plane.second) throw Error(ErrorCode::InvalidArgument, "plane axes must differ");
}

std::vector<Extremum> StepDetectionResult::minima() const {
  std::vector<Extremum> out;
  for (const auto& e : extrema) {
    if (e.kind == ExtremumKind::Min) out.push_back(e);
  }
  return out;
}

std::vector<Extremum> StepDetectionResult::maxima() const {
  std::vector<Extremum> out;
  for (const auto& e : extrema) {
    if (e.kind == ExtremumKind::Max) out.push_back(e);
  }
  return out;
}

std::vector<double> feet_distance(std::span<const Point3> left, std::span<const Point3> right, Plane plane) {
  if (left.size() != right.size()) {
    throw Error(ErrorCode::LengthMismatch, "left has " + std::to_string(left.size()) + " frames, right has " +
                                               std::to_string(right.size()));
  }
  std::vector<double> d(left.size());
  for (std::size_t t = 0; t < left.size(); ++t) d[t] = horizontal_distance(left[t], right[t], plane);
  return d;
}

std::vector<double> smooth_uniform(std::span<const double> raw, int kernel_width) {
  if (kernel_width < 1 || kernel_width % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "kernel_width must be odd and >= 1");
  }
  if (static_cast<std::size_t>(kernel_width) > raw.size()) {
    throw Error(ErrorCode::KernelTooLarge, "kernel width " + std::to_string(kernel_width) + " exceeds signal length " +
                                               std::to_string(raw.size()));
  }
  const std::size_t n = raw.size();
  const auto h = static_cast<std::size_t>((kernel_width - 1) / 2);
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t >= h ? t - h : 0;
    const std::size_t hi = std::min(n - 1, t + h);
    // deviations from the centre sample, so a constant window returns it exactly
    double dev = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) dev += raw[k] - raw[t];
    out[t] = raw[t] + dev / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::vector<Extremum> find_extrema(std::span<const double> smoothed) {
  const std::size_t n = smoothed.size();
  if (n < 3) throw Error(ErrorCode::SignalTooShort, "need at least 3 samples, got " + std::to_string(n));
  std::vector<Extremum> out;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && smoothed[j + 1] == smoothed[i]) ++j;
    if (i > 0 && j + 1 < n) {
      const double v = smoothed[i];
      const double before = smoothed[i - 1];
      const double after = smoothed[j + 1];
      if (v > before && v > after) {
        out.push_back({i, v, v, ExtremumKind::Max});
      } else if (v < before && v < after) {
        out.push_back({i, v, v, ExtremumKind::Min});
      }
    }
    i = j + 1;
  }
  return out;
}

FalseExtremaRemoval remove_false_extrema(std::vector<Extremum> extrema, double alpha) {
  for (std::size_t i = 1; i < extrema.size(); ++i) {
    if (extrema[i].kind == extrema[i - 1].kind) {
      throw Error(ErrorCode::InvalidArgument, "extrema do not alternate");
    }
  }
  FalseExtremaRemoval res;
  double max_of_max = -std::numeric_limits<double>::infinity();
  double min_of_min = std::numeric_limits<double>::infinity();
  for (const auto& e : extrema) {
    if (e.kind == ExtremumKind::Max) max_of_max = std::max(max_of_max, e.smoothed_value);
    else min_of_min = std::min(min_of_min, e.smoothed_value);
  }
  if (std::isfinite(max_of_max) && std::isfinite(min_of_min)) res.range_r = max_of_max - min_of_min;
  res.threshold_theta = alpha * res.range_r;

  while (extrema.size() >= 2) {
    std::size_t best = 0;
    double best_diff = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < extrema.size(); ++i) {
      const double d = std::abs(extrema[i + 1].smoothed_value - extrema[i].smoothed_value);
      if (d < best_diff) {
        best_diff = d;
        best = i;
      }
    }
    if (!(best_diff < res.threshold_theta)) break;
    res.removed_pairs.emplace_back(extrema[best], extrema[best + 1]);
    extrema.erase(extrema.begin() + static_cast<std::ptrdiff_t>(best),
                  extrema.begin() + static_cast<std::ptrdiff_t>(best + 2));
    // only same-kind neighbours need merging; a Max/Min pair cut from an
    // alternating list leaves its neighbours alternating
    if (best > 0 && best < extrema.size() && extrema[best - 1].kind == extrema[best].kind) {
      const Extremum& a = extrema[best - 1];
      const Extremum& b = extrema[best];
      const bool keep_a = a.kind == ExtremumKind::Max ? a.smoothed_value >= b.smoothed_value
                                                      : a.smoothed_value <= b.smoothed_value;
      const std::size_t drop = keep_a ? best : best - 1;
      res.merged_out.push_back(extrema[drop]);
      extrema.erase(extrema.begin() + static_cast<std::ptrdiff_t>(drop));
    }
  }
  res.extrema = std::move(extrema);
  return res;
}

StepDetectionResult detect_steps_from_signal(std::span<const double> raw, std::span<const double> timestamps,
                                             const DetectorParams& params) {
  params.validate();
  if (raw.size() != timestamps.size()) {
    throw Error(ErrorCode::LengthMismatch, "signal and timestamps differ in length");
  }
  const std::size_t n = raw.size();
  if (n < 3 || n < static_cast<std::size_t>(params.kernel_width)) {
    throw Error(ErrorCode::TooFewFrames, std::to_string(n) + " frames is fewer than the kernel width " +
                                             std::to_string(params.kernel_width) + " (or 3)");
  }
  StepDetectionResult r;
  r.signal.raw.assign(raw.begin(), raw.end());
  r.signal.timestamps.assign(timestamps.begin(), timestamps.end());
  r.signal.smoothed = smooth_uniform(raw, params.kernel_width);
  r.candidates = find_extrema(r.signal.smoothed);
  for (auto& e : r.candidates) e.value = raw[e.frame];

  auto removal = remove_false_extrema(r.candidates, params.alpha);
  r.range_r = removal.range_r;
  r.threshold_theta = removal.threshold_theta;
  r.removed_pairs = std::move(removal.removed_pairs);
  r.merged_out = std::move(removal.merged_out);
  r.filtered_extrema = removal.extrema;
  r.extrema = std::move(removal.extrema);
  // The clip's first extremum is the tail of motion already in progress.
  if (!r.extrema.empty()) {
    r.dropped_first = r.extrema.front();
    r.extrema.erase(r.extrema.begin());
  }
  for (const auto& e : r.extrema) {
    if (e.kind == ExtremumKind::Max) r.step_frames.push_back(e.frame);
  }
  return r;
}

std::pair<std::vector<Point3>, std::vector<Point3>> complete_feet(const FootTracks& tracks) {
  if (tracks.left.size() != tracks.right.size()) {
    throw Error(ErrorCode::LengthMismatch, "foot tracks differ in length");
  }
  std::vector<Point3> left, right;
  left.reserve(tracks.left.size());
  right.reserve(tracks.right.size());
  for (std::size_t t = 0; t < tracks.left.size(); ++t) {
    if (!tracks.left[t] || !tracks.right[t]) {
      throw Error(ErrorCode::FormatError, "foot position missing at frame offset " + std::to_string(t) +
                                              "; repair gaps before detection");
    }
    left.push_back(*tracks.left[t]);
    right.push_back(*tracks.right[t]);
  }
  return {std::move(left), std::move(right)};
}

StepDetectionResult detect_steps(const PoseSequence& seq, const DetectorParams& params, const FootChoice& feet) {
  params.validate();
  if (seq.size() < 3 || seq.size() < static_cast<std::size_t>(params.kernel_width)) {
    throw Error(ErrorCode::TooFewFrames, "'" + seq.source_id() + "' has " + std::to_string(seq.size()) + " frames");
  }
  const auto [left, right] = complete_feet(foot_positions(seq, feet));
  const auto raw = feet_distance(left, right, params.plane);
  const auto ts = seq.timestamps();
  auto result = detect_steps_from_signal(raw, ts, params);
  if (result.step_frames.size() < static_cast<std::size_t>(params.min_steps)) {
    throw Error(ErrorCode::NoStepsDetected, "'" + seq.source_id() + "': " + std::to_string(result.step_frames.size()) +
                                                " step(s) found, need " + std::to_string(params.min_steps));
  }
  return result;
}

}  // namespace gaitpipe
