#include "gaitpipe/gait_metrics.hpp"

#include <cmath>
#include <numeric>

namespace gaitpipe {

std::vector<StepEvent> assign_feet(const StepDetectionResult& result, std::span<const Point3> left,
                                   std::span<const Point3> right, Plane plane) {
  if (left.size() != right.size() || left.size() != result.signal.raw.size()) {
    throw Error(ErrorCode::LengthMismatch, "foot tracks do not match the detection signal");
  }
  std::vector<StepEvent> events;
  std::optional<Foot> prev_foot;
  for (std::size_t frame : result.step_frames) {
    std::size_t ref = 0;
    for (const auto& e : result.filtered_extrema) {
      if (e.kind == ExtremumKind::Min && e.frame < frame) ref = e.frame;
    }
    const double dl = horizontal_distance(left[ref], left[frame], plane);
    const double dr = horizontal_distance(right[ref], right[frame], plane);
    Foot by_rule;
    if (dl > dr) by_rule = Foot::Left;
    else if (dr > dl) by_rule = Foot::Right;
    else by_rule = prev_foot ? opposite(*prev_foot) : Foot::Left;

    StepEvent ev;
    ev.frame = frame;
    ev.time = result.signal.timestamps[frame];
    ev.foot = by_rule;
    if (prev_foot && by_rule == *prev_foot) {
      ev.foot = opposite(*prev_foot);
      ev.forced = true;
    }
    ev.left_pos = left[frame];
    ev.right_pos = right[frame];
    ev.separation = result.signal.raw[frame];
    prev_foot = ev.foot;
    events.push_back(ev);
  }
  return events;
}

double asymmetry_index(double stride_left, double stride_right) {
  if (stride_left < 0.0 || stride_right < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "stride lengths must be nonnegative");
  }
  const double mean = 0.5 * (stride_left + stride_right);
  if (!(mean > 0.0)) throw Error(ErrorCode::BothZero, "both stride lengths are zero");
  return std::abs(stride_left - stride_right) / mean;
}

namespace {

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

GaitReport compute_gait_report(std::span<const StepEvent> events, std::span<const Extremum> minima,
                               const MetricsOptions& options) {
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (!(events[i].time > events[i - 1].time)) {
      throw Error(ErrorCode::InvalidArgument, "step events must be strictly increasing in time");
    }
  }
  GaitReport rep;
  rep.n_steps = static_cast<int>(events.size());
  auto& s = rep.samples;

  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    (ev.foot == Foot::Left ? s.stride_left : s.stride_right).push_back(ev.separation);
    StepRow row;
    row.event_index = i;
    row.frame = ev.frame;
    row.time_s = ev.time;
    row.foot = ev.foot;
    row.stride_m = ev.separation;
    row.forced = ev.forced;
    if (i > 0) {
      row.swing_time_s = ev.time - events[i - 1].time;
      s.swing_time.push_back(*row.swing_time_s);
    }
    rep.steps.push_back(row);

    for (std::size_t j = i + 1; j < events.size(); ++j) {
      if (events[j].foot != ev.foot) continue;
      const Point3& a = ev.foot == Foot::Left ? ev.left_pos : ev.right_pos;
      const Point3& b = ev.foot == Foot::Left ? events[j].left_pos : events[j].right_pos;
      s.step_length.push_back(horizontal_distance(a, b, options.plane));
      break;
    }
  }
  for (const auto& m : minima) {
    s.step_width.push_back(options.width_source == WidthSource::Raw ? m.value : m.smoothed_value);
  }

  rep.stride_left_m = mean_of(s.stride_left);
  rep.stride_right_m = mean_of(s.stride_right);
  rep.step_length_m = mean_of(s.step_length);
  rep.step_width_m = mean_of(s.step_width);
  rep.swing_time_s = mean_of(s.swing_time);
  if (events.size() >= 2) {
    const double strides = std::accumulate(s.stride_left.begin(), s.stride_left.end(), 0.0) +
                           std::accumulate(s.stride_right.begin(), s.stride_right.end(), 0.0);
    // N strides occupy N swings: first-to-last maximum covers only N - 1.
    const double span = events.back().time - events.front().time + *rep.swing_time_s;
    rep.speed_mps = strides / span;
  }
  if (rep.stride_left_m && rep.stride_right_m && (*rep.stride_left_m + *rep.stride_right_m) > 0.0) {
    rep.asymmetry_index = asymmetry_index(*rep.stride_left_m, *rep.stride_right_m);
  }
  return rep;
}

}  // namespace gaitpipe
