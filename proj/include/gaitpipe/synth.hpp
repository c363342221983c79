#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaitpipe/core_model.hpp"

namespace gaitpipe {

/// Parameters of a synthetic straight-line walk. Lengths in meters, times in
/// seconds. The walk is steady: each step is one foot swinging from behind
/// the stance foot to `step_length` ahead of it.
struct GaitScenario {
  /// Lead of the left (right) foot over the stance foot at the end of its swing.
  double step_length_left_m = 0.35;
  double step_length_right_m = 0.35;
  double cadence_hz = 2.0;  // steps per second
  /// Walking span; holds floor(duration * cadence) counted steps. The clip
  /// adds a short lead-in and lead-out around it.
  double duration_s = 5.0;
  double stance_width_m = 0.1;
  double noise_sigma_m = 0.0;
  double dropout_prob = 0.0;
  double heading_deg = 0.0;
  double frame_rate_hz = 30.0;
  std::uint64_t seed = 1;
  /// Swing foot of the first counted step.
  Foot first_swing = Foot::Right;
  /// Timestamp of frame 0 (epoch seconds for long-term series).
  double start_time_s = 0.0;
  std::string id = "synthetic";

  void validate() const;
};

struct SyntheticGroundTruth {
  std::vector<std::size_t> step_frames;
  std::vector<Foot> swing_foot;
  double true_speed_mps = 0.0;
  double true_step_length_m = 0.0;
  double true_stride_left_m = 0.0;
  double true_stride_right_m = 0.0;
  double true_swing_time_s = 0.0;
  double true_step_width_m = 0.0;
  double true_asymmetry_index = 0.0;
  double frame_rate_hz = 30.0;
};

struct SyntheticClip {
  PoseSequence sequence;
  SyntheticGroundTruth truth;
};

/// Fraction of a swing period before the first (uncounted) maximum.
inline constexpr double kLeadInSwings = 0.25;
/// Fraction of a swing period after the last counted maximum.
inline constexpr double kLeadOutSwings = 0.4;

/// Deterministic for a given scenario (all randomness flows from `seed`).
/// Emits all 20 Kinect joints on a simple stick body; jitter and dropout
/// are applied last. Throws ScenarioInvalid.
SyntheticClip generate(const GaitScenario& sc);

/// Noise-free horizontal feet distance at time `t` relative to the clip start,
/// in closed form.
double synthetic_feet_distance(const GaitScenario& sc, double t);

}  // namespace gaitpipe
