#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gaitpipe/core_model.hpp"

namespace gaitpipe {

// Kinect skeleton text format, one frame per line:
//
//   <frame_index> <j0.x> <j0.y> <j0.z> ... <j19.x> <j19.y> <j19.z>
//
// Coordinates are meters in camera space. Joint order (index: joint):
//
//    0 hip_center        5 elbow_left       10 wrist_right      15 foot_left
//    1 spine             6 wrist_left       11 hand_right       16 hip_right
//    2 shoulder_center   7 hand_left        12 hip_left         17 knee_right
//    3 head              8 shoulder_right   13 knee_left        18 ankle_right
//    4 shoulder_left     9 elbow_right      14 ankle_left       19 foot_right
//
// Timestamps are synthesized as frame_index / frame_rate_hz.

inline constexpr double kDefaultFrameRateHz = 30.0;

PoseSequence parse_kinect_skeleton(std::istream& in, const std::string& source_id,
                                   double frame_rate_hz = kDefaultFrameRateHz);
PoseSequence parse_kinect_skeleton_file(const std::filesystem::path& path,
                                        double frame_rate_hz = kDefaultFrameRateHz);

/// Every frame must carry all 20 Kinect joints.
void write_kinect_skeleton(std::ostream& out, const PoseSequence& seq);

struct JsonlOptions {
  /// Overrides per-record "fps" and the timestamp-based estimate.
  std::optional<double> frame_rate_hz;
};

// Pose JSONL, one record per line:
//
//   {"t": 12.5, "track": "a", "joints": [{"name": "foot_left", "x": .., "y": .., "z": .., "conf": ..}, ..]}
//
// Optional record fields: "frame" (integer index) and "fps". Optional joint
// field "interp" marks interpolated entries. One PoseSequence per distinct
// track, sorted by track id; frames sorted by t.
std::vector<PoseSequence> parse_pose_jsonl(std::istream& in, const std::string& origin = "<stream>",
                                           const JsonlOptions& options = {});
std::vector<PoseSequence> parse_pose_jsonl_file(const std::filesystem::path& path,
                                                const JsonlOptions& options = {});

void write_pose_jsonl(std::ostream& out, const std::vector<PoseSequence>& seqs);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace gaitpipe
