#include "gaitpipe/core_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace gaitpipe {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
    case ErrorCode::CalibrationError: return "CalibrationError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::KernelTooLarge: return "KernelTooLarge";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::NoStepsDetected: return "NoStepsDetected";
    case ErrorCode::BothZero: return "BothZero";
    case ErrorCode::ScenarioInvalid: return "ScenarioInvalid";
    case ErrorCode::EmptyEvaluation: return "EmptyEvaluation";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Point3::Point3(double x, double y, double z) : x_(x), y_(y), z_(z) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
    throw Error(ErrorCode::InvalidArgument, "non-finite point coordinate");
  }
}

Axis Plane::vertical() const noexcept {
  const int used = (1 << static_cast<int>(first)) | (1 << static_cast<int>(second));
  for (int a = 0; a < 3; ++a) {
    if ((used & (1 << a)) == 0) return static_cast<Axis>(a);
  }
  return Axis::Z;
}

std::string Plane::name() const {
  static constexpr std::array<char, 3> letters{'x', 'y', 'z'};
  return {letters[static_cast<int>(first)], letters[static_cast<int>(second)]};
}

Plane Plane::parse(std::string_view text) {
  if (text == "xy" || text == "yx") return {Axis::X, Axis::Y};
  if (text == "xz" || text == "zx") return {Axis::X, Axis::Z};
  if (text == "yz" || text == "zy") return {Axis::Y, Axis::Z};
  throw Error(ErrorCode::InvalidArgument, "plane must be one of xy, xz, yz (got '" + std::string(text) + "')");
}

double horizontal_distance(const Point3& a, const Point3& b, Plane plane) noexcept {
  const double d0 = a[static_cast<int>(plane.first)] - b[static_cast<int>(plane.first)];
  const double d1 = a[static_cast<int>(plane.second)] - b[static_cast<int>(plane.second)];
  return std::sqrt(d0 * d0 + d1 * d1);
}

namespace {

constexpr std::array<std::string_view, kKinectJointCount> kJointNames{
    "hip_center",  "spine",       "shoulder_center", "head",       "shoulder_left",
    "elbow_left",  "wrist_left",  "hand_left",       "shoulder_right", "elbow_right",
    "wrist_right", "hand_right",  "hip_left",        "knee_left",  "ankle_left",
    "foot_left",   "hip_right",   "knee_right",      "ankle_right", "foot_right",
};

}  // namespace

JointKind::JointKind(JointId id) : id_(id) {
  if (id == JointId::Other) throw Error(ErrorCode::InvalidArgument, "use JointKind::other(name)");
}

JointKind JointKind::other(std::string name) { return from_name(name); }

JointKind JointKind::from_name(std::string_view name) {
  for (int i = 0; i < kKinectJointCount; ++i) {
    if (kJointNames[static_cast<std::size_t>(i)] == name) return JointKind(static_cast<JointId>(i));
  }
  if (name.empty()) throw Error(ErrorCode::FormatError, "empty joint name");
  JointKind k;
  k.id_ = JointId::Other;
  k.other_ = std::string(name);
  return k;
}

std::string JointKind::name() const {
  if (id_ == JointId::Other) return other_;
  return std::string(kJointNames[static_cast<std::size_t>(id_)]);
}

SkeletonFrame::SkeletonFrame(std::int64_t frame_index, double timestamp, std::vector<Joint> joints)
    : frame_index_(frame_index), timestamp_(timestamp), joints_(std::move(joints)) {
  if (frame_index < 0) throw Error(ErrorCode::InvalidArgument, "negative frame index");
  if (!std::isfinite(timestamp)) throw Error(ErrorCode::InvalidArgument, "non-finite timestamp");
  std::sort(joints_.begin(), joints_.end(),
            [](const Joint& a, const Joint& b) { return a.kind < b.kind; });
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    const double c = joints_[i].confidence;
    if (!(c >= 0.0 && c <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "joint confidence outside [0,1] for " + joints_[i].kind.name());
    }
    if (i > 0 && joints_[i].kind == joints_[i - 1].kind) {
      throw Error(ErrorCode::InvalidArgument,
                  "duplicate joint " + joints_[i].kind.name() + " in frame " + std::to_string(frame_index));
    }
  }
}

const Joint* SkeletonFrame::find(const JointKind& kind) const {
  auto it = std::lower_bound(joints_.begin(), joints_.end(), kind,
                             [](const Joint& j, const JointKind& k) { return j.kind < k; });
  if (it == joints_.end() || it->kind != kind) return nullptr;
  return &*it;
}

PoseSequence::PoseSequence(std::vector<SkeletonFrame> frames, double frame_rate_hz, std::string source_id)
    : frames_(std::move(frames)), frame_rate_hz_(frame_rate_hz), source_id_(std::move(source_id)) {
  if (!(frame_rate_hz > 0.0) || !std::isfinite(frame_rate_hz)) {
    throw Error(ErrorCode::InvalidArgument, "frame rate must be positive");
  }
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    if (!(frames_[i].timestamp() > frames_[i - 1].timestamp())) {
      throw Error(ErrorCode::InvalidArgument,
                  "timestamps not strictly increasing at frame " + std::to_string(frames_[i].frame_index()));
    }
    if (frames_[i].frame_index() <= frames_[i - 1].frame_index()) {
      throw Error(ErrorCode::InvalidArgument,
                  "frame indices not strictly increasing at " + std::to_string(frames_[i].frame_index()));
    }
  }
}

std::vector<double> PoseSequence::timestamps() const {
  std::vector<double> ts;
  ts.reserve(frames_.size());
  for (const auto& f : frames_) ts.push_back(f.timestamp());
  return ts;
}

std::string_view to_string(Foot foot) { return foot == Foot::Left ? "L" : "R"; }

Foot parse_foot(std::string_view text) {
  if (text == "L" || text == "left" || text == "Left") return Foot::Left;
  if (text == "R" || text == "right" || text == "Right") return Foot::Right;
  throw Error(ErrorCode::FormatError, "unknown foot '" + std::string(text) + "'");
}

std::pair<JointKind, JointKind> resolve_foot_joints(const PoseSequence& seq, const FootChoice& choice) {
  auto any_has = [&](const JointKind& k) {
    return std::any_of(seq.frames().begin(), seq.frames().end(),
                       [&](const SkeletonFrame& f) { return f.find(k) != nullptr; });
  };
  const JointKind left = any_has(choice.left) ? choice.left : choice.left_fallback;
  const JointKind right = any_has(choice.right) ? choice.right : choice.right_fallback;
  if (!any_has(left) && !any_has(right)) {
    throw Error(ErrorCode::FormatError, "no frame in '" + seq.source_id() + "' contains a foot or ankle joint");
  }
  return {left, right};
}

FootTracks foot_positions(const PoseSequence& seq, const FootChoice& choice) {
  if (seq.empty()) throw Error(ErrorCode::EmptyInput, "empty pose sequence");
  auto [left_kind, right_kind] = resolve_foot_joints(seq, choice);
  FootTracks out;
  out.left_kind = left_kind;
  out.right_kind = right_kind;
  out.left.reserve(seq.size());
  out.right.reserve(seq.size());
  auto pick = [&](const SkeletonFrame& f, const JointKind& k) -> std::optional<Point3> {
    const Joint* j = f.find(k);
    if (j == nullptr || j->confidence < choice.min_confidence) return std::nullopt;
    return j->position;
  };
  for (const auto& f : seq.frames()) {
    out.left.push_back(pick(f, left_kind));
    out.right.push_back(pick(f, right_kind));
  }
  return out;
}

}  // namespace gaitpipe
