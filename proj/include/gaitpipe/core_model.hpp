#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitpipe/error.hpp"

namespace gaitpipe {

/// A point in a right-handed world frame, meters. Construction rejects
/// NaN and infinity.
class Point3 {
public:
  Point3() = default;
  Point3(double x, double y, double z);

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  double z() const noexcept { return z_; }
  double operator[](int axis) const noexcept { return axis == 0 ? x_ : axis == 1 ? y_ : z_; }

  Point3 operator+(const Point3& o) const { return {x_ + o.x_, y_ + o.y_, z_ + o.z_}; }
  Point3 operator-(const Point3& o) const { return {x_ - o.x_, y_ - o.y_, z_ - o.z_}; }
  Point3 operator*(double s) const { return {x_ * s, y_ * s, z_ * s}; }

  bool operator==(const Point3&) const = default;

private:
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

enum class Axis : int { X = 0, Y = 1, Z = 2 };

/// The two axes spanning the horizontal plane. The remaining axis is vertical.
struct Plane {
  Axis first = Axis::X;
  Axis second = Axis::Y;

  Axis vertical() const noexcept;
  std::string name() const;
  static Plane parse(std::string_view text);  // "xy", "xz", "yz"

  bool operator==(const Plane&) const = default;
};

/// Euclidean distance between a and b restricted to the plane axes.
double horizontal_distance(const Point3& a, const Point3& b, Plane plane) noexcept;

/// Kinect-v1 joints in file order, then a catch-all for any other name.
enum class JointId : int {
  HipCenter = 0,
  Spine,
  ShoulderCenter,
  Head,
  ShoulderLeft,
  ElbowLeft,
  WristLeft,
  HandLeft,
  ShoulderRight,
  ElbowRight,
  WristRight,
  HandRight,
  HipLeft,
  KneeLeft,
  AnkleLeft,
  FootLeft,
  HipRight,
  KneeRight,
  AnkleRight,
  FootRight,
  Other,
};

inline constexpr int kKinectJointCount = 20;

class JointKind {
public:
  JointKind() = default;
  JointKind(JointId id);  // NOLINT(google-explicit-constructor)
  static JointKind other(std::string name);
  /// Maps a canonical name ("foot_left", ...) to its id, anything else to Other(name).
  static JointKind from_name(std::string_view name);

  JointId id() const noexcept { return id_; }
  std::string name() const;

  auto operator<=>(const JointKind&) const = default;
  bool operator==(const JointKind&) const = default;

private:
  JointId id_ = JointId::Other;
  std::string other_;
};

struct Joint {
  JointKind kind;
  Point3 position;
  double confidence = 1.0;
  /// Set on entries produced by gap interpolation rather than observed.
  bool interpolated = false;

  bool operator==(const Joint&) const = default;
};

/// One skeleton at one instant. Joints are kept sorted by kind; duplicates
/// and out-of-range confidences are rejected.
class SkeletonFrame {
public:
  SkeletonFrame() = default;
  SkeletonFrame(std::int64_t frame_index, double timestamp, std::vector<Joint> joints);

  std::int64_t frame_index() const noexcept { return frame_index_; }
  double timestamp() const noexcept { return timestamp_; }
  std::span<const Joint> joints() const noexcept { return joints_; }
  const Joint* find(const JointKind& kind) const;

  bool operator==(const SkeletonFrame&) const = default;

private:
  std::int64_t frame_index_ = 0;
  double timestamp_ = 0.0;
  std::vector<Joint> joints_;
};

/// Time-ordered frames of one person track. Frame indices and timestamps
/// must strictly increase; violating input is rejected, never reordered.
class PoseSequence {
public:
  PoseSequence() = default;
  PoseSequence(std::vector<SkeletonFrame> frames, double frame_rate_hz, std::string source_id);

  std::span<const SkeletonFrame> frames() const noexcept { return frames_; }
  std::size_t size() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }
  double frame_rate_hz() const noexcept { return frame_rate_hz_; }
  const std::string& source_id() const noexcept { return source_id_; }

  std::vector<double> timestamps() const;

  bool operator==(const PoseSequence&) const = default;

private:
  std::vector<SkeletonFrame> frames_;
  double frame_rate_hz_ = 30.0;
  std::string source_id_;
};

enum class Foot { Left, Right };
std::string_view to_string(Foot foot);
Foot parse_foot(std::string_view text);
inline Foot opposite(Foot f) { return f == Foot::Left ? Foot::Right : Foot::Left; }

struct FootChoice {
  JointKind left = JointId::FootLeft;
  JointKind right = JointId::FootRight;
  JointKind left_fallback = JointId::AnkleLeft;
  JointKind right_fallback = JointId::AnkleRight;
  double min_confidence = 0.0;
};

/// Per-frame foot positions; std::nullopt marks a missing entry.
struct FootTracks {
  std::vector<std::optional<Point3>> left;
  std::vector<std::optional<Point3>> right;
  JointKind left_kind;
  JointKind right_kind;
};

/// Resolves which joints stand for the feet in this sequence: the preferred
/// joint of each side if any frame carries it, else the fallback.
std::pair<JointKind, JointKind> resolve_foot_joints(const PoseSequence& seq, const FootChoice& choice);

/// Throws FormatError when no frame has a foot or ankle joint.
FootTracks foot_positions(const PoseSequence& seq, const FootChoice& choice = {});

}  // namespace gaitpipe
