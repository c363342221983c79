#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "gaitpipe/core_model.hpp"

namespace gaitpipe {

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  /// Throws CalibrationError unless fx, fy are positive and all values finite.
  void validate() const;
};

/// World-to-camera rigid transform: p_cam = rotation * p_world + translation.
/// The rotation is row-major and must be orthonormal with determinant +1.
struct CameraExtrinsics {
  std::array<double, 9> rotation{1, 0, 0, 0, 1, 0, 0, 0, 1};
  Point3 translation;

  void validate(double tolerance = 1e-6) const;
  static CameraExtrinsics identity() { return {}; }
};

struct CameraModel {
  CameraIntrinsics intrinsics;
  CameraExtrinsics extrinsics;
};

struct ImageJoint {
  JointKind kind;
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
  double confidence = 1.0;
};

struct ImagePose {
  std::int64_t frame_index = 0;
  double timestamp = 0.0;
  std::vector<ImageJoint> joints;
};

struct PixelDepth {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

/// Pinhole back-projection of every joint:
///   p_cam   = ((u - cx) Z / fx, (v - cy) Z / fy, Z)
///   p_world = R^T (p_cam - t)
SkeletonFrame back_project(const ImagePose& pose, const CameraIntrinsics& intr, const CameraExtrinsics& extr);

Point3 back_project_point(const PixelDepth& px, const CameraIntrinsics& intr, const CameraExtrinsics& extr);

/// Inverse of back_project_point.
PixelDepth project_point(const Point3& world, const CameraIntrinsics& intr, const CameraExtrinsics& extr);

/// Reinterprets each joint's (x, y, z) as (u, v, depth) and back-projects.
PoseSequence back_project_sequence(const PoseSequence& image_space, const CameraModel& camera);

/// Key-value file with fx, fy, cx, cy, `rotation` (9 values, row-major) and
/// `translation` (3 values). Rotation and translation default to identity.
CameraModel load_camera_config(const std::filesystem::path& path);

}  // namespace gaitpipe
