#include "gaitpipe/camera.hpp"

#include <cmath>

#include "gaitpipe/keyvalue.hpp"

namespace gaitpipe {

void CameraIntrinsics::validate() const {
  if (!std::isfinite(fx) || !std::isfinite(fy) || !std::isfinite(cx) || !std::isfinite(cy)) {
    throw Error(ErrorCode::CalibrationError, "non-finite intrinsics");
  }
  if (!(fx > 0.0) || !(fy > 0.0)) throw Error(ErrorCode::CalibrationError, "focal lengths must be positive");
}

void CameraExtrinsics::validate(double tolerance) const {
  const auto& r = rotation;
  for (double v : r) {
    if (!std::isfinite(v)) throw Error(ErrorCode::CalibrationError, "non-finite rotation entry");
  }
  // R R^T = I
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += r[static_cast<std::size_t>(3 * i + k)] * r[static_cast<std::size_t>(3 * j + k)];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > tolerance) {
        throw Error(ErrorCode::CalibrationError, "rotation is not orthonormal");
      }
    }
  }
  const double det = r[0] * (r[4] * r[8] - r[5] * r[7]) - r[1] * (r[3] * r[8] - r[5] * r[6]) +
                     r[2] * (r[3] * r[7] - r[4] * r[6]);
  if (std::abs(det - 1.0) > tolerance) throw Error(ErrorCode::CalibrationError, "rotation determinant is not +1");
}

Point3 back_project_point(const PixelDepth& px, const CameraIntrinsics& intr, const CameraExtrinsics& extr) {
  if (!(px.depth > 0.0) || !std::isfinite(px.depth)) {
    throw Error(ErrorCode::CalibrationError, "depth must be positive for back-projection");
  }
  const double z = px.depth;
  const double xc = (px.u - intr.cx) * z / intr.fx - extr.translation.x();
  const double yc = (px.v - intr.cy) * z / intr.fy - extr.translation.y();
  const double zc = z - extr.translation.z();
  const auto& r = extr.rotation;
  return {r[0] * xc + r[3] * yc + r[6] * zc, r[1] * xc + r[4] * yc + r[7] * zc, r[2] * xc + r[5] * yc + r[8] * zc};
}

PixelDepth project_point(const Point3& world, const CameraIntrinsics& intr, const CameraExtrinsics& extr) {
  const auto& r = extr.rotation;
  const double xc = r[0] * world.x() + r[1] * world.y() + r[2] * world.z() + extr.translation.x();
  const double yc = r[3] * world.x() + r[4] * world.y() + r[5] * world.z() + extr.translation.y();
  const double zc = r[6] * world.x() + r[7] * world.y() + r[8] * world.z() + extr.translation.z();
  if (!(zc > 0.0)) throw Error(ErrorCode::CalibrationError, "point is behind the camera");
  return {intr.fx * xc / zc + intr.cx, intr.fy * yc / zc + intr.cy, zc};
}

SkeletonFrame back_project(const ImagePose& pose, const CameraIntrinsics& intr, const CameraExtrinsics& extr) {
  intr.validate();
  extr.validate();
  std::vector<Joint> joints;
  joints.reserve(pose.joints.size());
  for (const auto& j : pose.joints) {
    joints.push_back(Joint{j.kind, back_project_point({j.u, j.v, j.depth}, intr, extr), j.confidence, false});
  }
  return SkeletonFrame(pose.frame_index, pose.timestamp, std::move(joints));
}

PoseSequence back_project_sequence(const PoseSequence& image_space, const CameraModel& camera) {
  std::vector<SkeletonFrame> frames;
  frames.reserve(image_space.size());
  for (const auto& f : image_space.frames()) {
    ImagePose pose{f.frame_index(), f.timestamp(), {}};
    for (const auto& j : f.joints()) {
      pose.joints.push_back({j.kind, j.position.x(), j.position.y(), j.position.z(), j.confidence});
    }
    frames.push_back(back_project(pose, camera.intrinsics, camera.extrinsics));
  }
  return PoseSequence(std::move(frames), image_space.frame_rate_hz(), image_space.source_id());
}

CameraModel load_camera_config(const std::filesystem::path& path) {
  const auto doc = KeyValueDoc::load(path);
  CameraModel cam;
  auto need = [&](const char* key) {
    auto v = doc.get_double(key);
    if (!v) throw Error(ErrorCode::CalibrationError, path.string() + ": missing '" + key + "'");
    return *v;
  };
  cam.intrinsics = {need("fx"), need("fy"), need("cx"), need("cy")};
  if (auto rot = doc.get_doubles("rotation")) {
    if (rot->size() != 9) throw Error(ErrorCode::CalibrationError, path.string() + ": rotation needs 9 values");
    std::copy(rot->begin(), rot->end(), cam.extrinsics.rotation.begin());
  }
  if (auto tr = doc.get_doubles("translation")) {
    if (tr->size() != 3) throw Error(ErrorCode::CalibrationError, path.string() + ": translation needs 3 values");
    cam.extrinsics.translation = Point3((*tr)[0], (*tr)[1], (*tr)[2]);
  }
  cam.intrinsics.validate();
  cam.extrinsics.validate();
  return cam;
}

}  // namespace gaitpipe
