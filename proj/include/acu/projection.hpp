#pragma once

#include <json.hpp>

#include "acu/anatomy.hpp"
#include "acu/geometry.hpp"

namespace acu {

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  Eigen::Matrix3d K() const;
  // Throws InvalidConfig unless fx, fy > 0 and the principal point is inside the image.
  void validate() const;

  // {"h_fov_deg", "width", "height"[, "fy"]} or {"fx", "fy", "cx", "cy", "width", "height"}
  static CameraIntrinsics from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Square pixels, principal point at the image center.
CameraIntrinsics intrinsics_from_fov(double h_fov_deg, int width, int height);

// P = z * K^-1 * [u, v, 1]^T
Vec3 back_project(double u, double v, double z_cam, const CameraIntrinsics& k);

Vec2 project(const Vec3& p, const CameraIntrinsics& k);

// Image-space skeleton: {"timestamp": t, "joints": {"<id>": {"uv": [u, v], "z": z, "confidence": c}}}.
// Joints are back-projected into camera space (cm).
SkeletonFrame frame_from_image_json(const nlohmann::json& j, const CameraIntrinsics& k,
                                    double min_confidence = kDefaultMinConfidence);

}  // namespace acu
