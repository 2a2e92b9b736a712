#include "acu/projection.hpp"

#include <cmath>
#include <numbers>

#include "json_util.hpp"

namespace acu {

using nlohmann::json;

Eigen::Matrix3d CameraIntrinsics::K() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) throw Error(ErrorCode::InvalidConfig, "focal lengths must be positive");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidConfig, "image size must be positive");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height))
    throw Error(ErrorCode::InvalidConfig, "principal point outside the image");
}

CameraIntrinsics CameraIntrinsics::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "intrinsics must be an object");
  if (!j.contains("width") || !j.contains("height"))
    throw Error(ErrorCode::InvalidConfig, "intrinsics need width and height");
  const int w = j.at("width").get<int>();
  const int h = j.at("height").get<int>();
  CameraIntrinsics k;
  if (j.contains("h_fov_deg")) {
    try {
      k = intrinsics_from_fov(j.at("h_fov_deg").get<double>(), w, h);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidConfig, e.what());
    }
    detail::read_number(j, "fy", k.fy, ErrorCode::InvalidConfig);
  } else {
    if (!j.contains("fx") || !j.contains("cx") || !j.contains("cy"))
      throw Error(ErrorCode::InvalidConfig, "intrinsics need h_fov_deg or fx, fy, cx, cy");
    k.width = w;
    k.height = h;
    k.fx = j.at("fx").get<double>();
    k.fy = j.value("fy", k.fx);
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
  }
  k.validate();
  return k;
}

json CameraIntrinsics::to_json() const {
  return json{{"fx", fx}, {"fy", fy}, {"cx", cx}, {"cy", cy}, {"width", width}, {"height", height}};
}

CameraIntrinsics intrinsics_from_fov(double h_fov_deg, int width, int height) {
  if (!(h_fov_deg > 0.0 && h_fov_deg < 180.0)) throw Error(ErrorCode::InvalidFov, "horizontal FOV must be in (0, 180)");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidFov, "image size must be positive");
  CameraIntrinsics k;
  k.width = width;
  k.height = height;
  k.fx = width / (2.0 * std::tan(h_fov_deg * std::numbers::pi / 360.0));
  k.fy = k.fx;
  k.cx = width / 2.0;
  k.cy = height / 2.0;
  return k;
}

Vec3 back_project(double u, double v, double z_cam, const CameraIntrinsics& k) {
  if (!(z_cam > 0.0)) throw Error(ErrorCode::NonPositiveDepth, "depth must be positive");
  return {z_cam * (u - k.cx) / k.fx, z_cam * (v - k.cy) / k.fy, z_cam};
}

Vec2 project(const Vec3& p, const CameraIntrinsics& k) {
  if (!(p.z() > 0.0)) throw Error(ErrorCode::BehindCamera, "point is not in front of the camera");
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

SkeletonFrame frame_from_image_json(const json& j, const CameraIntrinsics& k, double min_confidence) {
  if (!j.is_object() || !j.contains("joints") || !j.at("joints").is_object())
    throw Error(ErrorCode::InvalidInput, "skeleton frame needs a 'joints' object");
  SkeletonFrame f;
  detail::read_number(j, "timestamp", f.timestamp, ErrorCode::InvalidInput);
  for (const auto& [id, v] : j.at("joints").items()) {
    if (!v.is_object() || !v.contains("uv") || !v.contains("z"))
      throw Error(ErrorCode::InvalidInput, "joint " + id + ": expected {uv: [u, v], z}");
    const auto& uv = v.at("uv");
    if (!uv.is_array() || uv.size() != 2) throw Error(ErrorCode::InvalidInput, "joint " + id + ": uv must be [u, v]");
    Vec3 p;
    try {
      p = back_project(uv[0].get<double>(), uv[1].get<double>(), v.at("z").get<double>(), k);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidInput, "joint " + id + ": " + e.what());
    }
    f.joints.emplace(id, p);
    if (v.contains("confidence")) f.confidence.emplace(id, v.at("confidence").get<double>());
  }
  return f.without_low_confidence(min_confidence);
}

}  // namespace acu
