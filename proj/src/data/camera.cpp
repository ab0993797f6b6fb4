#include "ganerf/data/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace ganerf::data {

bool Camera::project(const geom::Vec3& world, float& u, float& v, float& z) const {
  const geom::Vec3 p = pose.inverse().apply(world);
  z = p.z;
  if (p.z <= 1e-6f) return false;
  u = fx * p.x / p.z + cx;
  v = fy * p.y / p.z + cy;
  return true;
}

geom::Vec3 Camera::ray_dir(float u, float v) const {
  const geom::Vec3 d{(u - cx) / fx, (v - cy) / fy, 1.0f};
  return pose.rot.apply(d).normalized();
}

Camera make_look_at_camera(const geom::Vec3& pos, const geom::Vec3& target, int res_h,
                           int res_w, float fov_deg) {
  Camera cam;
  const geom::Vec3 z = (target - pos).normalized();
  geom::Vec3 x = z.cross({0, 1, 0});
  if (x.norm() < 1e-6f) x = {1, 0, 0};  // looking straight up/down
  x = x.normalized();
  const geom::Vec3 y = z.cross(x);
  cam.pose.rot.m = {x.x, y.x, z.x, x.y, y.y, z.y, x.z, y.z, z.z};
  cam.pose.trans = pos;
  cam.height = res_h;
  cam.width = res_w;
  const float f = 0.5f * static_cast<float>(res_h) /
                  std::tan(0.5f * fov_deg * 3.14159265358979323846f / 180.0f);
  cam.fx = cam.fy = f;
  cam.cx = 0.5f * static_cast<float>(res_w);
  cam.cy = 0.5f * static_cast<float>(res_h);
  return cam;
}

CameraRig make_camera_rig(int n, float radius, float cam_height, float look_height,
                          int res_h, int res_w, float azimuth_offset_deg) {
  if (n < 2) throw std::invalid_argument("camera rig needs at least 2 cameras");
  CameraRig rig;
  const float off = azimuth_offset_deg * 3.14159265358979323846f / 180.0f;
  for (int i = 0; i < n; ++i) {
    const float az = off + 2.0f * 3.14159265358979323846f * static_cast<float>(i) / n;
    const geom::Vec3 pos{radius * std::sin(az), cam_height, radius * std::cos(az)};
    rig.cameras.push_back(make_look_at_camera(pos, {0, look_height, 0}, res_h, res_w));
  }
  rig.front_index = 0;
  // nearest camera to azimuth 180 degrees
  int best = 0;
  float best_d = 1e9f;
  for (int i = 0; i < n; ++i) {
    const float az = 360.0f * static_cast<float>(i) / n + azimuth_offset_deg;
    const float d = std::fabs(std::remainder(az - 180.0f, 360.0f));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  rig.back_index = best;
  return rig;
}

}  // namespace ganerf::data
