#pragma once

#include <vector>

#include "ganerf/geometry/geometry.hpp"

namespace ganerf::data {

// Pinhole camera, OpenCV convention: +z forward, y down in the image.
struct Camera {
  geom::Transform pose;  // world-from-camera
  float fx = 0, fy = 0, cx = 0, cy = 0;
  int height = 0, width = 0;

  // returns false if the point is behind the camera
  bool project(const geom::Vec3& world, float& u, float& v, float& z) const;
  geom::Vec3 ray_dir(float u, float v) const;  // unit direction in world space
  geom::Vec3 center() const { return pose.trans; }
  geom::Vec3 forward() const { return pose.rot.apply({0, 0, 1}); }
};

struct CameraRig {
  std::vector<Camera> cameras;
  int front_index = 0;
  int back_index = 0;
};

// n cameras spaced equally in azimuth on a circle of the given radius,
// all looking at (0, look_height, 0). Azimuth 0 is the front camera,
// the back camera is the one nearest 180 degrees.
CameraRig make_camera_rig(int n, float radius, float cam_height, float look_height,
                          int res_h, int res_w, float azimuth_offset_deg = 0.0f);

Camera make_look_at_camera(const geom::Vec3& pos, const geom::Vec3& target, int res_h,
                           int res_w, float fov_deg = 45.0f);

}  // namespace ganerf::data
