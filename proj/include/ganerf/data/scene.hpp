#pragma once

#include <cstdint>
#include <vector>

#include "ganerf/geometry/geometry.hpp"

namespace ganerf::data {

// Procedural articulated body: a tapered vertical tube with a 6-joint
// chain (spine up from the root, leg chain down), smooth height-based
// skinning weights and a seam-duplicated cylindrical UV atlas.
geom::BodyTemplate make_body_template(int segments = 24, int rings = 22);

struct MotionConfig {
  std::uint32_t seed = 7;
  float amplitude = 1.0f;       // 0 => identity pose repeated
  float frame_rate = 30.0f;
  float max_joint_step_deg = 15.0f;  // band limit on per-frame joint change
};

geom::MotionSequence generate_motion(const MotionConfig& cfg, int n_frames, int n_joints);

struct GarmentConfig {
  int segments = 32;          // around the axis (even, for rest symmetry)
  int rings = 14;             // down the skirt
  float attach_height = 0.95f;
  float attach_radius = 0.175f;
  float hem_height = 0.35f;
  float hem_radius = 0.48f;
  float swing_gain = 0.9f;    // seconds; hem offset per unit root speed
  float wrinkle_gain = 1.2f;  // radial wrinkle amplitude per unit speed
  int wrinkle_lobes = 8;
};

// Analytic skirt, a pure function of the current root transform and the
// smoothed root-velocity history (newest first, length >= 1).
geom::Mesh generate_garment_frame(const geom::Transform& root,
                                  const std::vector<geom::Vec3>& root_velocity_history,
                                  const GarmentConfig& cfg);

// per-vertex wrinkle displacement magnitude of the latest garment frame,
// used to modulate the garment albedo so wrinkles are visible
std::vector<float> garment_wrinkle_scalars(const geom::Transform& root,
                                           const std::vector<geom::Vec3>& root_velocity_history,
                                           const GarmentConfig& cfg);

// root world positions per frame, for velocity histories
geom::Vec3 root_position(const geom::PoseFrame& frame);

}  // namespace ganerf::data
