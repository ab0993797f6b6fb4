#include "ganerf/data/scene.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ganerf::data {

namespace {
constexpr float kPi = 3.14159265358979323846f;

float body_radius_at(float y) {
  // piecewise-smooth silhouette: feet .. head
  struct Knot { float y, r; };
  static const Knot knots[] = {{0.10f, 0.10f}, {0.45f, 0.13f}, {0.95f, 0.155f},
                               {1.15f, 0.13f}, {1.40f, 0.17f}, {1.55f, 0.10f},
                               {1.70f, 0.075f}};
  if (y <= knots[0].y) return knots[0].r;
  for (std::size_t i = 1; i < std::size(knots); ++i)
    if (y <= knots[i].y) {
      const float t = (y - knots[i - 1].y) / (knots[i].y - knots[i - 1].y);
      const float s = t * t * (3 - 2 * t);
      return knots[i - 1].r + s * (knots[i].r - knots[i - 1].r);
    }
  return knots[std::size(knots) - 1].r;
}

}  // namespace

geom::BodyTemplate make_body_template(int segments, int rings) {
  if (segments < 3 || rings < 2) throw std::invalid_argument("degenerate body resolution");
  geom::BodyTemplate tmpl;
  // joint chain: root(0) -> spine(1) -> chest(2) -> head(3); root -> leg1(4) -> leg2(5)
  tmpl.joint_parents = {-1, 0, 1, 2, 0, 4};
  tmpl.rest_joint_positions = {{0, 0.95f, 0}, {0, 1.20f, 0}, {0, 1.40f, 0},
                               {0, 1.60f, 0}, {0, 0.60f, 0}, {0, 0.30f, 0}};
  const int J = tmpl.joint_count();
  const float y0 = 0.10f, y1 = 1.70f;

  // open tapered tube; the UV seam duplicates the first column so the
  // atlas stays injective
  const int cols = segments + 1;
  for (int ri = 0; ri < rings; ++ri) {
    const float t = static_cast<float>(ri) / (rings - 1);
    const float y = y0 + t * (y1 - y0);
    const float r = body_radius_at(y);
    for (int ci = 0; ci < cols; ++ci) {
      const float a = 2.0f * kPi * static_cast<float>(ci % segments) / segments;
      tmpl.canonical_mesh.vertices.push_back({r * std::sin(a), y, r * std::cos(a)});
      tmpl.uv_coords.push_back({static_cast<float>(ci) / segments * 0.96f + 0.02f,
                                t * 0.96f + 0.02f});
      // height-based weights over the collinear joint chain
      std::vector<float> w(J, 0.0f);
      float total = 0.0f;
      for (int j = 0; j < J; ++j) {
        const float d = std::fabs(y - tmpl.rest_joint_positions[j].y);
        const float wj = std::max(0.0f, 1.0f - d / 0.40f);
        w[j] = wj * wj;
        total += w[j];
      }
      if (total <= 0.0f) {
        // outside every influence radius: bind to nearest joint
        int best = 0;
        float bd = 1e9f;
        for (int j = 0; j < J; ++j) {
          const float d = std::fabs(y - tmpl.rest_joint_positions[j].y);
          if (d < bd) { bd = d; best = j; }
        }
        w[best] = 1.0f;
        total = 1.0f;
      }
      for (auto& x : w) x /= total;
      tmpl.skinning_weights.push_back(std::move(w));
    }
  }
  for (int ri = 0; ri + 1 < rings; ++ri)
    for (int ci = 0; ci < segments; ++ci) {
      const std::uint32_t a = ri * cols + ci, b = ri * cols + ci + 1;
      const std::uint32_t c = (ri + 1) * cols + ci, d = (ri + 1) * cols + ci + 1;
      tmpl.canonical_mesh.triangles.push_back({a, b, c});
      tmpl.canonical_mesh.triangles.push_back({b, d, c});
    }
  tmpl.validate();
  return tmpl;
}

geom::MotionSequence generate_motion(const MotionConfig& cfg, int n_frames, int n_joints) {
  geom::MotionSequence seq;
  seq.frame_rate = cfg.frame_rate;
  std::mt19937 rng(cfg.seed);
  std::uniform_real_distribution<float> uni(0.0f, 1.0f);

  struct JointCurve { float amp, freq, phase; int axis; };
  std::vector<JointCurve> curves(n_joints);
  const float max_step = cfg.max_joint_step_deg * kPi / 180.0f;
  for (auto& c : curves) {
    c.amp = cfg.amplitude * (0.15f + 0.25f * uni(rng));      // radians
    c.freq = 0.3f + 0.9f * uni(rng);                          // Hz
    c.phase = 2.0f * kPi * uni(rng);
    c.axis = uni(rng) < 0.5f ? 0 : 2;
    // band limit: |d angle/d frame| <= amp * 2 pi f / fps
    const float step = c.amp * 2.0f * kPi * c.freq / cfg.frame_rate;
    if (step > max_step) c.amp *= max_step / step;
  }
  const float sway_amp = 0.22f * cfg.amplitude;
  const float sway_freq = 0.4f + 0.3f * uni(rng);
  const float yaw_amp = 0.35f * cfg.amplitude;
  const float yaw_freq = 0.25f + 0.2f * uni(rng);

  for (int t = 0; t < n_frames; ++t) {
    geom::PoseFrame f;
    f.frame_index = t;
    const float time = static_cast<float>(t) / cfg.frame_rate;
    for (int j = 0; j < n_joints; ++j) {
      const auto& c = curves[j];
      const float ang = c.amp * std::sin(2.0f * kPi * c.freq * time + c.phase);
      f.joint_rotations.push_back(c.axis == 0 ? geom::Mat3::rotation_x(ang)
                                              : geom::Mat3::rotation_z(ang));
    }
    f.root_transform.rot =
        geom::Mat3::rotation_y(yaw_amp * std::sin(2.0f * kPi * yaw_freq * time));
    f.root_transform.trans = {sway_amp * std::sin(2.0f * kPi * sway_freq * time), 0.0f,
                              0.6f * sway_amp * std::cos(2.0f * kPi * sway_freq * time)};
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

namespace {

geom::Vec3 smoothed_velocity(const std::vector<geom::Vec3>& hist) {
  if (hist.empty()) return {0, 0, 0};
  geom::Vec3 acc{0, 0, 0};
  for (const auto& v : hist) acc += v;
  return acc * (1.0f / static_cast<float>(hist.size()));
}

}  // namespace

geom::Mesh generate_garment_frame(const geom::Transform& root,
                                  const std::vector<geom::Vec3>& root_velocity_history,
                                  const GarmentConfig& cfg) {
  const geom::Vec3 vel = smoothed_velocity(root_velocity_history);
  const float speed = vel.norm();
  geom::Mesh mesh;
  const int cols = cfg.segments;  // closed ring, no seam needed without UVs
  for (int ri = 0; ri < cfg.rings; ++ri) {
    const float s = static_cast<float>(ri) / (cfg.rings - 1);  // 0 at waist, 1 at hem
    const float y = cfg.attach_height + s * (cfg.hem_height - cfg.attach_height);
    const float base_r = cfg.attach_radius + s * (cfg.hem_radius - cfg.attach_radius);
    for (int ci = 0; ci < cols; ++ci) {
      const float a = 2.0f * kPi * static_cast<float>(ci) / cols;
      const float wrinkle = cfg.wrinkle_gain * speed *
                            std::sin(static_cast<float>(cfg.wrinkle_lobes) * a) * s;
      const float r = base_r * (1.0f + 0.25f * std::sin(3.0f * s * kPi) * 0.2f) +
                      0.03f * wrinkle;
      geom::Vec3 p{r * std::sin(a), y, r * std::cos(a)};
      // swing opposite the smoothed root velocity, growing toward the hem
      p += vel * (-cfg.swing_gain * s);
      // garment follows the body root rigidly at the waist
      mesh.vertices.push_back(root.apply(p - geom::Vec3{0, 0, 0}));
    }
  }
  for (int ri = 0; ri + 1 < cfg.rings; ++ri)
    for (int ci = 0; ci < cols; ++ci) {
      const std::uint32_t a = ri * cols + ci;
      const std::uint32_t b = ri * cols + (ci + 1) % cols;
      const std::uint32_t c = (ri + 1) * cols + ci;
      const std::uint32_t d = (ri + 1) * cols + (ci + 1) % cols;
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({b, d, c});
    }
  return mesh;
}

std::vector<float> garment_wrinkle_scalars(const geom::Transform& root,
                                           const std::vector<geom::Vec3>& root_velocity_history,
                                           const GarmentConfig& cfg) {
  (void)root;
  const float speed = smoothed_velocity(root_velocity_history).norm();
  std::vector<float> out;
  out.reserve(static_cast<std::size_t>(cfg.rings) * cfg.segments);
  for (int ri = 0; ri < cfg.rings; ++ri) {
    const float s = static_cast<float>(ri) / (cfg.rings - 1);
    for (int ci = 0; ci < cfg.segments; ++ci) {
      const float a = 2.0f * kPi * static_cast<float>(ci) / cfg.segments;
      out.push_back(cfg.wrinkle_gain * speed *
                    std::sin(static_cast<float>(cfg.wrinkle_lobes) * a) * s);
    }
  }
  return out;
}

geom::Vec3 root_position(const geom::PoseFrame& frame) {
  return frame.root_transform.trans;
}

}  // namespace ganerf::data
