#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ganerf::geom {

struct Vec3 {
  float x = 0, y = 0, z = 0;
  Vec3() = default;
  Vec3(float x_, float y_, float z_) : x(x_), y(y_), z(z_) {}
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(float s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  float dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  float norm() const;
  Vec3 normalized() const;
};

struct Vec2 {
  float u = 0, v = 0;
};

struct Mat3 {
  // row-major
  std::array<float, 9> m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  static Mat3 identity() { return {}; }
  static Mat3 rotation_x(float rad);
  static Mat3 rotation_y(float rad);
  static Mat3 rotation_z(float rad);
  static Mat3 axis_angle(const Vec3& axis, float rad);
  Vec3 apply(const Vec3& v) const;
  Mat3 mul(const Mat3& o) const;
  Mat3 transposed() const;
  bool is_orthonormal(float tol = 1e-6f) const;
};

struct Transform {
  Mat3 rot;
  Vec3 trans;
  Vec3 apply(const Vec3& v) const { return rot.apply(v) + trans; }
  Transform mul(const Transform& o) const {
    return {rot.mul(o.rot), rot.apply(o.trans) + trans};
  }
  Transform inverse() const;
  static Transform identity() { return {}; }
};

struct Tri {
  std::uint32_t a, b, c;
};

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Tri> triangles;

  void validate() const;  // index bounds
  std::vector<Vec3> vertex_normals() const;  // area-weighted, unit length
  void bounds(Vec3& lo, Vec3& hi) const;
};

struct BodyTemplate {
  Mesh canonical_mesh;
  std::vector<Vec2> uv_coords;                 // per vertex, in [0,1]^2
  std::vector<std::vector<float>> skinning_weights;  // per vertex, J entries
  std::vector<int> joint_parents;              // parent index, -1 for root
  std::vector<Vec3> rest_joint_positions;      // world-space rest joints

  int joint_count() const { return static_cast<int>(joint_parents.size()); }
  void validate() const;
};

struct PoseFrame {
  Transform root_transform;
  std::vector<Mat3> joint_rotations;  // local, one per joint
  int frame_index = 0;
};

struct MotionSequence {
  std::vector<PoseFrame> frames;
  float frame_rate = 30.0f;
};

struct SurfaceSample {
  Vec3 position;          // b_t
  int triangle_index = -1;
  std::array<float, 3> barycentric = {0, 0, 0};
  float distance = 0;     // h = |x - b_t|
};

struct BodyAwareFeature {
  Vec3 canonical_point;  // b_o
  float distance = 0;    // h
};

// Linear blend skinning. Joint-count mismatch is a configuration error.
Mesh pose_body(const BodyTemplate& tmpl, const PoseFrame& pose);

// Globally nearest surface point; exhaustive scan over every
// non-degenerate triangle, ties broken by lowest triangle index.
SurfaceSample closest_point_exhaustive(const Mesh& mesh, const Vec3& x);

// BVH over triangle AABBs, built once per posed mesh and read-only after.
class ClosestPointBVH {
 public:
  explicit ClosestPointBVH(const Mesh& mesh);
  SurfaceSample query(const Vec3& x) const;

 private:
  struct NodeBox {
    Vec3 lo, hi;
    int left = -1, right = -1;   // children, or
    int first = 0, count = 0;    // leaf triangle range
  };
  const Mesh& mesh_;
  std::vector<NodeBox> nodes_;
  std::vector<int> tri_order_;
  int build(std::vector<int>& tris, int first, int count);
};

SurfaceSample closest_point(const Mesh& mesh, const Vec3& x);

Vec3 to_canonical(const BodyTemplate& tmpl, const SurfaceSample& sample);

BodyAwareFeature body_relative_feature(const Vec3& x, const Mesh& posed,
                                       const BodyTemplate& tmpl,
                                       const ClosestPointBVH* bvh = nullptr);

// UV of the canonical surface point of a sample (barycentric over the
// matched triangle's per-vertex UVs).
Vec2 sample_uv(const BodyTemplate& tmpl, const SurfaceSample& sample);

// closest point from a point to one triangle (Ericson); also reports
// clamped barycentric coordinates
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c, std::array<float, 3>& bary);

float root_yaw(const PoseFrame& pose);

// Template directory IO: `manifest` text file plus raw little-endian
// float32 arrays (vertices.f32, uv.f32, weights.f32) and uint32 triangle
// indices (triangles.u32).
void save_template(const std::string& dir, const BodyTemplate& tmpl);
BodyTemplate load_template(const std::string& dir);

// Single-file binary mesh used inside dataset frame directories.
void save_mesh(const std::string& path, const Mesh& mesh);
Mesh load_mesh(const std::string& path);

}  // namespace ganerf::geom
