#include "ganerf/geometry/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ganerf::geom {

namespace {
constexpr float kDegenerateArea = 1e-12f;
}

float Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 Vec3::normalized() const {
  const float n = norm();
  if (n <= 0.0f) return {0, 0, 0};
  return {x / n, y / n, z / n};
}

Mat3 Mat3::rotation_x(float r) {
  const float c = std::cos(r), s = std::sin(r);
  Mat3 m;
  m.m = {1, 0, 0, 0, c, -s, 0, s, c};
  return m;
}
Mat3 Mat3::rotation_y(float r) {
  const float c = std::cos(r), s = std::sin(r);
  Mat3 m;
  m.m = {c, 0, s, 0, 1, 0, -s, 0, c};
  return m;
}
Mat3 Mat3::rotation_z(float r) {
  const float c = std::cos(r), s = std::sin(r);
  Mat3 m;
  m.m = {c, -s, 0, s, c, 0, 0, 0, 1};
  return m;
}

Mat3 Mat3::axis_angle(const Vec3& axis, float rad) {
  const Vec3 a = axis.normalized();
  const float c = std::cos(rad), s = std::sin(rad), t = 1 - c;
  Mat3 m;
  m.m = {t * a.x * a.x + c,        t * a.x * a.y - s * a.z, t * a.x * a.z + s * a.y,
         t * a.x * a.y + s * a.z,  t * a.y * a.y + c,       t * a.y * a.z - s * a.x,
         t * a.x * a.z - s * a.y,  t * a.y * a.z + s * a.x, t * a.z * a.z + c};
  return m;
}

Vec3 Mat3::apply(const Vec3& v) const {
  return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
          m[3] * v.x + m[4] * v.y + m[5] * v.z,
          m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

Mat3 Mat3::mul(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      float acc = 0;
      for (int k = 0; k < 3; ++k) acc += m[i * 3 + k] * o.m[k * 3 + j];
      r.m[i * 3 + j] = acc;
    }
  return r;
}

Mat3 Mat3::transposed() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i * 3 + j] = m[j * 3 + i];
  return r;
}

bool Mat3::is_orthonormal(float tol) const {
  const Mat3 t = mul(transposed());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const float want = i == j ? 1.0f : 0.0f;
      if (std::fabs(t.m[i * 3 + j] - want) > tol) return false;
    }
  return true;
}

Transform Transform::inverse() const {
  const Mat3 rt = rot.transposed();
  return {rt, rt.apply(trans) * -1.0f};
}

void Mesh::validate() const {
  for (const auto& t : triangles)
    if (t.a >= vertices.size() || t.b >= vertices.size() || t.c >= vertices.size())
      throw std::domain_error("triangle index out of range");
}

std::vector<Vec3> Mesh::vertex_normals() const {
  std::vector<Vec3> acc(vertices.size());
  for (const auto& t : triangles) {
    const Vec3 n = (vertices[t.b] - vertices[t.a]).cross(vertices[t.c] - vertices[t.a]);
    acc[t.a] += n;
    acc[t.b] += n;
    acc[t.c] += n;
  }
  for (auto& n : acc) n = n.normalized();
  return acc;
}

void Mesh::bounds(Vec3& lo, Vec3& hi) const {
  lo = {std::numeric_limits<float>::max(), std::numeric_limits<float>::max(),
        std::numeric_limits<float>::max()};
  hi = {std::numeric_limits<float>::lowest(), std::numeric_limits<float>::lowest(),
        std::numeric_limits<float>::lowest()};
  for (const auto& v : vertices) {
    lo.x = std::min(lo.x, v.x); lo.y = std::min(lo.y, v.y); lo.z = std::min(lo.z, v.z);
    hi.x = std::max(hi.x, v.x); hi.y = std::max(hi.y, v.y); hi.z = std::max(hi.z, v.z);
  }
}

void BodyTemplate::validate() const {
  canonical_mesh.validate();
  const std::size_t n = canonical_mesh.vertices.size();
  if (uv_coords.size() != n || skinning_weights.size() != n)
    throw std::domain_error("template per-vertex array size mismatch");
  for (const auto& w : skinning_weights) {
    if (static_cast<int>(w.size()) != joint_count())
      throw std::domain_error("skinning weight width mismatch");
    float s = 0;
    for (float v : w) {
      if (v < -1e-6f) throw std::domain_error("negative skinning weight");
      s += v;
    }
    if (std::fabs(s - 1.0f) > 1e-5f) throw std::domain_error("skinning weights must sum to 1");
  }
  // degenerate triangles are rejected at load
  for (const auto& t : canonical_mesh.triangles) {
    const Vec3 n = (canonical_mesh.vertices[t.b] - canonical_mesh.vertices[t.a])
                       .cross(canonical_mesh.vertices[t.c] - canonical_mesh.vertices[t.a]);
    if (0.5f * n.norm() < kDegenerateArea)
      throw std::domain_error("degenerate triangle in template");
  }
}

Mesh pose_body(const BodyTemplate& tmpl, const PoseFrame& pose) {
  const int J = tmpl.joint_count();
  if (static_cast<int>(pose.joint_rotations.size()) != J)
    throw std::invalid_argument("joint count mismatch: pose has " +
                                std::to_string(pose.joint_rotations.size()) +
                                ", template has " + std::to_string(J));
  // global joint transforms down the tree; parents precede children
  std::vector<Transform> global(J);
  for (int j = 0; j < J; ++j) {
    const int p = tmpl.joint_parents[j];
    Transform local;
    local.rot = pose.joint_rotations[j];
    if (p < 0) {
      local.trans = tmpl.rest_joint_positions[j];
      global[j] = pose.root_transform.mul(local);
    } else {
      local.trans = tmpl.rest_joint_positions[j] - tmpl.rest_joint_positions[p];
      global[j] = global[p].mul(local);
    }
  }
  // skinning matrix = global * inverse(rest) with identity rest rotations
  std::vector<Transform> skin(J);
  for (int j = 0; j < J; ++j)
    skin[j] = global[j].mul(Transform{Mat3::identity(), tmpl.rest_joint_positions[j] * -1.0f});

  Mesh out;
  out.triangles = tmpl.canonical_mesh.triangles;
  out.vertices.resize(tmpl.canonical_mesh.vertices.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(out.vertices.size()); ++i) {
    const Vec3& v = tmpl.canonical_mesh.vertices[i];
    Vec3 acc{0, 0, 0};
    const auto& w = tmpl.skinning_weights[i];
    for (int j = 0; j < J; ++j)
      if (w[j] != 0.0f) acc += skin[j].apply(v) * w[j];
    out.vertices[i] = acc;
  }
  return out;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c, std::array<float, 3>& bary) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const float d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) { bary = {1, 0, 0}; return a; }
  const Vec3 bp = p - b;
  const float d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) { bary = {0, 1, 0}; return b; }
  const float vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    const float v = d1 / (d1 - d3);
    bary = {1 - v, v, 0};
    return a + ab * v;
  }
  const Vec3 cp = p - c;
  const float d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) { bary = {0, 0, 1}; return c; }
  const float vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    const float w = d2 / (d2 - d6);
    bary = {1 - w, 0, w};
    return a + ac * w;
  }
  const float va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    const float w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    bary = {0, 1 - w, w};
    return b + (c - b) * w;
  }
  const float denom = 1.0f / (va + vb + vc);
  const float v = vb * denom, w = vc * denom;
  bary = {1 - v - w, v, w};
  return a + ab * v + ac * w;
}

namespace {

float tri_area(const Mesh& mesh, int ti) {
  const auto& t = mesh.triangles[ti];
  return 0.5f * (mesh.vertices[t.b] - mesh.vertices[t.a])
                    .cross(mesh.vertices[t.c] - mesh.vertices[t.a])
                    .norm();
}

void consider_triangle(const Mesh& mesh, int ti, const Vec3& x, SurfaceSample& best) {
  if (tri_area(mesh, ti) < kDegenerateArea) return;
  const auto& t = mesh.triangles[ti];
  std::array<float, 3> bary;
  const Vec3 q = closest_point_on_triangle(x, mesh.vertices[t.a], mesh.vertices[t.b],
                                           mesh.vertices[t.c], bary);
  const float d = (x - q).norm();
  if (d < best.distance - 1e-9f ||
      (std::fabs(d - best.distance) <= 1e-9f && ti < best.triangle_index) ||
      best.triangle_index < 0) {
    best.position = q;
    best.triangle_index = ti;
    best.barycentric = bary;
    best.distance = d;
  }
}

}  // namespace

SurfaceSample closest_point_exhaustive(const Mesh& mesh, const Vec3& x) {
  if (mesh.triangles.empty()) throw std::domain_error("closest_point on empty mesh");
  SurfaceSample best;
  best.distance = std::numeric_limits<float>::max();
  best.triangle_index = -1;
  for (int ti = 0; ti < static_cast<int>(mesh.triangles.size()); ++ti)
    consider_triangle(mesh, ti, x, best);
  if (best.triangle_index < 0) throw std::domain_error("mesh has only degenerate triangles");
  return best;
}

ClosestPointBVH::ClosestPointBVH(const Mesh& mesh) : mesh_(mesh) {
  if (mesh.triangles.empty()) throw std::domain_error("BVH over empty mesh");
  std::vector<int> tris;
  for (int i = 0; i < static_cast<int>(mesh.triangles.size()); ++i)
    if (tri_area(mesh, i) >= kDegenerateArea) tris.push_back(i);
  if (tris.empty()) throw std::domain_error("mesh has only degenerate triangles");
  tri_order_ = tris;
  build(tri_order_, 0, static_cast<int>(tri_order_.size()));
}

int ClosestPointBVH::build(std::vector<int>& tris, int first, int count) {
  NodeBox node;
  node.lo = {std::numeric_limits<float>::max(), std::numeric_limits<float>::max(),
             std::numeric_limits<float>::max()};
  node.hi = {std::numeric_limits<float>::lowest(), std::numeric_limits<float>::lowest(),
             std::numeric_limits<float>::lowest()};
  for (int i = first; i < first + count; ++i) {
    const auto& t = mesh_.triangles[tris[i]];
    for (const auto& v : {mesh_.vertices[t.a], mesh_.vertices[t.b], mesh_.vertices[t.c]}) {
      node.lo.x = std::min(node.lo.x, v.x); node.lo.y = std::min(node.lo.y, v.y);
      node.lo.z = std::min(node.lo.z, v.z);
      node.hi.x = std::max(node.hi.x, v.x); node.hi.y = std::max(node.hi.y, v.y);
      node.hi.z = std::max(node.hi.z, v.z);
    }
  }
  const int idx = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (count <= 4) {
    nodes_[idx].first = first;
    nodes_[idx].count = count;
    return idx;
  }
  const Vec3 ext = node.hi - node.lo;
  int axis = 0;
  if (ext.y > ext.x && ext.y >= ext.z) axis = 1;
  else if (ext.z > ext.x && ext.z > ext.y) axis = 2;
  auto centroid = [this, axis](int ti) {
    const auto& t = mesh_.triangles[ti];
    const Vec3 c = (mesh_.vertices[t.a] + mesh_.vertices[t.b] + mesh_.vertices[t.c]) *
                   (1.0f / 3.0f);
    return axis == 0 ? c.x : (axis == 1 ? c.y : c.z);
  };
  const int mid = first + count / 2;
  std::nth_element(tris.begin() + first, tris.begin() + mid, tris.begin() + first + count,
                   [&](int a, int b) {
                     const float ca = centroid(a), cb = centroid(b);
                     return ca < cb || (ca == cb && a < b);
                   });
  const int l = build(tris, first, mid - first);
  const int r = build(tris, mid, first + count - mid);
  nodes_[idx].left = l;
  nodes_[idx].right = r;
  return idx;
}

namespace {
float box_dist2(const Vec3& lo, const Vec3& hi, const Vec3& p) {
  const float dx = std::max({lo.x - p.x, 0.0f, p.x - hi.x});
  const float dy = std::max({lo.y - p.y, 0.0f, p.y - hi.y});
  const float dz = std::max({lo.z - p.z, 0.0f, p.z - hi.z});
  return dx * dx + dy * dy + dz * dz;
}
}  // namespace

SurfaceSample ClosestPointBVH::query(const Vec3& x) const {
  SurfaceSample best;
  best.distance = std::numeric_limits<float>::max();
  best.triangle_index = -1;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int ni = stack.back();
    stack.pop_back();
    const auto& n = nodes_[ni];
    if (best.triangle_index >= 0 &&
        box_dist2(n.lo, n.hi, x) > best.distance * best.distance + 1e-12f)
      continue;
    if (n.left < 0) {
      for (int i = n.first; i < n.first + n.count; ++i)
        consider_triangle(mesh_, tri_order_[i], x, best);
    } else {
      // visit nearer child first
      const float dl = box_dist2(nodes_[n.left].lo, nodes_[n.left].hi, x);
      const float dr = box_dist2(nodes_[n.right].lo, nodes_[n.right].hi, x);
      if (dl < dr) {
        stack.push_back(n.right);
        stack.push_back(n.left);
      } else {
        stack.push_back(n.left);
        stack.push_back(n.right);
      }
    }
  }
  return best;
}

SurfaceSample closest_point(const Mesh& mesh, const Vec3& x) {
  return closest_point_exhaustive(mesh, x);
}

Vec3 to_canonical(const BodyTemplate& tmpl, const SurfaceSample& sample) {
  if (sample.triangle_index < 0 ||
      sample.triangle_index >= static_cast<int>(tmpl.canonical_mesh.triangles.size()))
    throw std::domain_error("invalid triangle index in surface sample");
  const auto& t = tmpl.canonical_mesh.triangles[sample.triangle_index];
  const auto& b = sample.barycentric;
  return tmpl.canonical_mesh.vertices[t.a] * b[0] +
         tmpl.canonical_mesh.vertices[t.b] * b[1] +
         tmpl.canonical_mesh.vertices[t.c] * b[2];
}

BodyAwareFeature body_relative_feature(const Vec3& x, const Mesh& posed,
                                       const BodyTemplate& tmpl,
                                       const ClosestPointBVH* bvh) {
  const SurfaceSample s = bvh ? bvh->query(x) : closest_point(posed, x);
  return {to_canonical(tmpl, s), s.distance};
}

Vec2 sample_uv(const BodyTemplate& tmpl, const SurfaceSample& sample) {
  const auto& t = tmpl.canonical_mesh.triangles[sample.triangle_index];
  const auto& b = sample.barycentric;
  return {tmpl.uv_coords[t.a].u * b[0] + tmpl.uv_coords[t.b].u * b[1] +
              tmpl.uv_coords[t.c].u * b[2],
          tmpl.uv_coords[t.a].v * b[0] + tmpl.uv_coords[t.b].v * b[1] +
              tmpl.uv_coords[t.c].v * b[2]};
}

float root_yaw(const PoseFrame& pose) {
  const Vec3 fwd = pose.root_transform.rot.apply({0, 0, 1});
  return std::atan2(fwd.x, fwd.z);
}

namespace {

void write_floats(const std::string& path, const float* p, std::size_t n) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(float)));
}

std::vector<float> read_floats(const std::string& path, std::size_t n) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::vector<float> v(n);
  f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(float)));
  if (!f) throw std::runtime_error("truncated file " + path);
  return v;
}

}  // namespace

void save_template(const std::string& dir, const BodyTemplate& tmpl) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::size_t V = tmpl.canonical_mesh.vertices.size();
  const std::size_t T = tmpl.canonical_mesh.triangles.size();
  const int J = tmpl.joint_count();
  {
    std::ofstream mf(dir + "/manifest");
    mf << "format ganerf-template-1\n";
    mf << "vertices " << V << "\n";
    mf << "triangles " << T << "\n";
    mf << "joints " << J << "\n";
    mf << "joint_parents";
    for (int p : tmpl.joint_parents) mf << " " << p;
    mf << "\n";
    mf << "rest_joints";
    for (const auto& p : tmpl.rest_joint_positions) mf << " " << p.x << " " << p.y << " " << p.z;
    mf << "\n";
  }
  std::vector<float> verts(V * 3), uvs(V * 2), weights(V * J);
  for (std::size_t i = 0; i < V; ++i) {
    verts[3 * i] = tmpl.canonical_mesh.vertices[i].x;
    verts[3 * i + 1] = tmpl.canonical_mesh.vertices[i].y;
    verts[3 * i + 2] = tmpl.canonical_mesh.vertices[i].z;
    uvs[2 * i] = tmpl.uv_coords[i].u;
    uvs[2 * i + 1] = tmpl.uv_coords[i].v;
    for (int j = 0; j < J; ++j) weights[i * J + j] = tmpl.skinning_weights[i][j];
  }
  write_floats(dir + "/vertices.f32", verts.data(), verts.size());
  write_floats(dir + "/uv.f32", uvs.data(), uvs.size());
  write_floats(dir + "/weights.f32", weights.data(), weights.size());
  std::ofstream tf(dir + "/triangles.u32", std::ios::binary);
  tf.write(reinterpret_cast<const char*>(tmpl.canonical_mesh.triangles.data()),
           static_cast<std::streamsize>(T * sizeof(Tri)));
}

BodyTemplate load_template(const std::string& dir) {
  std::ifstream mf(dir + "/manifest");
  if (!mf) throw std::runtime_error("cannot open template manifest in " + dir);
  BodyTemplate tmpl;
  std::size_t V = 0, T = 0;
  int J = 0;
  std::string key;
  while (mf >> key) {
    if (key == "format") {
      std::string fmt;
      mf >> fmt;
      if (fmt != "ganerf-template-1") throw std::runtime_error("unknown template format " + fmt);
    } else if (key == "vertices") mf >> V;
    else if (key == "triangles") mf >> T;
    else if (key == "joints") mf >> J;
    else if (key == "joint_parents") {
      tmpl.joint_parents.resize(J);
      for (auto& p : tmpl.joint_parents) mf >> p;
    } else if (key == "rest_joints") {
      tmpl.rest_joint_positions.resize(J);
      for (auto& p : tmpl.rest_joint_positions) mf >> p.x >> p.y >> p.z;
    } else
      throw std::runtime_error("unknown manifest key: " + key);
  }
  const auto verts = read_floats(dir + "/vertices.f32", V * 3);
  const auto uvs = read_floats(dir + "/uv.f32", V * 2);
  const auto weights = read_floats(dir + "/weights.f32", V * static_cast<std::size_t>(J));
  tmpl.canonical_mesh.vertices.resize(V);
  tmpl.uv_coords.resize(V);
  tmpl.skinning_weights.resize(V);
  for (std::size_t i = 0; i < V; ++i) {
    tmpl.canonical_mesh.vertices[i] = {verts[3 * i], verts[3 * i + 1], verts[3 * i + 2]};
    tmpl.uv_coords[i] = {uvs[2 * i], uvs[2 * i + 1]};
    tmpl.skinning_weights[i].assign(weights.begin() + i * J, weights.begin() + (i + 1) * J);
  }
  tmpl.canonical_mesh.triangles.resize(T);
  std::ifstream tf(dir + "/triangles.u32", std::ios::binary);
  tf.read(reinterpret_cast<char*>(tmpl.canonical_mesh.triangles.data()),
          static_cast<std::streamsize>(T * sizeof(Tri)));
  if (!tf) throw std::runtime_error("truncated triangles.u32 in " + dir);
  tmpl.validate();
  return tmpl;
}

void save_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  const std::uint32_t header[2] = {static_cast<std::uint32_t>(mesh.vertices.size()),
                                   static_cast<std::uint32_t>(mesh.triangles.size())};
  f.write(reinterpret_cast<const char*>(header), sizeof(header));
  f.write(reinterpret_cast<const char*>(mesh.vertices.data()),
          static_cast<std::streamsize>(mesh.vertices.size() * sizeof(Vec3)));
  f.write(reinterpret_cast<const char*>(mesh.triangles.data()),
          static_cast<std::streamsize>(mesh.triangles.size() * sizeof(Tri)));
}

Mesh load_mesh(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::uint32_t header[2];
  f.read(reinterpret_cast<char*>(header), sizeof(header));
  Mesh mesh;
  mesh.vertices.resize(header[0]);
  mesh.triangles.resize(header[1]);
  f.read(reinterpret_cast<char*>(mesh.vertices.data()),
         static_cast<std::streamsize>(mesh.vertices.size() * sizeof(Vec3)));
  f.read(reinterpret_cast<char*>(mesh.triangles.data()),
         static_cast<std::streamsize>(mesh.triangles.size() * sizeof(Tri)));
  if (!f) throw std::runtime_error("truncated mesh " + path);
  mesh.validate();
  return mesh;
}

}  // namespace ganerf::geom
