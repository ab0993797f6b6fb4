#include "ganerf/maps/infomaps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ganerf::maps {

namespace {

struct UvTri {
  float ax, ay, bx, by, cx, cy;
  float inv_den;
  std::uint32_t ia, ib, ic;
  bool ok;
};

UvTri make_uv_tri(const geom::BodyTemplate& tmpl, const geom::Tri& t, int h, int w) {
  UvTri u{};
  u.ia = t.a; u.ib = t.b; u.ic = t.c;
  const auto& uv = tmpl.uv_coords;
  u.ax = uv[t.a].u * w; u.ay = uv[t.a].v * h;
  u.bx = uv[t.b].u * w; u.by = uv[t.b].v * h;
  u.cx = uv[t.c].u * w; u.cy = uv[t.c].v * h;
  const float den = (u.by - u.cy) * (u.ax - u.cx) + (u.cx - u.bx) * (u.ay - u.cy);
  u.ok = std::fabs(den) > 1e-12f;
  u.inv_den = u.ok ? 1.0f / den : 0.0f;
  return u;
}

template <typename Fn>
void for_each_covered_texel(const geom::BodyTemplate& tmpl, int h, int w, Fn&& fn) {
  for (const auto& t : tmpl.canonical_mesh.triangles) {
    const UvTri u = make_uv_tri(tmpl, t, h, w);
    if (!u.ok) continue;  // zero-area UV triangle
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min({u.ax, u.bx, u.cx}) - 0.5f)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max({u.ax, u.bx, u.cx}))));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min({u.ay, u.by, u.cy}) - 0.5f)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max({u.ay, u.by, u.cy}))));
    for (int y = y0; y <= y1; ++y) {
      const float py = y + 0.5f;
      for (int x = x0; x <= x1; ++x) {
        const float px = x + 0.5f;
        const float l0 = ((u.by - u.cy) * (px - u.cx) + (u.cx - u.bx) * (py - u.cy)) * u.inv_den;
        const float l1 = ((u.cy - u.ay) * (px - u.cx) + (u.ax - u.cx) * (py - u.cy)) * u.inv_den;
        const float l2 = 1.0f - l0 - l1;
        if (l0 < 0.0f || l1 < 0.0f || l2 < 0.0f) continue;
        fn(y, x, u, l0, l1, l2);
      }
    }
  }
}

}  // namespace

UVRaster rasterize_uv(const geom::BodyTemplate& tmpl,
                      const std::vector<std::vector<float>>& per_vertex_attr,
                      int height, int width) {
  if (height <= 0 || width <= 0) throw std::invalid_argument("raster resolution must be > 0");
  if (per_vertex_attr.size() != tmpl.canonical_mesh.vertices.size())
    throw std::invalid_argument("attribute array length must equal vertex count");
  const int c = per_vertex_attr.empty() ? 0 : static_cast<int>(per_vertex_attr[0].size());
  UVRaster out;
  out.height = height;
  out.width = width;
  out.channels = c;
  out.data = Tensor::zeros({c, height, width});
  out.valid.assign(static_cast<std::size_t>(height) * width, 0);
  for_each_covered_texel(tmpl, height, width,
                         [&](int y, int x, const UvTri& u, float l0, float l1, float l2) {
                           out.valid[static_cast<std::size_t>(y) * width + x] = 1;
                           for (int ch = 0; ch < c; ++ch)
                             out.data.at3(ch, y, x) = l0 * per_vertex_attr[u.ia][ch] +
                                                      l1 * per_vertex_attr[u.ib][ch] +
                                                      l2 * per_vertex_attr[u.ic][ch];
                         });
  return out;
}

std::vector<int> uv_coverage_counts(const geom::BodyTemplate& tmpl, int height, int width) {
  std::vector<int> counts(static_cast<std::size_t>(height) * width, 0);
  for_each_covered_texel(tmpl, height, width,
                         [&](int y, int x, const UvTri&, float, float, float) {
                           ++counts[static_cast<std::size_t>(y) * width + x];
                         });
  return counts;
}

UVRaster normal_map(const geom::Mesh& posed, const geom::BodyTemplate& tmpl,
                    const geom::PoseFrame& pose, int height, int width, bool root_align) {
  if (posed.vertices.size() != tmpl.canonical_mesh.vertices.size())
    throw std::invalid_argument("posed mesh topology must match template");
  const auto normals = posed.vertex_normals();
  const geom::Mat3 align =
      root_align ? geom::Mat3::rotation_y(-geom::root_yaw(pose)) : geom::Mat3::identity();
  std::vector<std::vector<float>> attr(normals.size());
  for (std::size_t i = 0; i < normals.size(); ++i) {
    const geom::Vec3 n = align.apply(normals[i]);
    attr[i] = {n.x, n.y, n.z};
  }
  UVRaster out = rasterize_uv(tmpl, attr, height, width);
  // interpolation shortens unit vectors; renormalize per texel
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (out.valid_at(y, x)) {
        float& nx = out.data.at3(0, y, x);
        float& ny = out.data.at3(1, y, x);
        float& nz = out.data.at3(2, y, x);
        const float len = std::sqrt(nx * nx + ny * ny + nz * nz);
        if (len > 1e-12f) {
          nx /= len;
          ny /= len;
          nz /= len;
        }
      }
  return out;
}

UVRaster velocity_map(const HistoryWindow& window, const geom::BodyTemplate& tmpl,
                      int height, int width, bool root_align) {
  const int k = window.k;
  if (k <= 0) {
    UVRaster out;
    out.height = height;
    out.width = width;
    out.channels = 0;
    out.data = Tensor::zeros({0, height, width});
    out.valid.assign(static_cast<std::size_t>(height) * width, 0);
    return out;
  }
  if (static_cast<int>(window.world_positions.size()) != k + 1)
    throw std::domain_error("history window needs k+1 position arrays");
  const std::size_t V = tmpl.canonical_mesh.vertices.size();
  for (const auto& p : window.world_positions)
    if (p.size() != V) throw std::domain_error("vertex count mismatch across history frames");

  geom::Mat3 align = geom::Mat3::identity();
  if (root_align && !window.root_transforms.empty()) {
    geom::PoseFrame tmp;
    tmp.root_transform = window.root_transforms[0];
    align = geom::Mat3::rotation_y(-geom::root_yaw(tmp));
  }
  std::vector<std::vector<float>> attr(V, std::vector<float>(3 * k));
  for (int i = 1; i <= k; ++i) {
    const auto& newer = window.world_positions[i - 1];
    const auto& older = window.world_positions[i];
    for (std::size_t vi = 0; vi < V; ++vi) {
      const geom::Vec3 d = align.apply(newer[vi] - older[vi]);
      attr[vi][3 * (i - 1) + 0] = d.x;
      attr[vi][3 * (i - 1) + 1] = d.y;
      attr[vi][3 * (i - 1) + 2] = d.z;
    }
  }
  return rasterize_uv(tmpl, attr, height, width);
}

}  // namespace ganerf::maps
