#include "ganerf/data/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ganerf::data {

namespace {

struct ProjTri {
  float u[3], v[3], z[3];    // screen coords + camera depth
  geom::Vec3 n;              // world-space face normal (unit)
  float shade[3];            // per-vertex albedo scale
  int obj;
  std::uint32_t vi[3];
  float min_u, max_u, min_v, max_v;
};

}  // namespace

RenderResult render_scene(const std::vector<RenderObject>& objects, const Camera& cam,
                          const RenderOptions& opts) {
  const int H = cam.height, W = cam.width;
  RenderResult out;
  out.image = Tensor::zeros({3, H, W});
  out.mask.assign(static_cast<std::size_t>(H) * W, 0);
  out.seg.assign(static_cast<std::size_t>(H) * W, kBackground);
  out.depth.assign(static_cast<std::size_t>(H) * W, std::numeric_limits<float>::infinity());

  std::vector<ProjTri> tris;
  const geom::Transform world_to_cam = cam.pose.inverse();
  for (int oi = 0; oi < static_cast<int>(objects.size()); ++oi) {
    const auto& obj = objects[oi];
    if (!obj.mesh) continue;
    for (const auto& t : obj.mesh->triangles) {
      ProjTri pt{};
      pt.obj = oi;
      pt.vi[0] = t.a; pt.vi[1] = t.b; pt.vi[2] = t.c;
      bool front = true;
      for (int k = 0; k < 3; ++k) {
        const geom::Vec3 p = world_to_cam.apply(obj.mesh->vertices[pt.vi[k]]);
        if (p.z <= 1e-4f) { front = false; break; }
        pt.z[k] = p.z;
        pt.u[k] = cam.fx * p.x / p.z + cam.cx;
        pt.v[k] = cam.fy * p.y / p.z + cam.cy;
        pt.shade[k] = obj.albedo_scale.empty() ? 0.0f : obj.albedo_scale[pt.vi[k]];
      }
      if (!front) continue;
      const geom::Vec3 e1 = obj.mesh->vertices[t.b] - obj.mesh->vertices[t.a];
      const geom::Vec3 e2 = obj.mesh->vertices[t.c] - obj.mesh->vertices[t.a];
      pt.n = e1.cross(e2).normalized();
      pt.min_u = std::min({pt.u[0], pt.u[1], pt.u[2]});
      pt.max_u = std::max({pt.u[0], pt.u[1], pt.u[2]});
      pt.min_v = std::min({pt.v[0], pt.v[1], pt.v[2]});
      pt.max_v = std::max({pt.v[0], pt.v[1], pt.v[2]});
      if (pt.max_u < 0 || pt.min_u >= W || pt.max_v < 0 || pt.min_v >= H) continue;
      tris.push_back(pt);
    }
  }

  const geom::Vec3 light = opts.light_dir.normalized() * -1.0f;

#pragma omp parallel for schedule(static)
  for (int y = 0; y < H; ++y) {
    const float py = y + 0.5f;
    for (const auto& t : tris) {
      if (py < t.min_v || py > t.max_v + 1.0f) continue;
      const float den = (t.v[1] - t.v[2]) * (t.u[0] - t.u[2]) +
                        (t.u[2] - t.u[1]) * (t.v[0] - t.v[2]);
      if (std::fabs(den) < 1e-12f) continue;
      const int x0 = std::max(0, static_cast<int>(std::floor(t.min_u - 0.5f)));
      const int x1 = std::min(W - 1, static_cast<int>(std::ceil(t.max_u)));
      for (int x = x0; x <= x1; ++x) {
        const float px = x + 0.5f;
        const float l0 = ((t.v[1] - t.v[2]) * (px - t.u[2]) +
                          (t.u[2] - t.u[1]) * (py - t.v[2])) / den;
        const float l1 = ((t.v[2] - t.v[0]) * (px - t.u[2]) +
                          (t.u[0] - t.u[2]) * (py - t.v[2])) / den;
        const float l2 = 1.0f - l0 - l1;
        if (l0 < 0 || l1 < 0 || l2 < 0) continue;
        // perspective-correct depth
        const float inv_z = l0 / t.z[0] + l1 / t.z[1] + l2 / t.z[2];
        const float z = 1.0f / inv_z;
        const std::size_t pix = static_cast<std::size_t>(y) * W + x;
        if (z >= out.depth[pix]) continue;
        out.depth[pix] = z;
        const auto& obj = objects[t.obj];
        const float shade_attr = (l0 * t.shade[0] / t.z[0] + l1 * t.shade[1] / t.z[1] +
                                  l2 * t.shade[2] / t.z[2]) * z;
        geom::Vec3 albedo = obj.albedo * (1.0f + 0.45f * shade_attr);
        float lum = 1.0f;
        if (!opts.unshaded) {
          const float ndl = std::fabs(t.n.dot(light));
          lum = opts.ambient + (1.0f - opts.ambient) * ndl;
        }
        out.image.at3(0, y, x) = std::clamp(albedo.x * lum, 0.0f, 1.0f);
        out.image.at3(1, y, x) = std::clamp(albedo.y * lum, 0.0f, 1.0f);
        out.image.at3(2, y, x) = std::clamp(albedo.z * lum, 0.0f, 1.0f);
        out.mask[pix] = 1;
        out.seg[pix] = obj.label;
      }
    }
  }
  return out;
}

std::vector<float> render_depth(const geom::Mesh& mesh, const Camera& cam) {
  RenderObject obj;
  obj.mesh = &mesh;
  RenderOptions opts;
  opts.unshaded = true;
  return render_scene({obj}, cam, opts).depth;
}

}  // namespace ganerf::data
