#pragma once

#include <cstdint>
#include <vector>

#include "ganerf/core/tensor.hpp"
#include "ganerf/data/camera.hpp"
#include "ganerf/geometry/geometry.hpp"

namespace ganerf::data {

// segmentation labels
enum : std::uint8_t { kBackground = 0, kBody = 1, kGarment = 2 };

struct RenderObject {
  const geom::Mesh* mesh = nullptr;
  std::uint8_t label = kBody;
  geom::Vec3 albedo{0.8f, 0.8f, 0.8f};
  // optional per-vertex albedo modulation (wrinkle shading); empty = none
  std::vector<float> albedo_scale;
};

struct RenderResult {
  Tensor image;                    // [3, H, W] in [0,1]
  std::vector<std::uint8_t> mask;  // H*W, 1 where any object covers
  std::vector<std::uint8_t> seg;   // H*W labels
  std::vector<float> depth;        // H*W camera-space z, +inf on background
};

struct RenderOptions {
  geom::Vec3 light_dir{-0.4f, -1.0f, -0.55f};  // directional, world space
  float ambient = 0.35f;
  bool unshaded = false;  // albedo written directly, no lighting
};

// z-buffered triangle rasterization with perspective-correct attributes
// and flat Lambertian shading; deterministic (scanline-parallel, each
// pixel owned by one row).
RenderResult render_scene(const std::vector<RenderObject>& objects, const Camera& cam,
                          const RenderOptions& opts = {});

// depth-only pass, used for reference-view visibility tests
std::vector<float> render_depth(const geom::Mesh& mesh, const Camera& cam);

}  // namespace ganerf::data
