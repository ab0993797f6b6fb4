#pragma once

#include <vector>

#include "ganerf/core/tensor.hpp"
#include "ganerf/geometry/geometry.hpp"

namespace ganerf::maps {

// Body-UV texture-space raster. `data` is CHW; texels not covered by the
// UV atlas are exactly 0 with validity false.
struct UVRaster {
  int height = 0, width = 0, channels = 0;
  Tensor data;                 // [C, H, W]
  std::vector<uint8_t> valid;  // H*W

  bool valid_at(int y, int x) const { return valid[static_cast<std::size_t>(y) * width + x] != 0; }
};

// Per-vertex positions for frames t, t-1, ..., t-k.
struct HistoryWindow {
  int k = 0;
  std::vector<std::vector<geom::Vec3>> world_positions;  // k+1 arrays, index 0 = frame t
  std::vector<geom::Transform> root_transforms;          // per history frame, for alignment
};

// Barycentric rasterization of a per-vertex attribute into the UV atlas
// at texel centers.
UVRaster rasterize_uv(const geom::BodyTemplate& tmpl,
                      const std::vector<std::vector<float>>& per_vertex_attr,
                      int height, int width);

// Multiplicity of atlas coverage per texel (the injectivity audit).
std::vector<int> uv_coverage_counts(const geom::BodyTemplate& tmpl, int height, int width);

// Root-aligned unit normals of the posed mesh, rasterized to UV.
UVRaster normal_map(const geom::Mesh& posed, const geom::BodyTemplate& tmpl,
                    const geom::PoseFrame& pose, int height, int width,
                    bool root_align = true);

// Backward finite differences of per-vertex world positions, one
// 3-channel block per history step; 3k channels total.
UVRaster velocity_map(const HistoryWindow& window, const geom::BodyTemplate& tmpl,
                      int height, int width, bool root_align = true);

}  // namespace ganerf::maps
