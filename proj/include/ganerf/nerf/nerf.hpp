#pragma once

#include <optional>
#include <random>

#include "ganerf/core/config.hpp"
#include "ganerf/core/nn.hpp"
#include "ganerf/data/camera.hpp"
#include "ganerf/geometry/geometry.hpp"
#include "ganerf/net/encoders.hpp"

namespace ganerf::nerf {

// M_NeRF: per-sample (f^s, f^d, x^b) -> (sigma, zeta).
struct RadianceField {
  nn::FieldMLP mlp;
  RadianceField() = default;
  RadianceField(const RunConfig& cfg, std::mt19937& rng);
  void reg(nn::ParamMap& pm) const { mlp.reg(pm, "nerf"); }
};

// evaluates the field on an [N, 20] input; returns sigma [N,1] (>= 0,
// shifted softplus) and zeta [N, feature_dim]
std::pair<ag::Var, ag::Var> eval_field(const RadianceField& field, const ag::Var& input);

struct RaySampleBatch {
  int n_rays = 0;
  std::vector<geom::Vec3> origins, dirs;           // per ray, dirs unit length
  std::vector<int> pixel;                          // ray's target pixel, row-major
  std::vector<int> offset, count;                  // per-ray slice into the sample arrays
  std::vector<geom::Vec3> positions;               // per sample
  std::vector<float> deltas;                       // per sample, > 0
  // filled by lookup_features:
  std::vector<float> xb;                           // 4 per sample: b_o, h
  std::vector<float> fs_coords;                    // 2 per sample, F^s texel space
  std::vector<float> detail_coords;                // 2 per sample, detail-map texel space
  std::vector<std::uint8_t> detail_pick;           // 0 = front, 1 = back

  int total_samples() const { return static_cast<int>(positions.size()); }
};

// Stratified samples along each ray between its entries/exits of the
// axis-aligned box [lo, hi]. Rays that miss the box get zero samples.
// With jitter disabled each sample sits at its bin midpoint.
RaySampleBatch sample_rays(const data::Camera& cam, int res_h, int res_w, int n_samples,
                           const geom::Vec3& lo, const geom::Vec3& hi,
                           std::mt19937* jitter_rng = nullptr);

// Ray slab intersection helper; returns false on a miss.
bool ray_box(const geom::Vec3& o, const geom::Vec3& d, const geom::Vec3& lo,
             const geom::Vec3& hi, float& t_near, float& t_far);

// garment-margin dilated bounds of the posed body
void scene_bounds(const geom::Mesh& posed, float margin_frac, geom::Vec3& lo, geom::Vec3& hi);

struct ReferenceViews {
  data::Camera front_cam, back_cam;
  Tensor front_depth, back_depth;  // [1, H, W], +inf where empty
};

// 0 = front, 1 = back; see the visibility rules in select_reference_view.
std::uint8_t select_reference_view(const geom::Vec3& b_t, const geom::Vec3& normal,
                                   const ReferenceViews& views, float eps = 1e-3f);

// Per-sample geometric lookups: body-aware info (b_o, h), the F^s texel
// coordinate of the matched surface point, and the detail-map texel
// coordinate plus front/back tag at its projection.
void lookup_features(RaySampleBatch& batch, const geom::Mesh& posed,
                     const geom::ClosestPointBVH& bvh, const geom::BodyTemplate& tmpl,
                     const ReferenceViews& views, int fs_h, int fs_w);

// pi_vol over a flat per-sample (sigma, zeta) batch: returns [R, Z+1]
// rows of (feature pixel, accumulated alpha). Differentiable in both.
ag::Var volume_render(const ag::Var& sigma, const ag::Var& zeta,
                      const std::vector<float>& deltas, const std::vector<int>& offset,
                      const std::vector<int>& count);

// Everything fixed per (frame, camera) before network evaluation.
struct FrameGeometry {
  geom::Mesh posed;
  std::shared_ptr<geom::ClosestPointBVH> bvh;
  const geom::BodyTemplate* tmpl = nullptr;
  ReferenceViews views;
  geom::Vec3 lo, hi;
};

struct AppearanceFeatureImage {
  ag::Var features;  // [Z, H, W]
  Tensor alpha;      // [1, H, W]
};

// Renders the feature grid in ray chunks; the result is independent of
// chunk size. Feature maps may be null when the matching ablation toggle
// is off (the corresponding input columns become zeros).
AppearanceFeatureImage render_feature_image(const RunConfig& cfg, const data::Camera& cam,
                                            const FrameGeometry& fg, const RadianceField& field,
                                            const ag::Var& f_s, const ag::Var& f_d_front,
                                            const ag::Var& f_d_back,
                                            std::mt19937* jitter_rng = nullptr);

}  // namespace ganerf::nerf
