#include "ganerf/net/generator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ganerf/train/perceptual.hpp"

namespace ganerf::gen {

NeuralTexture::NeuralTexture(int channels, int res, std::mt19937& rng) {
  values = ag::param(nn::init_uniform({channels, res, res}, channels, rng));
}

ImageGenerator::ImageGenerator(const RunConfig& cfg, std::mt19937& rng) {
  nn::UNetConfig uc;
  uc.in_channels = cfg.neural_texture_channels;
  uc.out_channels = 3;
  uc.widths = cfg.unet_widths();
  uc.head = nn::UNetConfig::Head::Sigmoid;
  net = nn::UNet(uc, rng);
}

void ImageGenerator::freeze() {
  nn::ParamMap pm;
  reg(pm);
  for (auto& [name, v] : pm.items) v->requires_grad = false;
  frozen = true;
}

BodyUVRaster rasterize_body_uv(const geom::Mesh& posed, const geom::BodyTemplate& tmpl,
                               const data::Camera& cam, int tex_h, int tex_w) {
  const int H = cam.height, W = cam.width;
  BodyUVRaster out;
  out.height = H;
  out.width = W;
  std::vector<float> depth(static_cast<std::size_t>(H) * W,
                           std::numeric_limits<float>::infinity());
  std::vector<float> uv(static_cast<std::size_t>(H) * W * 2, 0.0f);
  std::vector<std::uint8_t> covered(static_cast<std::size_t>(H) * W, 0);

  const geom::Transform world_to_cam = cam.pose.inverse();
  for (const auto& t : posed.triangles) {
    float u[3], v[3], z[3];
    bool front = true;
    const std::uint32_t vi[3] = {t.a, t.b, t.c};
    for (int k = 0; k < 3; ++k) {
      const geom::Vec3 p = world_to_cam.apply(posed.vertices[vi[k]]);
      if (p.z <= 1e-4f) { front = false; break; }
      z[k] = p.z;
      u[k] = cam.fx * p.x / p.z + cam.cx;
      v[k] = cam.fy * p.y / p.z + cam.cy;
    }
    if (!front) continue;
    const float den = (v[1] - v[2]) * (u[0] - u[2]) + (u[2] - u[1]) * (v[0] - v[2]);
    if (std::fabs(den) < 1e-12f) continue;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min({u[0], u[1], u[2]}) - 0.5f)));
    const int x1 = std::min(W - 1, static_cast<int>(std::ceil(std::max({u[0], u[1], u[2]}))));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min({v[0], v[1], v[2]}) - 0.5f)));
    const int y1 = std::min(H - 1, static_cast<int>(std::ceil(std::max({v[0], v[1], v[2]}))));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const float px = x + 0.5f, py = y + 0.5f;
        const float l0 = ((v[1] - v[2]) * (px - u[2]) + (u[2] - u[1]) * (py - v[2])) / den;
        const float l1 = ((v[2] - v[0]) * (px - u[2]) + (u[0] - u[2]) * (py - v[2])) / den;
        const float l2 = 1.0f - l0 - l1;
        if (l0 < 0 || l1 < 0 || l2 < 0) continue;
        const float inv_z = l0 / z[0] + l1 / z[1] + l2 / z[2];
        const float zz = 1.0f / inv_z;
        const std::size_t pix = static_cast<std::size_t>(y) * W + x;
        if (zz >= depth[pix]) continue;
        depth[pix] = zz;
        // perspective-correct UV
        const float uu = (l0 * tmpl.uv_coords[vi[0]].u / z[0] +
                          l1 * tmpl.uv_coords[vi[1]].u / z[1] +
                          l2 * tmpl.uv_coords[vi[2]].u / z[2]) * zz;
        const float vv = (l0 * tmpl.uv_coords[vi[0]].v / z[0] +
                          l1 * tmpl.uv_coords[vi[1]].v / z[1] +
                          l2 * tmpl.uv_coords[vi[2]].v / z[2]) * zz;
        covered[pix] = 1;
        uv[2 * pix] = uu * static_cast<float>(tex_w) - 0.5f;
        uv[2 * pix + 1] = vv * static_cast<float>(tex_h) - 0.5f;
      }
  }
  for (std::size_t pix = 0; pix < covered.size(); ++pix)
    if (covered[pix]) {
      out.pixels.push_back(static_cast<int>(pix));
      out.tex_coords.push_back(uv[2 * pix]);
      out.tex_coords.push_back(uv[2 * pix + 1]);
    }
  return out;
}

ag::Var render_neural_texture(const BodyUVRaster& raster, const NeuralTexture& texture) {
  const ag::Var rows = ag::grid_sample(texture.values, raster.tex_coords);
  return ag::scatter_rows_to_image(rows, raster.pixels, raster.height, raster.width);
}

ag::Var generate_reference(const ImageGenerator& g, const ag::Var& q) {
  if (!g.frozen)
    throw std::logic_error("image generator must be frozen before inference");
  return g.net.forward(q);
}

PretrainStats pretrain_generator(const data::Dataset& ds, ImageGenerator& g,
                                 NeuralTexture& texture, int iterations,
                                 std::uint32_t seed, bool all_views) {
  if (g.frozen) throw std::logic_error("generator already frozen");
  nn::ParamMap pm;
  g.reg(pm);
  pm.add("neural_texture", texture.values);
  std::vector<ag::Var> params;
  for (auto& [n, v] : pm.items) params.push_back(v);

  train::PerceptualExtractor perceptual(ds.cfg.seed + 77);
  nn::Adam adam;
  PretrainStats stats;

  std::vector<int> cams;
  if (all_views)
    for (int c = 0; c < ds.n_rig_cams(); ++c) cams.push_back(c);
  else
    cams = {ds.rig.front_index, ds.rig.back_index};

  for (int it = 0; it < iterations; ++it) {
    // stateless per-iteration sampling keeps resume deterministic
    std::mt19937 rng(seed ^ (0x9E3779B9u + static_cast<std::uint32_t>(it)));
    const int t = ds.train_ids[rng() % ds.train_ids.size()];
    const int cam_id = cams[rng() % cams.size()];

    const geom::Mesh posed = ds.posed_body(false, t);
    const BodyUVRaster raster =
        rasterize_body_uv(posed, ds.tmpl, ds.camera(cam_id), texture.values->val.dim(1),
                          texture.values->val.dim(2));
    const ag::Var q = render_neural_texture(raster, texture);
    const ag::Var pred = g.net.forward(q);
    const Tensor gt = ds.gt_image(false, t, cam_id);
    const ag::Var l1 = ag::mean_abs_diff(pred, gt);
    const ag::Var lp = train::perceptual_loss(perceptual, pred, gt);
    const ag::Var loss = ag::add_scalars({l1, lp}, {1.0f, 0.1f});
    if (!loss->val.all_finite())
      throw std::runtime_error("non-finite generator pre-training loss at step " +
                               std::to_string(it));
    if (it == 0) stats.first_loss = ag::scalar(loss);
    stats.last_loss = ag::scalar(loss);
    stats.best_l1 = std::min(stats.best_l1, ag::scalar(l1));
    adam.zero_grad(params);
    ag::backward(loss);
    adam.step(params, 2e-3f);
    ++stats.steps;
  }
  g.freeze();
  texture.values->requires_grad = false;
  return stats;
}

void save_generator(const std::string& path, const ImageGenerator& g,
                    const NeuralTexture& texture) {
  nn::ParamMap pm;
  g.reg(pm);
  pm.add("neural_texture", texture.values);
  Checkpoint::from_params(pm).save(path);
}

void load_generator(const std::string& path, ImageGenerator& g, NeuralTexture& texture) {
  nn::ParamMap pm;
  g.reg(pm);
  pm.add("neural_texture", texture.values);
  Checkpoint::load(path).into_params(pm);
  g.freeze();
  texture.values->requires_grad = false;
}

}  // namespace ganerf::gen
