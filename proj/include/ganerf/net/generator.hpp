#pragma once

#include <string>
#include <vector>

#include "ganerf/core/checkpoint.hpp"
#include "ganerf/core/config.hpp"
#include "ganerf/core/nn.hpp"
#include "ganerf/data/dataset.hpp"

namespace ganerf::gen {

// Learnable body neural texture, [C_nt, H, W] in UV space.
struct NeuralTexture {
  ag::Var values;
  NeuralTexture() = default;
  NeuralTexture(int channels, int res, std::mt19937& rng);
};

// Image-translation network producing RGB reference images from neural
// texture renderings. Frozen after pre-training.
struct ImageGenerator {
  nn::UNet net;
  bool frozen = false;

  ImageGenerator() = default;
  ImageGenerator(const RunConfig& cfg, std::mt19937& rng);
  void freeze();
  void reg(nn::ParamMap& pm) const { net.reg(pm, "gimg"); }
};

// Fixed per-(mesh, camera) rasterization geometry: which pixels the body
// covers and the texture coordinate at each hit point.
struct BodyUVRaster {
  int height = 0, width = 0;
  std::vector<int> pixels;       // covered pixel indices, row-major order
  std::vector<float> tex_coords; // 2 per covered pixel, texel space
};

BodyUVRaster rasterize_body_uv(const geom::Mesh& posed, const geom::BodyTemplate& tmpl,
                               const data::Camera& cam, int tex_h, int tex_w);

// Q_t(c): bilinear texture lookup at hit points scattered into an image;
// background pixels exactly 0. Differentiable w.r.t. texture values.
ag::Var render_neural_texture(const BodyUVRaster& raster, const NeuralTexture& texture);

// reference image from a frozen generator, [3, H, W] in [0,1]
ag::Var generate_reference(const ImageGenerator& g, const ag::Var& q);

struct PretrainStats {
  float first_loss = 0, last_loss = 0, best_l1 = 1e9f;
  int steps = 0;
};

// Joint texture + generator optimization against ground truth at the
// front/back reference cameras (L1 + perceptual).
PretrainStats pretrain_generator(const data::Dataset& ds, ImageGenerator& g,
                                 NeuralTexture& texture, int iterations,
                                 std::uint32_t seed, bool all_views = false);

void save_generator(const std::string& path, const ImageGenerator& g,
                    const NeuralTexture& texture);
void load_generator(const std::string& path, ImageGenerator& g, NeuralTexture& texture);

}  // namespace ganerf::gen
