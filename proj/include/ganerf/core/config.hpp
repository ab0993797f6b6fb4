#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ganerf {

// Run configuration shared by every subcommand. Stored as flat
// `key = value` text; unknown keys are rejected. The `scale` switch
// (desk | paper) sets all resolution-dependent defaults; any key given
// explicitly in the file overrides its preset value.
struct RunConfig {
  std::string scale = "desk";
  std::uint32_t seed = 1;

  // resolutions
  int image_res = 128;        // ground-truth / composited image
  int uv_res = 64;            // N_t / V_t texel grid
  int feature_res = 32;       // F^zeta grid; decomposition upsamples x4
  int neural_texture_res = 64;
  int neural_texture_channels = 16;

  // scene / data
  int cameras = 16;
  int train_frames = 200;
  int unseen_motion_frames = 50;
  int history_k = 2;
  std::uint32_t motion_seed = 7;
  std::uint32_t unseen_motion_seed = 8;
  float garment_color_r = 0.15f, garment_color_g = 0.25f, garment_color_b = 0.75f;
  float body_color_r = 0.80f, body_color_g = 0.62f, body_color_b = 0.52f;
  bool unshaded = false;  // debug: skip Lambertian shading

  // field / rendering
  int n_samples = 24;
  int nerf_hidden = 64;
  int nerf_depth = 6;
  int zeta_dim = 64;
  float garment_margin = 0.3f;  // bbox dilation as a fraction of body height
  bool root_align = true;
  bool positional_encoding = false;
  int chunk = 4096;

  // network widths
  int unet_stem = 8;    // schedule = stem, 2x, 4x, 8x, 16x
  int decomp_mid = 32;  // mid channels of the 2-layer decomposition net

  // ablation toggles
  bool use_dynamic_feature = true;
  bool use_detail_feature = true;

  // losses / schedule
  float lambda1 = 1.0f, lambda2 = 0.1f, lambda3 = 0.0002f, lambda4 = 0.03f,
        lambda5 = 0.001f;
  float lr_start = 5e-4f, lr_end = 5e-5f;
  int iterations = 5000;
  int batch_size = 1;
  int checkpoint_every = 500;
  int pretrain_iterations = 800;
  bool jitter = true;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_map(const std::map<std::string, std::string>& kv);
  std::map<std::string, std::string> to_map() const;
  std::uint64_t hash() const;
  std::vector<int> unet_widths() const {
    return {unet_stem, 2 * unet_stem, 4 * unet_stem, 8 * unet_stem, 16 * unet_stem};
  }
};

}  // namespace ganerf
