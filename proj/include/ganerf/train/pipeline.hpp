#pragma once

#include <random>

#include "ganerf/data/dataset.hpp"
#include "ganerf/nerf/nerf.hpp"
#include "ganerf/net/encoders.hpp"
#include "ganerf/net/generator.hpp"
#include "ganerf/palette/palette.hpp"

namespace ganerf::train {

// All networks of one run. The image generator is pre-trained separately
// and stays frozen during joint optimization.
struct Models {
  net::DynamicEncoder enc_dyn;
  net::DetailEncoder enc_det;
  nerf::RadianceField field;
  palette::DecompositionNet decomp;
  palette::PaletteVector pal;
  gen::ImageGenerator gimg;
  gen::NeuralTexture texture;

  Models() = default;
  Models(const RunConfig& cfg, const data::Dataset& ds, std::uint32_t seed);

  // jointly optimized parameters: E, G_en, M_NeRF, M_D, p
  void reg_trainable(nn::ParamMap& pm) const;
  // everything, for checkpointing
  void reg_all(nn::ParamMap& pm) const;
};

void save_models(const std::string& path, const Models& m);
void load_models(const std::string& path, Models& m);

// Per-(frame) state reused across cameras: info maps, reference images,
// feature maps, posed geometry.
struct FrameContext {
  nerf::FrameGeometry fg;
  ag::Var f_s, fd_front, fd_back;  // null when the matching toggle is off
};

FrameContext build_frame_context(const data::Dataset& ds, const Models& m, bool um, int t);

struct RenderedFrame {
  palette::DecompositionMaps maps;
  ag::Var image;  // [3, H, W]
  Tensor alpha;   // [1, feature_res, feature_res]
};

RenderedFrame render_frame(const data::Dataset& ds, const Models& m, const FrameContext& ctx,
                           int cam_id, std::mt19937* jitter_rng = nullptr);

}  // namespace ganerf::train
