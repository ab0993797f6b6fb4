#pragma once

#include "ganerf/core/config.hpp"
#include "ganerf/core/nn.hpp"
#include "ganerf/maps/infomaps.hpp"

namespace ganerf::net {

enum class FeatureTag { Dynamic, DetailFront, DetailBack, Appearance };

struct FeatureMap2D {
  FeatureTag tag = FeatureTag::Dynamic;
  ag::Var map;  // [C, H, W]
  int height() const { return map->val.dim(1); }
  int width() const { return map->val.dim(2); }
  int channels() const { return map->val.dim(0); }
};

// E: (N_t, V_t) -> F^s_t, 8-channel structural feature map in UV space.
struct DynamicEncoder {
  nn::UNet net;
  int k = 2;
  DynamicEncoder() = default;
  DynamicEncoder(const RunConfig& cfg, std::mt19937& rng);
  void reg(nn::ParamMap& pm) const { net.reg(pm, "encoder.dynamic"); }
};

FeatureMap2D encode_dynamic(const DynamicEncoder& e, const maps::UVRaster& normal,
                            const maps::UVRaster& velocity);

// G_en: reference image -> F^d_t, 8-channel detail feature map.
struct DetailEncoder {
  nn::UNet net;
  DetailEncoder() = default;
  DetailEncoder(const RunConfig& cfg, std::mt19937& rng);
  void reg(nn::ParamMap& pm) const { net.reg(pm, "encoder.detail"); }
};

FeatureMap2D encode_detail(const DetailEncoder& e, const ag::Var& ref_image, FeatureTag tag);

}  // namespace ganerf::net
