#include "ganerf/net/encoders.hpp"

#include <stdexcept>

namespace ganerf::net {

DynamicEncoder::DynamicEncoder(const RunConfig& cfg, std::mt19937& rng) : k(cfg.history_k) {
  nn::UNetConfig uc;
  uc.in_channels = 3 + 3 * cfg.history_k;
  uc.out_channels = 8;
  uc.widths = cfg.unet_widths();
  uc.head = nn::UNetConfig::Head::Tanh;
  net = nn::UNet(uc, rng);
}

FeatureMap2D encode_dynamic(const DynamicEncoder& e, const maps::UVRaster& normal,
                            const maps::UVRaster& velocity) {
  if (normal.height != velocity.height || normal.width != velocity.width)
    throw std::invalid_argument("dynamic encoder: info-map resolution mismatch");
  if (normal.channels + velocity.channels != e.net.cfg.in_channels)
    throw std::invalid_argument("dynamic encoder: expected " +
                                std::to_string(e.net.cfg.in_channels) + " input channels, got " +
                                std::to_string(normal.channels + velocity.channels));
  Tensor in({normal.channels + velocity.channels, normal.height, normal.width});
  std::copy(normal.data.data.begin(), normal.data.data.end(), in.data.begin());
  std::copy(velocity.data.data.begin(), velocity.data.data.end(),
            in.data.begin() + normal.data.data.size());
  return {FeatureTag::Dynamic, e.net.forward(ag::constant(std::move(in)))};
}

DetailEncoder::DetailEncoder(const RunConfig& cfg, std::mt19937& rng) {
  nn::UNetConfig uc;
  uc.in_channels = 3;
  uc.out_channels = 8;
  uc.widths = cfg.unet_widths();
  uc.head = nn::UNetConfig::Head::Tanh;
  net = nn::UNet(uc, rng);
}

FeatureMap2D encode_detail(const DetailEncoder& e, const ag::Var& ref_image, FeatureTag tag) {
  if (ref_image->val.dim(0) != 3)
    throw std::invalid_argument("detail encoder: reference image must have 3 channels");
  return {tag, e.net.forward(ref_image)};
}

}  // namespace ganerf::net
