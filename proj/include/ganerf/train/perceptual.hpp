#pragma once

#include "ganerf/core/nn.hpp"

namespace ganerf::train {

// Fixed multi-scale conv feature pyramid for perceptual losses. The
// default backend is a seeded random-weight pyramid: deterministic, no
// downloaded assets. Parameters never train; gradients still flow
// through the input image.
struct PerceptualExtractor {
  std::vector<nn::Conv2d> convs;
  std::string backend_name = "randconv3";

  explicit PerceptualExtractor(std::uint32_t seed = 101);
  // features at 3 scales for a [3, H, W] image
  std::vector<ag::Var> features(const ag::Var& image) const;
};

// sum over layers of mean-L1 feature distance
ag::Var perceptual_loss(const PerceptualExtractor& ex, const ag::Var& image,
                        const Tensor& target);
float perceptual_distance(const PerceptualExtractor& ex, const Tensor& a, const Tensor& b);

}  // namespace ganerf::train
