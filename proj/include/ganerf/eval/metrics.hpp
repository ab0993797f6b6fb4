#pragma once

#include <string>
#include <vector>

#include "ganerf/core/tensor.hpp"
#include "ganerf/train/perceptual.hpp"

namespace ganerf::eval {

// Peak signal-to-noise ratio with MAX = 1, capped at 99 dB.
float psnr(const Tensor& a, const Tensor& b);
// Mean SSIM over channels, 11x11 Gaussian window (sigma 1.5), standard
// stabilizers; border windows renormalized.
float ssim(const Tensor& a, const Tensor& b);
// Mean-L1 distance summed over the extractor's layers.
float perceptual(const train::PerceptualExtractor& ex, const Tensor& a, const Tensor& b);

// Deterministic pyramidal block-matching optical flow.
struct FlowEstimator {
  int levels = 3;
  int radius = 2;   // search radius per level, pixels
  int block = 4;    // half-width of the matching window
  std::string backend_name = "blockmatch-pyramid";
  // dense flow [2, H, W] (dx, dy) mapping a -> b
  Tensor flow(const Tensor& a, const Tensor& b) const;
};

// Temporal consistency: mean over consecutive pairs of the mean-L1
// distance between the two videos' frame-to-frame flows.
float tof(const std::vector<Tensor>& video_a, const std::vector<Tensor>& video_b,
          const FlowEstimator& fe);

}  // namespace ganerf::eval
