#pragma once

#include <array>
#include <string>

#include "ganerf/train/perceptual.hpp"

namespace ganerf::train {

// L_img: mean-L1 of the image plus mean-L1 of the mask
ag::Var loss_img(const ag::Var& image, const Tensor& image_gt, const ag::Var& mask,
                 const Tensor& mask_gt);
// L_vgg: sum over extractor layers of mean-L1 feature distance
ag::Var loss_vgg(const PerceptualExtractor& ex, const ag::Var& image, const Tensor& image_gt);
// L_sp = mean | 1 / (w^2 + (1-w)^2) - 1 |, pushes w toward 0 or 1
ag::Var loss_sp(const ag::Var& w);
// L_off = mean squared color offset
ag::Var loss_off(const ag::Var& offsets);
// L_p = mean squared palette drift from the frozen initialization
ag::Var loss_p(const ag::Var& p, const Tensor& p_star);

struct LossBreakdown {
  float img = 0, vgg = 0, sp = 0, off = 0, p = 0;
  // reported total is accumulated in double so it is reliable for logging/tests
  double total = 0;
};

// weighted sum; aborts (invalid_argument) naming any non-finite term
ag::Var total_loss(const std::array<ag::Var, 5>& terms, const std::array<float, 5>& weights,
                   LossBreakdown* breakdown = nullptr);

}  // namespace ganerf::train
