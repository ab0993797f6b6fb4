#include "ganerf/train/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace ganerf::train {

ag::Var loss_img(const ag::Var& image, const Tensor& image_gt, const ag::Var& mask,
                 const Tensor& mask_gt) {
  if (image->val.shape != image_gt.shape || mask->val.shape != mask_gt.shape)
    throw std::invalid_argument("loss_img shape mismatch");
  return ag::add_scalars({ag::mean_abs_diff(image, image_gt), ag::mean_abs_diff(mask, mask_gt)},
                         {1.0f, 1.0f});
}

ag::Var loss_vgg(const PerceptualExtractor& ex, const ag::Var& image, const Tensor& image_gt) {
  return perceptual_loss(ex, image, image_gt);
}

ag::Var loss_sp(const ag::Var& w) {
  const std::size_t n = w->val.data.size();
  double acc = 0.0;
  for (float v : w->val.data) {
    const double q = static_cast<double>(v) * v + (1.0 - v) * (1.0 - v);
    acc += std::fabs(1.0 / q - 1.0);
  }
  Tensor out({1});
  out.data[0] = static_cast<float>(acc / static_cast<double>(n));
  return ag::make_node(std::move(out), {w}, [w, n](ag::Node& self) {
    if (!w->requires_grad) return;
    auto& g = w->ensure_grad();
    const float gv = self.grad.data[0] / static_cast<float>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const float v = w->val.data[i];
      const float q = v * v + (1.0f - v) * (1.0f - v);
      const float f = 1.0f / q - 1.0f;  // >= 0 for v in [0,1]
      const float sgn = f >= 0.0f ? 1.0f : -1.0f;
      g.data[i] += gv * sgn * (-(4.0f * v - 2.0f) / (q * q));
    }
  });
}

ag::Var loss_off(const ag::Var& offsets) { return ag::mean_sq(offsets); }

ag::Var loss_p(const ag::Var& p, const Tensor& p_star) { return ag::mean_sq_diff(p, p_star); }

ag::Var total_loss(const std::array<ag::Var, 5>& terms, const std::array<float, 5>& weights,
                   LossBreakdown* breakdown) {
  static const char* names[5] = {"L_img", "L_vgg", "L_sp", "L_off", "L_p"};
  for (int i = 0; i < 5; ++i)
    if (!std::isfinite(ag::scalar(terms[static_cast<std::size_t>(i)])))
      throw std::invalid_argument(std::string("non-finite loss term ") + names[i]);
  const ag::Var total =
      ag::add_scalars({terms[0], terms[1], terms[2], terms[3], terms[4]},
                      {weights[0], weights[1], weights[2], weights[3], weights[4]});
  if (breakdown) {
    breakdown->img = ag::scalar(terms[0]);
    breakdown->vgg = ag::scalar(terms[1]);
    breakdown->sp = ag::scalar(terms[2]);
    breakdown->off = ag::scalar(terms[3]);
    breakdown->p = ag::scalar(terms[4]);
    double acc = 0;
    for (int i = 0; i < 5; ++i)
      acc += static_cast<double>(weights[static_cast<std::size_t>(i)]) *
             static_cast<double>(ag::scalar(terms[static_cast<std::size_t>(i)]));
    breakdown->total = acc;
  }
  return total;
}

}  // namespace ganerf::train
