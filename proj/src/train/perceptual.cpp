#include "ganerf/train/perceptual.hpp"

namespace ganerf::train {

PerceptualExtractor::PerceptualExtractor(std::uint32_t seed) {
  std::mt19937 rng(seed);
  convs.emplace_back(3, 8, 3, 2, 1, rng);
  convs.emplace_back(8, 16, 3, 2, 1, rng);
  convs.emplace_back(16, 32, 3, 2, 1, rng);
  for (auto& c : convs) {
    c.w->requires_grad = false;
    c.b->requires_grad = false;
  }
}

std::vector<ag::Var> PerceptualExtractor::features(const ag::Var& image) const {
  std::vector<ag::Var> feats;
  ag::Var h = image;
  for (const auto& c : convs) {
    h = ag::relu(c.forward(h));
    feats.push_back(h);
  }
  return feats;
}

ag::Var perceptual_loss(const PerceptualExtractor& ex, const ag::Var& image,
                        const Tensor& target) {
  const auto pred = ex.features(image);
  const auto gt = ex.features(ag::constant(target));
  std::vector<ag::Var> terms;
  for (std::size_t i = 0; i < pred.size(); ++i)
    terms.push_back(ag::mean_abs_diff(pred[i], gt[i]->val));
  return ag::add_scalars(terms, std::vector<float>(terms.size(), 1.0f));
}

float perceptual_distance(const PerceptualExtractor& ex, const Tensor& a, const Tensor& b) {
  return ag::scalar(perceptual_loss(ex, ag::constant(a), b));
}

}  // namespace ganerf::train
