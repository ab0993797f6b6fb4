#pragma once

#include <random>

#include "ganerf/core/config.hpp"
#include "ganerf/core/nn.hpp"
#include "ganerf/data/dataset.hpp"

namespace ganerf::palette {

// p = [p^G, p^B] (6 learnable scalars), regularized toward the frozen
// initialization p_star = dataset mean colors.
class PaletteVector {
 public:
  ag::Var p;
  PaletteVector() = default;
  explicit PaletteVector(const Tensor& star);
  const Tensor& p_star() const { return star_; }
  void reg(nn::ParamMap& pm) const { pm.add("palette.p", p); }

 private:
  Tensor star_;
};

PaletteVector init_palette(const data::Dataset& ds);

struct DecompositionMaps {
  ag::Var O;     // [6, H, W], tanh
  ag::Var R;     // [3, H, W], softplus
  ag::Var Wmap;  // [2, H, W], channel softmax
  ag::Var w;     // [1, H, W], Wmap channel 0
  ag::Var M;     // [1, H, W], sigmoid
  int height() const { return M->val.dim(1); }
  int width() const { return M->val.dim(2); }
};

// M_D: two upsampling conv stages, x4 spatial, 128 -> mid -> 12 channels.
struct DecompositionNet {
  nn::Conv2d c1, c2;
  nn::InstanceNorm n1;
  int in_channels = 128;
  DecompositionNet() = default;
  DecompositionNet(const RunConfig& cfg, std::mt19937& rng);
  void reg(nn::ParamMap& pm) const;
};

DecompositionMaps decompose(const ag::Var& f_zeta, const DecompositionNet& net);

// c = m (x) r (x) [w (x) (p^G + o^G) + (1 - w) (x) (p^B + o^B)]
ag::Var composite(const DecompositionMaps& maps, const ag::Var& p);

// composite with p^G replaced; delta = m (x) r (x) w (x) (new_pG - p^G)
Tensor recolor(const DecompositionMaps& maps, const ag::Var& p, const geom::Vec3& new_pG);

}  // namespace ganerf::palette
