#include "ganerf/palette/palette.hpp"

#include <stdexcept>

namespace ganerf::palette {

PaletteVector::PaletteVector(const Tensor& star) : star_(star) {
  if (star.data.size() != 6) throw std::invalid_argument("palette expects 6 scalars");
  p = ag::param(star);
}

PaletteVector init_palette(const data::Dataset& ds) {
  Tensor star({6});
  star.data = {ds.mu_garment.x, ds.mu_garment.y, ds.mu_garment.z,
               ds.mu_body.x,    ds.mu_body.y,    ds.mu_body.z};
  for (float v : star.data)
    if (v < 0.0f || v > 1.0f) throw std::domain_error("mean color outside [0,1]");
  return PaletteVector(star);
}

DecompositionNet::DecompositionNet(const RunConfig& cfg, std::mt19937& rng)
    : in_channels(cfg.zeta_dim) {
  c1 = nn::Conv2d(cfg.zeta_dim, cfg.decomp_mid, 3, 1, 1, rng);
  n1 = nn::InstanceNorm(cfg.decomp_mid);
  c2 = nn::Conv2d(cfg.decomp_mid, 12, 3, 1, 1, rng);
}

void DecompositionNet::reg(nn::ParamMap& pm) const {
  c1.reg(pm, "decomp.up1");
  n1.reg(pm, "decomp.norm1");
  c2.reg(pm, "decomp.up2");
}

DecompositionMaps decompose(const ag::Var& f_zeta, const DecompositionNet& net) {
  if (f_zeta->val.dim(0) != net.in_channels)
    throw std::invalid_argument("decomposition expects " + std::to_string(net.in_channels) +
                                " input channels, got " + std::to_string(f_zeta->val.dim(0)));
  ag::Var x = ag::leaky_relu(net.n1.forward(net.c1.forward(ag::upsample2x(f_zeta))));
  x = net.c2.forward(ag::upsample2x(x));
  DecompositionMaps maps;
  maps.O = ag::tanh_(ag::slice_ch(x, 0, 6));
  maps.R = ag::softplus_(ag::slice_ch(x, 6, 3));
  maps.Wmap = ag::softmax_ch(ag::slice_ch(x, 9, 2));
  maps.w = ag::slice_ch(maps.Wmap, 0, 1);
  maps.M = ag::sigmoid_(ag::slice_ch(x, 11, 1));
  return maps;
}

ag::Var composite(const DecompositionMaps& maps, const ag::Var& p) {
  const int h = maps.height(), w = maps.width();
  const ag::Var oG = ag::slice_ch(maps.O, 0, 3);
  const ag::Var oB = ag::slice_ch(maps.O, 3, 3);
  const ag::Var pG = ag::broadcast_ch(p, 0, 3, h, w);
  const ag::Var pB = ag::broadcast_ch(p, 3, 3, h, w);
  const ag::Var w3 = ag::repeat_ch(maps.w, 3);
  const ag::Var iw3 = ag::repeat_ch(ag::add_const(ag::scale(maps.w, -1.0f), 1.0f), 3);
  const ag::Var mix =
      ag::add(ag::mul(w3, ag::add(pG, oG)), ag::mul(iw3, ag::add(pB, oB)));
  return ag::mul(ag::repeat_ch(maps.M, 3), ag::mul(maps.R, mix));
}

Tensor recolor(const DecompositionMaps& maps, const ag::Var& p, const geom::Vec3& new_pG) {
  Tensor edited = p->val;
  edited.data[0] = new_pG.x;
  edited.data[1] = new_pG.y;
  edited.data[2] = new_pG.z;
  return composite(maps, ag::constant(std::move(edited)))->val;
}

}  // namespace ganerf::palette
