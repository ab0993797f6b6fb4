#include "ganerf/core/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace ganerf::nn {

ag::Var ParamMap::find(const std::string& name) const {
  for (const auto& [n, v] : items)
    if (n == name) return v;
  throw std::out_of_range("parameter not found: " + name);
}

std::size_t ParamMap::total_scalars() const {
  std::size_t n = 0;
  for (const auto& [name, v] : items) n += v->val.numel();
  return n;
}

Tensor init_uniform(std::vector<int> shape, int fan_in, std::mt19937& rng) {
  Tensor t(std::move(shape));
  const float bound = std::sqrt(1.0f / static_cast<float>(fan_in));
  std::uniform_real_distribution<float> dist(-bound, bound);
  for (auto& v : t.data) v = dist(rng);
  return t;
}

Conv2d::Conv2d(int ci, int co, int k, int stride_, int pad_, std::mt19937& rng)
    : stride(stride_), pad(pad_) {
  w = ag::param(init_uniform({co, ci, k, k}, ci * k * k, rng));
  b = ag::param(Tensor::zeros({co}));
}

void Conv2d::reg(ParamMap& pm, const std::string& prefix) const {
  pm.add(prefix + ".weight", w);
  pm.add(prefix + ".bias", b);
}

InstanceNorm::InstanceNorm(int c) {
  gamma = ag::param(Tensor::full({c}, 1.0f));
  beta = ag::param(Tensor::zeros({c}));
}

void InstanceNorm::reg(ParamMap& pm, const std::string& prefix) const {
  pm.add(prefix + ".gamma", gamma);
  pm.add(prefix + ".beta", beta);
}

Linear::Linear(int in, int out, std::mt19937& rng) {
  w = ag::param(init_uniform({in, out}, in, rng));
  b = ag::param(Tensor::zeros({out}));
}

void Linear::reg(ParamMap& pm, const std::string& prefix) const {
  pm.add(prefix + ".weight", w);
  pm.add(prefix + ".bias", b);
}

UNet::UNet(const UNetConfig& c, std::mt19937& rng) : cfg(c) {
  if (cfg.widths.size() != 5) throw std::invalid_argument("UNet expects 5 widths");
  stem = Conv2d(cfg.in_channels, cfg.widths[0], 3, 1, 1, rng);
  stem_norm = InstanceNorm(cfg.widths[0]);
  for (int i = 0; i < 4; ++i) {
    down.emplace_back(cfg.widths[i], cfg.widths[i + 1], 4, 2, 1, rng);
    down_norm.emplace_back(cfg.widths[i + 1]);
  }
  // up stage i consumes the previous stage concatenated with the skip at
  // the target resolution
  for (int i = 0; i < 4; ++i) {
    const int skip = cfg.widths[3 - i];
    const int in_ch = (i == 0 ? cfg.widths[4] : up_out(i - 1)) + skip;
    up.emplace_back(in_ch, up_out(i), 3, 1, 1, rng);
    up_norm.emplace_back(up_out(i));
  }
  head = Conv2d(up_out(3), cfg.out_channels, 3, 1, 1, rng);
}

ag::Var UNet::forward(const ag::Var& x) const {
  auto s0 = ag::leaky_relu(stem_norm.forward(stem.forward(x)));
  std::vector<ag::Var> skips{s0};
  ag::Var h = s0;
  for (std::size_t i = 0; i < down.size(); ++i) {
    h = ag::leaky_relu(down_norm[i].forward(down[i].forward(h)));
    skips.push_back(h);
  }
  for (std::size_t i = 0; i < up.size(); ++i) {
    h = ag::upsample2x(h);
    h = ag::concat_ch({h, skips[skips.size() - 2 - i]});
    h = ag::leaky_relu(up_norm[i].forward(up[i].forward(h)));
  }
  h = head.forward(h);
  switch (cfg.head) {
    case UNetConfig::Head::Tanh: return ag::tanh_(h);
    case UNetConfig::Head::Sigmoid: return ag::sigmoid_(h);
    case UNetConfig::Head::None: return h;
  }
  return h;
}

void UNet::reg(ParamMap& pm, const std::string& prefix) const {
  stem.reg(pm, prefix + ".stem");
  stem_norm.reg(pm, prefix + ".stem_norm");
  for (std::size_t i = 0; i < down.size(); ++i) {
    down[i].reg(pm, prefix + ".down" + std::to_string(i));
    down_norm[i].reg(pm, prefix + ".down_norm" + std::to_string(i));
  }
  for (std::size_t i = 0; i < up.size(); ++i) {
    up[i].reg(pm, prefix + ".up" + std::to_string(i));
    up_norm[i].reg(pm, prefix + ".up_norm" + std::to_string(i));
  }
  head.reg(pm, prefix + ".head");
}

std::size_t UNet::expected_param_count(const UNetConfig& cfg) {
  auto conv = [](int ci, int co, int k) {
    return static_cast<std::size_t>(co) * ci * k * k + co;
  };
  auto norm = [](int c) { return static_cast<std::size_t>(2) * c; };
  const auto& w = cfg.widths;
  std::size_t n = conv(cfg.in_channels, w[0], 3) + norm(w[0]);
  for (int i = 0; i < 4; ++i) n += conv(w[i], w[i + 1], 4) + norm(w[i + 1]);
  int prev = w[4];
  for (int i = 0; i < 4; ++i) {
    const int skip = w[3 - i];
    const int out_ch = w[4 - i] / 2;
    n += conv(prev + skip, out_ch, 3) + norm(out_ch);
    prev = out_ch;
  }
  n += conv(prev, cfg.out_channels, 3);
  return n;
}

FieldMLP::FieldMLP(const FieldMLPConfig& c, std::mt19937& rng) : cfg(c) {
  layers.emplace_back(cfg.in_dim, cfg.hidden, rng);
  for (int i = 1; i < cfg.depth; ++i) layers.emplace_back(cfg.hidden, cfg.hidden, rng);
  sigma_head = Linear(cfg.hidden, 1, rng);
  feat_head = Linear(cfg.hidden, cfg.feature_dim, rng);
}

std::pair<ag::Var, ag::Var> FieldMLP::forward(const ag::Var& x) const {
  if (x->val.dim(1) != cfg.in_dim)
    throw std::invalid_argument("field input width mismatch: expected " +
                                std::to_string(cfg.in_dim));
  ag::Var h = x;
  for (const auto& l : layers) h = ag::relu(l.forward(h));
  return {sigma_head.forward(h), feat_head.forward(h)};
}

void FieldMLP::reg(ParamMap& pm, const std::string& prefix) const {
  for (std::size_t i = 0; i < layers.size(); ++i)
    layers[i].reg(pm, prefix + ".hidden" + std::to_string(i));
  sigma_head.reg(pm, prefix + ".sigma");
  feat_head.reg(pm, prefix + ".feat");
}

void Adam::step(const std::vector<ag::Var>& params, float lr) {
  if (m.size() != params.size()) {
    m.clear();
    v.clear();
    for (const auto& p : params) {
      m.push_back(Tensor::zeros(p->val.shape));
      v.push_back(Tensor::zeros(p->val.shape));
    }
  }
  ++t;
  const float bc1 = 1.0f - std::pow(beta1, static_cast<float>(t));
  const float bc2 = 1.0f - std::pow(beta2, static_cast<float>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    if (p->grad.shape != p->val.shape) continue;  // no grad this step
    for (std::size_t j = 0; j < p->val.numel(); ++j) {
      const float g = p->grad.data[j];
      m[i].data[j] = beta1 * m[i].data[j] + (1.0f - beta1) * g;
      v[i].data[j] = beta2 * v[i].data[j] + (1.0f - beta2) * g * g;
      const float mh = m[i].data[j] / bc1;
      const float vh = v[i].data[j] / bc2;
      p->val.data[j] -= lr * mh / (std::sqrt(vh) + eps);
    }
  }
}

void Adam::zero_grad(const std::vector<ag::Var>& params) {
  for (const auto& p : params)
    if (p->grad.shape == p->val.shape)
      std::fill(p->grad.data.begin(), p->grad.data.end(), 0.0f);
}

}  // namespace ganerf::nn
