#pragma once

#include <random>
#include <string>
#include <vector>

#include "ganerf/core/autograd.hpp"

namespace ganerf::nn {

// Named parameter registry; the order of registration is the optimizer's
// update order and the checkpoint layout.
struct ParamMap {
  std::vector<std::pair<std::string, ag::Var>> items;
  void add(const std::string& name, const ag::Var& v) { items.emplace_back(name, v); }
  ag::Var find(const std::string& name) const;
  std::size_t total_scalars() const;
};

Tensor init_uniform(std::vector<int> shape, int fan_in, std::mt19937& rng);

struct Conv2d {
  ag::Var w, b;
  int stride = 1, pad = 1;
  Conv2d() = default;
  Conv2d(int ci, int co, int k, int stride, int pad, std::mt19937& rng);
  ag::Var forward(const ag::Var& x) const { return ag::conv2d(x, w, b, stride, pad); }
  void reg(ParamMap& pm, const std::string& prefix) const;
};

struct InstanceNorm {
  ag::Var gamma, beta;
  InstanceNorm() = default;
  explicit InstanceNorm(int c);
  ag::Var forward(const ag::Var& x) const { return ag::instance_norm(x, gamma, beta); }
  void reg(ParamMap& pm, const std::string& prefix) const;
};

struct Linear {
  ag::Var w, b;
  Linear() = default;
  Linear(int in, int out, std::mt19937& rng);
  ag::Var forward(const ag::Var& x) const { return ag::linear(x, w, b); }
  void reg(ParamMap& pm, const std::string& prefix) const;
};

// U-shaped residual conv encoder-decoder shared by the dynamic encoder,
// the detail encoder and the image generator. Layer schedule at paper
// scale: stem to widths[0], four stride-2 downs to widths[1..4], four
// upsample convs back with skip concatenation, then a head conv.
struct UNetConfig {
  int in_channels = 3;
  int out_channels = 8;
  // widths[0] = stem, widths[1..4] = down path; up path mirrors down/2
  std::vector<int> widths = {32, 64, 128, 256, 512};
  enum class Head { Tanh, Sigmoid, None } head = Head::Tanh;
};

struct UNet {
  UNetConfig cfg;
  Conv2d stem;
  std::vector<Conv2d> down;
  std::vector<InstanceNorm> down_norm;
  std::vector<Conv2d> up;
  std::vector<InstanceNorm> up_norm;
  InstanceNorm stem_norm;
  Conv2d head;

  UNet() = default;
  UNet(const UNetConfig& cfg, std::mt19937& rng);
  // up-path output widths mirror the down path halved: 256,128,64,32 at paper scale
  int up_out(int i) const { return cfg.widths[static_cast<std::size_t>(4 - i)] / 2; }
  ag::Var forward(const ag::Var& x) const;
  void reg(ParamMap& pm, const std::string& prefix) const;
  // closed-form scalar count for the architecture audit
  static std::size_t expected_param_count(const UNetConfig& cfg);
};

// Radiance field MLP: hidden ReLU trunk, density and feature heads.
struct FieldMLPConfig {
  int in_dim = 20;
  int hidden = 256;
  int depth = 6;
  int feature_dim = 128;
};

struct FieldMLP {
  FieldMLPConfig cfg;
  std::vector<Linear> layers;
  Linear sigma_head, feat_head;
  FieldMLP() = default;
  FieldMLP(const FieldMLPConfig& cfg, std::mt19937& rng);
  // x: [N, in_dim] -> {sigma_raw [N,1] (pre-activation), feat [N, feature_dim]}
  std::pair<ag::Var, ag::Var> forward(const ag::Var& x) const;
  void reg(ParamMap& pm, const std::string& prefix) const;
};

struct Adam {
  float beta1 = 0.9f, beta2 = 0.999f, eps = 1e-8f;
  long long t = 0;
  std::vector<Tensor> m, v;
  void step(const std::vector<ag::Var>& params, float lr);
  void zero_grad(const std::vector<ag::Var>& params);
};

}  // namespace ganerf::nn
