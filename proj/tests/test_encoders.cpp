#include <doctest.h>

#include <random>

#include "ganerf/net/encoders.hpp"

using namespace ganerf;

namespace {

RunConfig enc_cfg(int k = 2) {
  std::map<std::string, std::string> kv{
      {"image_res", "64"},     {"uv_res", "32"},  {"feature_res", "16"},
      {"unet_stem", "4"},      {"history_k", std::to_string(k)},
  };
  return RunConfig::from_map(kv);
}

maps::UVRaster make_raster(int channels, int res, std::uint32_t seed) {
  maps::UVRaster r;
  r.height = res;
  r.width = res;
  r.channels = channels;
  r.data = Tensor::zeros({channels, res, res});
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> uni(-1.0f, 1.0f);
  for (auto& v : r.data.data) v = uni(rng);
  r.valid.assign(static_cast<std::size_t>(res) * res, 1);
  return r;
}

}  // namespace

TEST_SUITE("encoders") {

TEST_CASE("dynamic encoder: shapes, bounds and input validation") {
  const RunConfig cfg = enc_cfg(2);
  std::mt19937 rng(1);
  net::DynamicEncoder e(cfg, rng);
  CHECK(e.k == 2);

  const maps::UVRaster n = make_raster(3, 32, 7);
  const maps::UVRaster v = make_raster(6, 32, 8);
  const net::FeatureMap2D f = net::encode_dynamic(e, n, v);
  CHECK(f.tag == net::FeatureTag::Dynamic);
  CHECK(f.channels() == 8);
  CHECK(f.height() == 32);
  CHECK(f.width() == 32);
  for (float x : f.map->val.data) {
    CHECK(x >= -1.0f);
    CHECK(x <= 1.0f);
  }

  SUBCASE("resolution mismatch is rejected") {
    const maps::UVRaster bad = make_raster(6, 16, 8);
    CHECK_THROWS_AS(net::encode_dynamic(e, n, bad), std::invalid_argument);
  }
  SUBCASE("k = 0 drops the velocity channels but still encodes") {
    const RunConfig cfg0 = enc_cfg(0);
    std::mt19937 rng0(1);
    net::DynamicEncoder e0(cfg0, rng0);
    maps::UVRaster empty;
    empty.height = 32;
    empty.width = 32;
    empty.channels = 0;
    empty.data = Tensor::zeros({0, 32, 32});
    empty.valid.assign(32 * 32, 1);
    const net::FeatureMap2D f0 = net::encode_dynamic(e0, n, empty);
    CHECK(f0.channels() == 8);
  }
}

TEST_CASE("detail encoder: shapes, tags and channel validation") {
  const RunConfig cfg = enc_cfg();
  std::mt19937 rng(2);
  net::DetailEncoder e(cfg, rng);

  Tensor img = Tensor::zeros({3, 16, 16});
  std::mt19937 prng(4);
  std::uniform_real_distribution<float> uni(0.0f, 1.0f);
  for (auto& v : img.data) v = uni(prng);
  const net::FeatureMap2D f =
      net::encode_detail(e, ag::constant(img), net::FeatureTag::DetailBack);
  CHECK(f.tag == net::FeatureTag::DetailBack);
  CHECK(f.channels() == 8);
  CHECK(f.height() == 16);
  CHECK(f.width() == 16);
  for (float x : f.map->val.data) {
    CHECK(x >= -1.0f);
    CHECK(x <= 1.0f);
  }
  CHECK_THROWS_AS(
      net::encode_detail(e, ag::constant(Tensor::zeros({4, 16, 16})), net::FeatureTag::DetailFront),
      std::invalid_argument);
}

TEST_CASE("encoder gradients agree with finite differences") {
  std::map<std::string, std::string> kv{
      {"image_res", "32"}, {"uv_res", "8"}, {"feature_res", "8"}, {"unet_stem", "2"},
      {"history_k", "1"},
  };
  const RunConfig cfg = RunConfig::from_map(kv);
  std::mt19937 rng(3);
  net::DynamicEncoder e(cfg, rng);

  const maps::UVRaster n = make_raster(3, 16, 11);
  const maps::UVRaster v = make_raster(3, 16, 12);
  const Tensor target = Tensor::zeros({8, 16, 16});

  nn::ParamMap pm;
  e.reg(pm);
  auto loss_value = [&]() {
    const net::FeatureMap2D f = net::encode_dynamic(e, n, v);
    return ag::mean_sq_diff(f.map, target);
  };
  ag::Var l0 = loss_value();
  ag::backward(l0);

  // probe a few parameters across different tensors
  std::mt19937 pick(9);
  int checked = 0;
  for (int probe = 0; probe < 6; ++probe) {
    auto& [name, var] = pm.items[pick() % pm.items.size()];
    const std::size_t i = pick() % var->val.data.size();
    const float g = var->grad.data[i];
    const float eps = 1e-3f;
    const float keep = var->val.data[i];
    var->val.data[i] = keep + eps;
    const float lp = loss_value()->val.data[0];
    var->val.data[i] = keep - eps;
    const float lm = loss_value()->val.data[0];
    var->val.data[i] = keep;
    const float fd = (lp - lm) / (2 * eps);
    if (std::abs(fd) < 1e-6f) continue;
    CHECK(g == doctest::Approx(fd).epsilon(2e-2));
    ++checked;
  }
  CHECK(checked >= 3);
}

TEST_CASE("parameter counts match the architecture formula") {
  const RunConfig cfg = enc_cfg(2);
  std::mt19937 rng(6);
  net::DynamicEncoder ed(cfg, rng);
  net::DetailEncoder eg(cfg, rng);

  nn::ParamMap pd, pg;
  ed.reg(pd);
  eg.reg(pg);
  CHECK(pd.total_scalars() == nn::UNet::expected_param_count(ed.net.cfg));
  CHECK(pg.total_scalars() == nn::UNet::expected_param_count(eg.net.cfg));
  // dynamic encoder consumes 3 + 3k channels, detail encoder 3
  CHECK(ed.net.cfg.in_channels == 3 + 3 * cfg.history_k);
  CHECK(eg.net.cfg.in_channels == 3);
  CHECK(ed.net.cfg.out_channels == 8);
  CHECK(eg.net.cfg.out_channels == 8);
}

}  // TEST_SUITE
