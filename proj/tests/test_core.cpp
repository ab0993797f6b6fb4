#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "ganerf/core/autograd.hpp"
#include "ganerf/core/checkpoint.hpp"
#include "ganerf/core/config.hpp"
#include "ganerf/core/kernels.hpp"
#include "ganerf/core/nn.hpp"
#include "ganerf/core/tensor.hpp"

using namespace ganerf;

namespace {

Tensor random_tensor(std::vector<int> shape, std::mt19937& rng, float lo = -1, float hi = 1) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<float> u(lo, hi);
  for (float& v : t.data) v = u(rng);
  return t;
}

// central-difference gradient of scalar(f(x)) with respect to x[i]
template <typename F>
float numeric_grad(Tensor& x, std::size_t i, F&& f, float eps = 1e-3f) {
  const float keep = x.data[i];
  x.data[i] = keep + eps;
  const float hi = f();
  x.data[i] = keep - eps;
  const float lo = f();
  x.data[i] = keep;
  return (hi - lo) / (2 * eps);
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("tensor file round trip") {
  std::mt19937 rng(11);
  const Tensor t = random_tensor({3, 5, 7}, rng);
  const std::string path = "/tmp/ganerf_test_tensor.bin";
  save_tensor(path, t);
  const Tensor u = load_tensor(path);
  CHECK(u.shape == t.shape);
  CHECK(u.data == t.data);
  std::remove(path.c_str());
}

TEST_CASE("parallel kernels match the serial reference bitwise") {
  std::mt19937 rng(7);
  SUBCASE("matmul") {
    const Tensor a = random_tensor({33, 17}, rng), b = random_tensor({17, 29}, rng);
    std::vector<float> c_par(33 * 29), c_ref(33 * 29);
    kernels::matmul(a.data.data(), b.data.data(), c_par.data(), 33, 17, 29);
    kernels::matmul_ref(a.data.data(), b.data.data(), c_ref.data(), 33, 17, 29);
    CHECK(c_par == c_ref);
  }
  SUBCASE("conv2d strided") {
    const Tensor x = random_tensor({4, 18, 14}, rng);
    const Tensor w = random_tensor({6, 4, 4, 4}, rng);
    const Tensor b = random_tensor({6}, rng);
    const int oh = (18 + 2 - 4) / 2 + 1, ow = (14 + 2 - 4) / 2 + 1;
    std::vector<float> y_par(static_cast<std::size_t>(6) * oh * ow), y_ref(y_par.size());
    kernels::conv2d(x.data.data(), w.data.data(), b.data.data(), y_par.data(), 4, 18, 14, 6, 4, 4,
                    2, 1);
    kernels::conv2d_ref(x.data.data(), w.data.data(), b.data.data(), y_ref.data(), 4, 18, 14, 6,
                        4, 4, 2, 1);
    CHECK(y_par == y_ref);
  }
}

TEST_CASE("autograd matches finite differences on composite graphs") {
  std::mt19937 rng(3);
  SUBCASE("linear + relu + tanh chain") {
    Tensor xt = random_tensor({4, 6}, rng);
    Tensor wt = random_tensor({6, 5}, rng);
    Tensor bt = random_tensor({5}, rng);
    auto run = [&]() {
      const ag::Var x = ag::constant(xt);
      const ag::Var w = ag::param(wt);
      const ag::Var b = ag::param(bt);
      return ag::mean_sq(ag::tanh_(ag::relu(ag::linear(x, w, b))));
    };
    const ag::Var x = ag::constant(xt);
    const ag::Var w = ag::param(wt);
    const ag::Var b = ag::param(bt);
    const ag::Var loss = ag::mean_sq(ag::tanh_(ag::relu(ag::linear(x, w, b))));
    ag::backward(loss);
    for (std::size_t i : {std::size_t{0}, std::size_t{7}, std::size_t{29}}) {
      const float num = numeric_grad(wt, i, [&] { return ag::scalar(run()); });
      CHECK(w->grad.data[i] == doctest::Approx(num).epsilon(2e-2));
    }
  }
  SUBCASE("conv2d + instance norm + sigmoid") {
    Tensor xt = random_tensor({2, 6, 6}, rng);
    Tensor wt = random_tensor({3, 2, 3, 3}, rng, -0.5f, 0.5f);
    Tensor bt = random_tensor({3}, rng);
    Tensor gt = random_tensor({3}, rng, 0.5f, 1.5f);
    Tensor bet = random_tensor({3}, rng);
    auto make = [&](bool grad) {
      const ag::Var x = grad ? ag::param(xt) : ag::constant(xt);
      const ag::Var w = ag::param(wt);
      const ag::Var b = ag::param(bt);
      const ag::Var g = ag::param(gt);
      const ag::Var be = ag::param(bet);
      const ag::Var y =
          ag::mean_sq(ag::sigmoid_(ag::instance_norm(ag::conv2d(x, w, b, 1, 1), g, be)));
      return std::make_pair(y, std::array<ag::Var, 3>{x, w, g});
    };
    auto [loss, vars] = make(true);
    ag::backward(loss);
    for (std::size_t i : {std::size_t{1}, std::size_t{20}}) {
      const float num = numeric_grad(xt, i, [&] { return ag::scalar(make(true).first); });
      CHECK(vars[0]->grad.data[i] == doctest::Approx(num).epsilon(3e-2));
    }
    for (std::size_t i : {std::size_t{0}, std::size_t{13}}) {
      const float num = numeric_grad(wt, i, [&] { return ag::scalar(make(true).first); });
      CHECK(vars[1]->grad.data[i] == doctest::Approx(num).epsilon(3e-2));
    }
  }
  SUBCASE("grid_sample and scatter") {
    Tensor mt = random_tensor({2, 4, 4}, rng);
    const std::vector<float> coords = {0.3f, 1.7f, 2.5f, 0.1f, 3.9f, 3.2f};
    auto run = [&]() {
      const ag::Var m = ag::param(mt);
      return ag::mean_sq(
          ag::scatter_rows_to_image(ag::grid_sample(m, coords), {0, 5, 8}, 3, 3));
    };
    const ag::Var m = ag::param(mt);
    const ag::Var loss = ag::mean_sq(
        ag::scatter_rows_to_image(ag::grid_sample(m, coords), {0, 5, 8}, 3, 3));
    ag::backward(loss);
    for (std::size_t i : {std::size_t{5}, std::size_t{21}}) {
      const float num = numeric_grad(mt, i, [&] { return ag::scalar(run()); });
      CHECK(m->grad.data[i] == doctest::Approx(num).epsilon(2e-2));
    }
  }
  SUBCASE("softmax, broadcast and repeat") {
    Tensor st = random_tensor({6}, rng);
    Tensor xt = random_tensor({2, 3, 3}, rng);
    auto run = [&]() {
      const ag::Var s = ag::param(st);
      const ag::Var x = ag::param(xt);
      const ag::Var sm = ag::softmax_ch(x);
      const ag::Var w = ag::repeat_ch(ag::slice_ch(sm, 0, 1), 3);
      return std::make_tuple(ag::mean_sq(ag::mul(w, ag::broadcast_ch(s, 1, 3, 3, 3))), s, x);
    };
    auto [loss, s, x] = run();
    ag::backward(loss);
    for (std::size_t i : {std::size_t{1}, std::size_t{3}}) {
      const float num = numeric_grad(st, i, [&] { return ag::scalar(std::get<0>(run())); });
      CHECK(s->grad.data[i] == doctest::Approx(num).epsilon(2e-2));
    }
    for (std::size_t i : {std::size_t{2}, std::size_t{11}}) {
      const float num = numeric_grad(xt, i, [&] { return ag::scalar(std::get<0>(run())); });
      CHECK(x->grad.data[i] == doctest::Approx(num).epsilon(3e-2));
    }
  }
}

TEST_CASE("instance norm is invariant to constant input offsets") {
  std::mt19937 rng(5);
  const Tensor x = random_tensor({3, 8, 8}, rng);
  Tensor shifted = x;
  for (float& v : shifted.data) v += 0.7f;
  const ag::Var g = ag::constant(Tensor::full({3}, 1.0f));
  const ag::Var b = ag::constant(Tensor::zeros({3}));
  const ag::Var a = ag::instance_norm(ag::constant(x), g, b);
  const ag::Var c = ag::instance_norm(ag::constant(shifted), g, b);
  for (std::size_t i = 0; i < a->val.data.size(); ++i)
    CHECK(a->val.data[i] == doctest::Approx(c->val.data[i]).epsilon(1e-5));
}

TEST_CASE("unet: desk shapes and closed-form parameter count") {
  std::mt19937 rng(2);
  nn::UNetConfig uc;
  uc.in_channels = 9;
  uc.out_channels = 8;
  uc.widths = {8, 16, 32, 64, 128};
  const nn::UNet net(uc, rng);
  nn::ParamMap pm;
  net.reg(pm, "u");
  CHECK(pm.total_scalars() == nn::UNet::expected_param_count(uc));
  const ag::Var out = net.forward(ag::constant(Tensor::zeros({9, 32, 32})));
  CHECK(out->val.shape == std::vector<int>{8, 32, 32});

  SUBCASE("size polymorphic") {
    const ag::Var o64 = net.forward(ag::constant(Tensor::zeros({9, 64, 64})));
    CHECK(o64->val.shape == std::vector<int>{8, 64, 64});
  }
  SUBCASE("tanh head is strictly inside (-1,1)") {
    std::mt19937 rng2(4);
    const ag::Var o = net.forward(ag::constant(random_tensor({9, 32, 32}, rng2)));
    for (float v : o->val.data) {
      CHECK(v > -1.0f);
      CHECK(v < 1.0f);
    }
  }
}

TEST_CASE("adam with lr 0 changes nothing") {
  std::mt19937 rng(8);
  nn::Linear lin(4, 3, rng);
  nn::ParamMap pm;
  lin.reg(pm, "l");
  const std::uint64_t before = param_checksum(pm);
  std::vector<ag::Var> params{lin.w, lin.b};
  const ag::Var loss = ag::mean_sq(lin.forward(ag::constant(random_tensor({2, 4}, rng))));
  nn::Adam adam;
  adam.zero_grad(params);
  ag::backward(loss);
  adam.step(params, 0.0f);
  CHECK(param_checksum(pm) == before);
}

TEST_CASE("checkpoint round trip and mismatch errors") {
  std::mt19937 rng(9);
  nn::Linear lin(3, 2, rng);
  nn::ParamMap pm;
  lin.reg(pm, "lin");
  Checkpoint ck = Checkpoint::from_params(pm);
  const std::string path = "/tmp/ganerf_test_ckpt.gckp";
  ck.save(path);
  const Checkpoint loaded = Checkpoint::load(path);

  nn::Linear lin2(3, 2, rng);
  nn::ParamMap pm2;
  lin2.reg(pm2, "lin");
  loaded.into_params(pm2);
  CHECK(lin2.w->val.data == lin.w->val.data);

  nn::Linear wrong(4, 2, rng);
  nn::ParamMap pmw;
  wrong.reg(pmw, "lin");
  CHECK_THROWS(loaded.into_params(pmw));
  std::remove(path.c_str());
}

TEST_CASE("config: presets, round trip, unknown keys") {
  RunConfig desk;
  CHECK(desk.image_res == 4 * desk.feature_res);
  const RunConfig back = RunConfig::from_map(desk.to_map());
  CHECK(back.hash() == desk.hash());

  std::map<std::string, std::string> bad{{"scale", "desk"}, {"no_such_key", "1"}};
  CHECK_THROWS(RunConfig::from_map(bad));

  std::map<std::string, std::string> paper{{"scale", "paper"}};
  const RunConfig pc = RunConfig::from_map(paper);
  CHECK(pc.image_res == 512);
  CHECK(pc.uv_res == 128);
  CHECK(pc.feature_res == 128);
  CHECK(pc.unet_widths() == std::vector<int>{32, 64, 128, 256, 512});
  CHECK(pc.nerf_hidden == 256);
}

}  // TEST_SUITE
