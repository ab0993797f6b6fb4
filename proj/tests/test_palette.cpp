#include <doctest.h>

#include <cmath>
#include <random>

#include "ganerf/palette/palette.hpp"

using namespace ganerf;

namespace {

// builds a random but well-formed set of decomposition maps
palette::DecompositionMaps random_maps(int h, int w, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> uo(-0.99f, 0.99f), ur(0.0f, 2.5f), uw(0.0f, 1.0f);

  Tensor O({6, h, w}), R({3, h, w}), W({2, h, w}), wg({1, h, w}), M({1, h, w});
  for (auto& v : O.data) v = uo(rng);
  for (auto& v : R.data) v = ur(rng);
  for (auto& v : M.data) v = uw(rng);
  for (int i = 0; i < h * w; ++i) {
    const float a = uw(rng);
    W.data[static_cast<std::size_t>(i)] = a;
    W.data[static_cast<std::size_t>(h * w + i)] = 1.0f - a;
    wg.data[static_cast<std::size_t>(i)] = a;
  }
  palette::DecompositionMaps m;
  m.O = ag::constant(O);
  m.R = ag::constant(R);
  m.Wmap = ag::constant(W);
  m.w = ag::constant(wg);
  m.M = ag::constant(M);
  return m;
}

Tensor palette_tensor(const geom::Vec3& pg, const geom::Vec3& pb) {
  Tensor p({6});
  p.data = {pg.x, pg.y, pg.z, pb.x, pb.y, pb.z};
  return p;
}

// the compositing equation, one pixel and channel at a time
float composite_scalar(float m, float r, float w, float pg, float og, float pb, float ob) {
  return m * r * (w * (pg + og) + (1.0f - w) * (pb + ob));
}

}  // namespace

TEST_SUITE("palette") {

TEST_CASE("compositing matches the per-pixel scalar formula on random tuples") {
  const int h = 250, w = 400;  // 100000 pixels
  const palette::DecompositionMaps maps = random_maps(h, w, 41);
  const geom::Vec3 pg{0.7f, 0.2f, 0.1f}, pb{0.3f, 0.4f, 0.9f};
  const ag::Var p = ag::constant(palette_tensor(pg, pb));
  const ag::Var c = palette::composite(maps, p);
  REQUIRE(c->val.shape == std::vector<int>({3, h, w}));

  const float pgv[3] = {pg.x, pg.y, pg.z}, pbv[3] = {pb.x, pb.y, pb.z};
  float max_err = 0;
  for (int ch = 0; ch < 3; ++ch)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const float expect = composite_scalar(
            maps.M->val.at3(0, y, x), maps.R->val.at3(ch, y, x), maps.w->val.at3(0, y, x),
            pgv[ch], maps.O->val.at3(ch, y, x), pbv[ch], maps.O->val.at3(3 + ch, y, x));
        max_err = std::max(max_err, std::abs(c->val.at3(ch, y, x) - expect));
      }
  CHECK(max_err <= 1e-6f);
}

TEST_CASE("recoloring") {
  const int h = 40, w = 40;
  const palette::DecompositionMaps maps = random_maps(h, w, 42);
  const geom::Vec3 pg{0.6f, 0.25f, 0.15f}, pb{0.35f, 0.4f, 0.8f};
  const ag::Var p = ag::constant(palette_tensor(pg, pb));
  const geom::Vec3 ng{0.1f, 0.9f, 0.4f};

  const ag::Var base = palette::composite(maps, p);
  const Tensor re = palette::recolor(maps, p, ng);
  REQUIRE(re.shape == base->val.shape);

  SUBCASE("delta equals m * r * w * (new_pG - pG) per channel") {
    const float d[3] = {ng.x - pg.x, ng.y - pg.y, ng.z - pg.z};
    for (int ch = 0; ch < 3; ++ch)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const float expect = maps.M->val.at3(0, y, x) * maps.R->val.at3(ch, y, x) *
                               maps.w->val.at3(0, y, x) * d[ch];
          CHECK(re.at3(ch, y, x) - base->val.at3(ch, y, x) ==
                doctest::Approx(expect).epsilon(1e-6).scale(1.0f));
        }
  }
  SUBCASE("pixels with m * w = 0 are exactly invariant") {
    palette::DecompositionMaps z = random_maps(h, w, 43);
    Tensor wz = z.w->val;
    Tensor Wz = z.Wmap->val;
    Tensor Mz = z.M->val;
    for (int i = 0; i < h * w; ++i) {
      if (i % 2 == 0) {
        wz.data[static_cast<std::size_t>(i)] = 0.0f;
        Wz.data[static_cast<std::size_t>(i)] = 0.0f;
        Wz.data[static_cast<std::size_t>(h * w + i)] = 1.0f;
      } else {
        Mz.data[static_cast<std::size_t>(i)] = 0.0f;
      }
    }
    z.w = ag::constant(wz);
    z.Wmap = ag::constant(Wz);
    z.M = ag::constant(Mz);
    const ag::Var b2 = palette::composite(z, p);
    const Tensor r2 = palette::recolor(z, p, ng);
    for (std::size_t i = 0; i < r2.data.size(); ++i)
      CHECK(r2.data[i] == b2->val.data[i]);  // bitwise
  }
}

TEST_CASE("compositing is affine in the palette") {
  const int h = 16, w = 16;
  const palette::DecompositionMaps maps = random_maps(h, w, 44);
  Tensor p1 = palette_tensor({0.1f, 0.2f, 0.3f}, {0.9f, 0.8f, 0.7f});
  Tensor p2 = palette_tensor({0.5f, 0.6f, 0.4f}, {0.2f, 0.3f, 0.1f});
  const float alpha = 0.3f;
  Tensor pm({6});
  for (int i = 0; i < 6; ++i)
    pm.data[static_cast<std::size_t>(i)] =
        alpha * p1.data[static_cast<std::size_t>(i)] + (1 - alpha) * p2.data[static_cast<std::size_t>(i)];

  const ag::Var c1 = palette::composite(maps, ag::constant(p1));
  const ag::Var c2 = palette::composite(maps, ag::constant(p2));
  const ag::Var cm = palette::composite(maps, ag::constant(pm));
  for (std::size_t i = 0; i < cm->val.data.size(); ++i)
    CHECK(cm->val.data[i] ==
          doctest::Approx(alpha * c1->val.data[i] + (1 - alpha) * c2->val.data[i]).epsilon(1e-5));
}

TEST_CASE("decomposition network output structure") {
  std::map<std::string, std::string> kv{{"zeta_dim", "16"}, {"decomp_mid", "8"}};
  const RunConfig cfg = RunConfig::from_map(kv);
  std::mt19937 rng(45);
  palette::DecompositionNet net(cfg, rng);

  Tensor fz({16, 8, 8});
  std::uniform_real_distribution<float> uni(-1.0f, 1.0f);
  for (auto& v : fz.data) v = uni(rng);
  const palette::DecompositionMaps m = palette::decompose(ag::constant(fz), net);

  // two 2x upsampling stages: 8 -> 32
  CHECK(m.height() == 32);
  CHECK(m.width() == 32);
  CHECK(m.O->val.dim(0) == 6);
  CHECK(m.R->val.dim(0) == 3);
  CHECK(m.Wmap->val.dim(0) == 2);
  CHECK(m.w->val.dim(0) == 1);
  CHECK(m.M->val.dim(0) == 1);

  for (float v : m.O->val.data) {
    CHECK(v > -1.0f);
    CHECK(v < 1.0f);
  }
  for (float v : m.R->val.data) CHECK(v >= 0.0f);
  for (float v : m.M->val.data) {
    CHECK(v > 0.0f);
    CHECK(v < 1.0f);
  }
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) {
      CHECK(m.Wmap->val.at3(0, y, x) + m.Wmap->val.at3(1, y, x) ==
            doctest::Approx(1.0f).epsilon(1e-5));
      CHECK(m.w->val.at3(0, y, x) == m.Wmap->val.at3(0, y, x));
    }

  CHECK_THROWS_AS(palette::decompose(ag::constant(Tensor::zeros({8, 8, 8})), net),
                  std::invalid_argument);
}

TEST_CASE("palette initialization and the frozen target") {
  data::Dataset ds;
  ds.mu_garment = {0.52f, 0.13f, 0.22f};
  ds.mu_body = {0.31f, 0.42f, 0.56f};
  palette::PaletteVector pal = palette::init_palette(ds);

  const std::vector<float> expect{0.52f, 0.13f, 0.22f, 0.31f, 0.42f, 0.56f};
  REQUIRE(pal.p->val.data.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(pal.p->val.data[static_cast<std::size_t>(i)] ==
          doctest::Approx(expect[static_cast<std::size_t>(i)]));
    CHECK(pal.p_star().data[static_cast<std::size_t>(i)] ==
          doctest::Approx(expect[static_cast<std::size_t>(i)]));
  }

  SUBCASE("updating p leaves p_star untouched") {
    for (auto& v : pal.p->val.data) v += 0.2f;
    for (int i = 0; i < 6; ++i)
      CHECK(pal.p_star().data[static_cast<std::size_t>(i)] ==
            doctest::Approx(expect[static_cast<std::size_t>(i)]));
  }
  SUBCASE("out-of-range mean colors are rejected") {
    data::Dataset bad;
    bad.mu_garment = {1.4f, 0.2f, 0.2f};
    bad.mu_body = {0.3f, 0.3f, 0.3f};
    CHECK_THROWS_AS(palette::init_palette(bad), std::domain_error);
  }
}

}  // TEST_SUITE
