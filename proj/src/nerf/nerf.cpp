#include "ganerf/nerf/nerf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ganerf::nerf {

RadianceField::RadianceField(const RunConfig& cfg, std::mt19937& rng) {
  nn::FieldMLPConfig fc;
  fc.in_dim = 4 + 8 + 8;
  fc.hidden = cfg.nerf_hidden;
  fc.depth = cfg.nerf_depth;
  fc.feature_dim = cfg.zeta_dim;
  mlp = nn::FieldMLP(fc, rng);
}

std::pair<ag::Var, ag::Var> eval_field(const RadianceField& field, const ag::Var& input) {
  if (input->val.dim(1) != field.mlp.cfg.in_dim)
    throw std::invalid_argument("field input width " + std::to_string(input->val.dim(1)) +
                                ", expected " + std::to_string(field.mlp.cfg.in_dim));
  auto [sigma_raw, zeta] = field.mlp.forward(input);
  // shifted softplus keeps early densities small but nonzero
  return {ag::softplus_(ag::add_const(sigma_raw, -1.0f)), zeta};
}

bool ray_box(const geom::Vec3& o, const geom::Vec3& d, const geom::Vec3& lo,
             const geom::Vec3& hi, float& t_near, float& t_far) {
  t_near = -1e30f;
  t_far = 1e30f;
  const float ov[3] = {o.x, o.y, o.z}, dv[3] = {d.x, d.y, d.z};
  const float lov[3] = {lo.x, lo.y, lo.z}, hiv[3] = {hi.x, hi.y, hi.z};
  for (int a = 0; a < 3; ++a) {
    if (std::fabs(dv[a]) < 1e-12f) {
      if (ov[a] < lov[a] || ov[a] > hiv[a]) return false;
      continue;
    }
    float t0 = (lov[a] - ov[a]) / dv[a];
    float t1 = (hiv[a] - ov[a]) / dv[a];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
  }
  // an interval entirely behind the origin is a miss
  return t_near <= t_far && t_far > 0.0f;
}

void scene_bounds(const geom::Mesh& posed, float margin_frac, geom::Vec3& lo, geom::Vec3& hi) {
  posed.bounds(lo, hi);
  const float m = margin_frac * (hi.y - lo.y);
  lo = lo - geom::Vec3{m, m, m};
  hi = hi + geom::Vec3{m, m, m};
}

RaySampleBatch sample_rays(const data::Camera& cam, int res_h, int res_w, int n_samples,
                           const geom::Vec3& lo, const geom::Vec3& hi,
                           std::mt19937* jitter_rng) {
  if (n_samples < 2) throw std::invalid_argument("n_samples must be >= 2");
  if (cam.width <= 0 || cam.height <= 0 || cam.fx == 0 || cam.fy == 0)
    throw std::invalid_argument("degenerate camera");
  data::Camera scaled = cam;
  const float sx = static_cast<float>(res_w) / cam.width;
  const float sy = static_cast<float>(res_h) / cam.height;
  scaled.fx *= sx;
  scaled.cx *= sx;
  scaled.fy *= sy;
  scaled.cy *= sy;
  scaled.width = res_w;
  scaled.height = res_h;

  RaySampleBatch b;
  b.n_rays = res_h * res_w;
  b.origins.reserve(b.n_rays);
  std::uniform_real_distribution<float> uni(0.0f, 1.0f);
  for (int y = 0; y < res_h; ++y)
    for (int x = 0; x < res_w; ++x) {
      const geom::Vec3 dir = scaled.ray_dir(x + 0.5f, y + 0.5f);
      const geom::Vec3 origin = cam.center();
      b.origins.push_back(origin);
      b.dirs.push_back(dir);
      b.pixel.push_back(y * res_w + x);
      b.offset.push_back(b.total_samples());
      float tn, tf;
      if (!ray_box(origin, dir, lo, hi, tn, tf) || tf <= 1e-3f) {
        b.count.push_back(0);
        continue;
      }
      tn = std::max(tn, 1e-3f);
      const float bin = (tf - tn) / n_samples;
      for (int i = 0; i < n_samples; ++i) {
        const float u = jitter_rng ? uni(*jitter_rng) : 0.5f;
        const float t = tn + (i + u) * bin;
        b.positions.push_back(origin + dir * t);
        b.deltas.push_back(bin);
      }
      b.count.push_back(n_samples);
    }
  return b;
}

namespace {

// nearest-texel depth visibility; false when the projection leaves the image
bool visible_in(const geom::Vec3& p, const data::Camera& cam, const Tensor& depth, float eps,
                bool& in_image) {
  float u, v, z;
  in_image = false;
  if (!cam.project(p, u, v, z)) return false;
  const int x = static_cast<int>(std::floor(u));
  const int y = static_cast<int>(std::floor(v));
  if (x < 0 || y < 0 || x >= cam.width || y >= cam.height) return false;
  in_image = true;
  return z <= depth.at3(0, y, x) + eps;
}

}  // namespace

std::uint8_t select_reference_view(const geom::Vec3& b_t, const geom::Vec3& normal,
                                   const ReferenceViews& views, float eps) {
  bool in_f = false, in_b = false;
  const bool vis_f = visible_in(b_t, views.front_cam, views.front_depth, eps, in_f);
  const bool vis_b = visible_in(b_t, views.back_cam, views.back_depth, eps, in_b);
  if (vis_f) return 0;  // both-visible ties go to the front camera
  if (vis_b) return 1;
  const float df = normal.dot((views.front_cam.center() - b_t).normalized());
  const float db = normal.dot((views.back_cam.center() - b_t).normalized());
  return df >= db ? 0 : 1;
}

void lookup_features(RaySampleBatch& batch, const geom::Mesh& posed,
                     const geom::ClosestPointBVH& bvh, const geom::BodyTemplate& tmpl,
                     const ReferenceViews& views, int fs_h, int fs_w) {
  const int n = batch.total_samples();
  batch.xb.assign(static_cast<std::size_t>(n) * 4, 0.0f);
  batch.fs_coords.assign(static_cast<std::size_t>(n) * 2, 0.0f);
  batch.detail_coords.assign(static_cast<std::size_t>(n) * 2, 0.0f);
  batch.detail_pick.assign(n, 0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const geom::SurfaceSample s = bvh.query(batch.positions[static_cast<std::size_t>(i)]);
    const geom::Vec3 b_o = geom::to_canonical(tmpl, s);
    batch.xb[4 * i + 0] = b_o.x;
    batch.xb[4 * i + 1] = b_o.y;
    batch.xb[4 * i + 2] = b_o.z;
    batch.xb[4 * i + 3] = s.distance;
    const geom::Vec2 uv = geom::sample_uv(tmpl, s);
    batch.fs_coords[2 * i + 0] = uv.u * fs_w - 0.5f;
    batch.fs_coords[2 * i + 1] = uv.v * fs_h - 0.5f;
    const geom::Tri& tri = posed.triangles[static_cast<std::size_t>(s.triangle_index)];
    const geom::Vec3 nrm = (posed.vertices[tri.b] - posed.vertices[tri.a])
                               .cross(posed.vertices[tri.c] - posed.vertices[tri.a])
                               .normalized();
    const std::uint8_t pick = select_reference_view(s.position, nrm, views);
    batch.detail_pick[static_cast<std::size_t>(i)] = pick;
    const data::Camera& cam = pick ? views.back_cam : views.front_cam;
    float u, v, z;
    if (cam.project(s.position, u, v, z)) {
      batch.detail_coords[2 * i + 0] = u - 0.5f;
      batch.detail_coords[2 * i + 1] = v - 0.5f;
    } else {
      batch.detail_coords[2 * i + 0] = -1.0f;  // clamps to the border
      batch.detail_coords[2 * i + 1] = -1.0f;
    }
  }
}

ag::Var volume_render(const ag::Var& sigma, const ag::Var& zeta,
                      const std::vector<float>& deltas, const std::vector<int>& offset,
                      const std::vector<int>& count) {
  const int n = sigma->val.dim(0);
  const int z = zeta->val.dim(1);
  if (zeta->val.dim(0) != n || static_cast<int>(deltas.size()) != n)
    throw std::invalid_argument("volume_render input length mismatch");
  const int r = static_cast<int>(offset.size());
  for (float d : deltas)
    if (!(d > 0)) throw std::invalid_argument("volume_render: nonpositive delta");

  Tensor out({r, z + 1});
  auto d = std::make_shared<std::vector<float>>(deltas);
  auto off = std::make_shared<std::vector<int>>(offset);
  auto cnt = std::make_shared<std::vector<int>>(count);
  for (int ri = 0; ri < r; ++ri) {
    float t = 1.0f, alpha_acc = 0.0f;
    for (int i = offset[ri]; i < offset[ri] + count[ri]; ++i) {
      const float a = 1.0f - std::exp(-sigma->val.at2(i, 0) * deltas[static_cast<std::size_t>(i)]);
      const float w = t * a;
      for (int c = 0; c < z; ++c) out.at2(ri, c) += w * zeta->val.at2(i, c);
      alpha_acc += w;
      t *= 1.0f - a;
    }
    out.at2(ri, z) = alpha_acc;
  }
  return ag::make_node(std::move(out), {sigma, zeta}, [sigma, zeta, d, off, cnt, r, z](ag::Node& self) {
    Tensor* gs = sigma->requires_grad ? &sigma->ensure_grad() : nullptr;
    Tensor* gz = zeta->requires_grad ? &zeta->ensure_grad() : nullptr;
    for (int ri = 0; ri < r; ++ri) {
      const int o = (*off)[ri], c = (*cnt)[ri];
      // recompute per-sample alpha, transmittance and weight
      std::vector<float> alpha(c), trans(c + 1), wgt(c), s(c);
      trans[0] = 1.0f;
      for (int i = 0; i < c; ++i) {
        alpha[i] = 1.0f - std::exp(-sigma->val.at2(o + i, 0) * (*d)[static_cast<std::size_t>(o + i)]);
        wgt[i] = trans[i] * alpha[i];
        trans[i + 1] = trans[i] * (1.0f - alpha[i]);
      }
      const float ga = self.grad.at2(ri, z);
      for (int i = 0; i < c; ++i) {
        float dot = ga;
        for (int ch = 0; ch < z; ++ch) dot += self.grad.at2(ri, ch) * zeta->val.at2(o + i, ch);
        s[i] = dot;
        if (gz)
          for (int ch = 0; ch < z; ++ch) gz->at2(o + i, ch) += wgt[i] * self.grad.at2(ri, ch);
      }
      if (gs) {
        // dL/dsigma_i = delta_i * (T_{i+1} s_i - sum_{j>i} w_j s_j)
        float suffix = 0.0f;
        for (int i = c - 1; i >= 0; --i) {
          gs->at2(o + i, 0) += (*d)[static_cast<std::size_t>(o + i)] * (trans[i + 1] * s[i] - suffix);
          suffix += wgt[i] * s[i];
        }
      }
    }
  });
}

AppearanceFeatureImage render_feature_image(const RunConfig& cfg, const data::Camera& cam,
                                            const FrameGeometry& fg, const RadianceField& field,
                                            const ag::Var& f_s, const ag::Var& f_d_front,
                                            const ag::Var& f_d_back, std::mt19937* jitter_rng) {
  const int res = cfg.feature_res;
  const int zdim = cfg.zeta_dim;
  RaySampleBatch batch =
      sample_rays(cam, res, res, cfg.n_samples, fg.lo, fg.hi, jitter_rng);
  const int fs_h = f_s ? f_s->val.dim(1) : cfg.uv_res;
  const int fs_w = f_s ? f_s->val.dim(2) : cfg.uv_res;
  lookup_features(batch, fg.posed, *fg.bvh, *fg.tmpl, fg.views, fs_h, fs_w);

  AppearanceFeatureImage out;
  out.alpha = Tensor::zeros({1, res, res});
  const int rays_per_chunk = std::max(1, cfg.chunk);
  ag::Var total;
  for (int r0 = 0; r0 < batch.n_rays; r0 += rays_per_chunk) {
    const int r1 = std::min(batch.n_rays, r0 + rays_per_chunk);
    const int s0 = batch.offset[static_cast<std::size_t>(r0)];
    const int s1 = (r1 < batch.n_rays) ? batch.offset[static_cast<std::size_t>(r1)]
                                       : batch.total_samples();
    const int m = s1 - s0;
    if (m == 0) continue;

    ag::Var fs_rows, fd_rows;
    if (f_s) {
      std::vector<float> coords(batch.fs_coords.begin() + 2 * s0,
                                batch.fs_coords.begin() + 2 * s1);
      fs_rows = ag::grid_sample(f_s, coords);
    } else {
      fs_rows = ag::constant(Tensor::zeros({m, 8}));
    }
    if (f_d_front && f_d_back) {
      std::vector<std::uint8_t> pick(batch.detail_pick.begin() + s0,
                                     batch.detail_pick.begin() + s1);
      std::vector<float> fc, bc;
      for (int i = 0; i < m; ++i) {
        auto& dst = pick[static_cast<std::size_t>(i)] ? bc : fc;
        dst.push_back(batch.detail_coords[2 * (s0 + i)]);
        dst.push_back(batch.detail_coords[2 * (s0 + i) + 1]);
      }
      const ag::Var fr = fc.empty() ? ag::constant(Tensor::zeros({0, 8}))
                                    : ag::grid_sample(f_d_front, fc);
      const ag::Var bk = bc.empty() ? ag::constant(Tensor::zeros({0, 8}))
                                    : ag::grid_sample(f_d_back, bc);
      fd_rows = ag::interleave_rows(fr, bk, pick);
    } else {
      fd_rows = ag::constant(Tensor::zeros({m, 8}));
    }
    Tensor xb({m, 4});
    std::copy(batch.xb.begin() + 4 * s0, batch.xb.begin() + 4 * s1, xb.data.begin());
    const ag::Var input = ag::concat_cols({ag::constant(std::move(xb)), fd_rows, fs_rows});
    auto [sig, zeta] = eval_field(field, input);

    std::vector<float> cd(batch.deltas.begin() + s0, batch.deltas.begin() + s1);
    std::vector<int> coff, ccnt, cpix;
    for (int ri = r0; ri < r1; ++ri) {
      coff.push_back(batch.offset[static_cast<std::size_t>(ri)] - s0);
      ccnt.push_back(batch.count[static_cast<std::size_t>(ri)]);
      cpix.push_back(batch.pixel[static_cast<std::size_t>(ri)]);
    }
    const ag::Var rows = volume_render(sig, zeta, cd, coff, ccnt);
    const ag::Var feat = ag::slice_cols(rows, 0, zdim);
    const ag::Var img = ag::scatter_rows_to_image(feat, cpix, res, res);
    total = total ? ag::add(total, img) : img;
    for (std::size_t ri = 0; ri < cpix.size(); ++ri)
      out.alpha.data[static_cast<std::size_t>(cpix[ri])] =
          rows->val.at2(static_cast<int>(ri), zdim);
  }
  if (!total) total = ag::constant(Tensor::zeros({zdim, res, res}));
  out.features = total;
  return out;
}

}  // namespace ganerf::nerf
