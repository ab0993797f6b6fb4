#include "ganerf/train/pipeline.hpp"

#include "ganerf/maps/infomaps.hpp"

namespace ganerf::train {

Models::Models(const RunConfig& cfg, const data::Dataset& ds, std::uint32_t seed) {
  std::mt19937 rng(seed);
  enc_dyn = net::DynamicEncoder(cfg, rng);
  enc_det = net::DetailEncoder(cfg, rng);
  field = nerf::RadianceField(cfg, rng);
  decomp = palette::DecompositionNet(cfg, rng);
  pal = palette::init_palette(ds);
  gimg = gen::ImageGenerator(cfg, rng);
  texture = gen::NeuralTexture(cfg.neural_texture_channels, cfg.neural_texture_res, rng);
}

void Models::reg_trainable(nn::ParamMap& pm) const {
  enc_dyn.reg(pm);
  enc_det.reg(pm);
  field.reg(pm);
  decomp.reg(pm);
  pal.reg(pm);
}

void Models::reg_all(nn::ParamMap& pm) const {
  reg_trainable(pm);
  gimg.reg(pm);
  pm.add("neural_texture", texture.values);
}

void save_models(const std::string& path, const Models& m) {
  nn::ParamMap pm;
  m.reg_all(pm);
  Checkpoint::from_params(pm).save(path);
}

void load_models(const std::string& path, Models& m) {
  nn::ParamMap pm;
  m.reg_all(pm);
  Checkpoint::load(path).into_params(pm);
  m.gimg.freeze();
  m.texture.values->requires_grad = false;
}

FrameContext build_frame_context(const data::Dataset& ds, const Models& m, bool um, int t) {
  const RunConfig& cfg = ds.cfg;
  FrameContext ctx;
  ctx.fg.posed = ds.posed_body(um, t);
  ctx.fg.bvh = std::make_shared<geom::ClosestPointBVH>(ctx.fg.posed);
  ctx.fg.tmpl = &ds.tmpl;
  nerf::scene_bounds(ctx.fg.posed, cfg.garment_margin, ctx.fg.lo, ctx.fg.hi);

  const data::Camera& front = ds.rig.cameras[static_cast<std::size_t>(ds.rig.front_index)];
  const data::Camera& back = ds.rig.cameras[static_cast<std::size_t>(ds.rig.back_index)];
  ctx.fg.views.front_cam = front;
  ctx.fg.views.back_cam = back;
  auto depth_tensor = [](std::vector<float> d, int h, int w) {
    Tensor out({1, h, w});
    out.data = std::move(d);
    return out;
  };
  ctx.fg.views.front_depth =
      depth_tensor(data::render_depth(ctx.fg.posed, front), front.height, front.width);
  ctx.fg.views.back_depth =
      depth_tensor(data::render_depth(ctx.fg.posed, back), back.height, back.width);

  if (cfg.use_dynamic_feature) {
    const auto& motion = ds.motion(um);
    const geom::PoseFrame& pose = motion.frames[static_cast<std::size_t>(t)];
    maps::HistoryWindow win;
    win.k = cfg.history_k;
    for (int j = 0; j <= cfg.history_k; ++j) {
      const int tj = std::max(0, t - j);
      win.world_positions.push_back(ds.posed_body(um, tj).vertices);
      win.root_transforms.push_back(motion.frames[static_cast<std::size_t>(tj)].root_transform);
    }
    const maps::UVRaster n_map =
        maps::normal_map(ctx.fg.posed, ds.tmpl, pose, cfg.uv_res, cfg.uv_res, cfg.root_align);
    const maps::UVRaster v_map =
        maps::velocity_map(win, ds.tmpl, cfg.uv_res, cfg.uv_res, cfg.root_align);
    ctx.f_s = net::encode_dynamic(m.enc_dyn, n_map, v_map).map;
  }
  if (cfg.use_detail_feature) {
    for (int side = 0; side < 2; ++side) {
      const data::Camera& cam = side ? back : front;
      const gen::BodyUVRaster raster = gen::rasterize_body_uv(
          ctx.fg.posed, ds.tmpl, cam, m.texture.values->val.dim(1), m.texture.values->val.dim(2));
      const ag::Var q = gen::render_neural_texture(raster, m.texture);
      const ag::Var ref = gen::generate_reference(m.gimg, q);
      const net::FeatureMap2D fd = net::encode_detail(
          m.enc_det, ref, side ? net::FeatureTag::DetailBack : net::FeatureTag::DetailFront);
      (side ? ctx.fd_back : ctx.fd_front) = fd.map;
    }
  }
  return ctx;
}

RenderedFrame render_frame(const data::Dataset& ds, const Models& m, const FrameContext& ctx,
                           int cam_id, std::mt19937* jitter_rng) {
  const nerf::AppearanceFeatureImage fz =
      nerf::render_feature_image(ds.cfg, ds.camera(cam_id), ctx.fg, m.field, ctx.f_s,
                                 ctx.fd_front, ctx.fd_back, jitter_rng);
  RenderedFrame out;
  out.maps = palette::decompose(fz.features, m.decomp);
  out.image = palette::composite(out.maps, m.pal.p);
  out.alpha = fz.alpha;
  return out;
}

}  // namespace ganerf::train
