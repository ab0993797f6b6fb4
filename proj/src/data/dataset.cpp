#include "ganerf/data/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "ganerf/data/image_io.hpp"

namespace ganerf::data {

namespace fs = std::filesystem;

const Camera& Dataset::camera(int cam_id) const {
  if (cam_id < n_rig_cams()) return rig.cameras[cam_id];
  const int u = cam_id - n_rig_cams();
  if (u < static_cast<int>(unseen_view_cams.size())) return unseen_view_cams[u];
  throw std::domain_error("camera id out of range: " + std::to_string(cam_id));
}

std::string Dataset::frame_dir(bool um, int t) const {
  return root + (um ? "/um_frames/" : "/frames/") + std::to_string(t);
}

Tensor Dataset::gt_image(bool um, int t, int cam_id) const {
  return load_png_rgb(frame_dir(um, t) + "/" + std::to_string(cam_id) + ".png");
}

std::vector<std::uint8_t> Dataset::gt_mask(bool um, int t, int cam_id) const {
  int h, w;
  auto v = load_png_gray(frame_dir(um, t) + "/mask_" + std::to_string(cam_id) + ".png", h, w);
  for (auto& x : v) x = x ? 1 : 0;
  return v;
}

std::vector<std::uint8_t> Dataset::gt_seg(bool um, int t, int cam_id) const {
  int h, w;
  auto v = load_png_gray(frame_dir(um, t) + "/seg_" + std::to_string(cam_id) + ".png", h, w);
  for (auto& x : v) x = x == 255 ? kGarment : (x == 127 ? kBody : kBackground);
  return v;
}

geom::Mesh Dataset::posed_body(bool um, int t) const {
  return geom::pose_body(tmpl, motion(um).frames.at(t));
}

std::vector<geom::Vec3> Dataset::velocity_history(bool um, int t, int n) const {
  const auto& frames = motion(um).frames;
  std::vector<geom::Vec3> hist;
  for (int i = 0; i < n; ++i) {
    const int a = t - i, b = t - i - 1;
    if (b < 0) hist.push_back({0, 0, 0});
    else hist.push_back(root_position(frames[a]) - root_position(frames[b]));
  }
  return hist;
}

geom::Mesh Dataset::garment_mesh(bool um, int t) const {
  const auto& frame = motion(um).frames.at(t);
  return generate_garment_frame(frame.root_transform,
                                velocity_history(um, t, std::max(cfg.history_k, 3)),
                                garment_cfg);
}

namespace {

struct MeanAccum {
  double r = 0, g = 0, b = 0;
  long long n = 0;
  void add(const Tensor& img, const std::vector<std::uint8_t>& seg, std::uint8_t label,
           int H, int W) {
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        if (seg[static_cast<std::size_t>(y) * W + x] == label) {
          r += img.at3(0, y, x);
          g += img.at3(1, y, x);
          b += img.at3(2, y, x);
          ++n;
        }
  }
  geom::Vec3 mean() const {
    if (n == 0) throw std::domain_error("empty segment while computing mean color");
    return {static_cast<float>(r / n), static_cast<float>(g / n), static_cast<float>(b / n)};
  }
};

std::vector<std::uint8_t> seg_to_png(const std::vector<std::uint8_t>& seg) {
  std::vector<std::uint8_t> v(seg.size());
  for (std::size_t i = 0; i < seg.size(); ++i)
    v[i] = seg[i] == kGarment ? 255 : (seg[i] == kBody ? 127 : 0);
  return v;
}

void render_and_write(const Dataset& ds, bool um, int t, const geom::Mesh& body,
                      const geom::Mesh& garment, const std::vector<float>& wrinkle,
                      MeanAccum* acc_g, MeanAccum* acc_b, bool train_frame) {
  const auto& cfg = ds.cfg;
  const std::string dir = ds.frame_dir(um, t);
  fs::create_directories(dir);
  geom::save_mesh(dir + "/body.mesh", body);
  geom::save_mesh(dir + "/garment.mesh", garment);

  RenderObject body_obj;
  body_obj.mesh = &body;
  body_obj.label = kBody;
  body_obj.albedo = {cfg.body_color_r, cfg.body_color_g, cfg.body_color_b};
  RenderObject garment_obj;
  garment_obj.mesh = &garment;
  garment_obj.label = kGarment;
  garment_obj.albedo = {cfg.garment_color_r, cfg.garment_color_g, cfg.garment_color_b};
  garment_obj.albedo_scale = wrinkle;

  RenderOptions opts;
  opts.unshaded = cfg.unshaded;
  const int n_cams = um ? ds.n_rig_cams() : ds.n_all_cams();
  for (int c = 0; c < n_cams; ++c) {
    const Camera& cam = ds.camera(c);
    RenderResult r = render_scene({body_obj, garment_obj}, cam, opts);
    const Tensor img = quantize8(r.image);
    save_png_rgb(dir + "/" + std::to_string(c) + ".png", img);
    std::vector<std::uint8_t> mask255(r.mask.size());
    for (std::size_t i = 0; i < r.mask.size(); ++i) mask255[i] = r.mask[i] ? 255 : 0;
    save_png_gray(dir + "/mask_" + std::to_string(c) + ".png", mask255, cam.height, cam.width);
    save_png_gray(dir + "/seg_" + std::to_string(c) + ".png", seg_to_png(r.seg), cam.height,
                  cam.width);
    if (train_frame && c < ds.n_rig_cams() && acc_g && acc_b) {
      acc_g->add(img, r.seg, kGarment, cam.height, cam.width);
      acc_b->add(img, r.seg, kBody, cam.height, cam.width);
    }
  }
}

void write_manifest(const Dataset& ds) {
  std::ofstream f(ds.root + "/manifest");
  if (!f) throw std::runtime_error("cannot write manifest in " + ds.root);
  f << std::setprecision(9);
  f << "format ganerf-dataset-1\n";
  for (const auto& [k, v] : ds.cfg.to_map()) f << "cfg." << k << " = " << v << "\n";
  f << "mu_garment = " << ds.mu_garment.x << " " << ds.mu_garment.y << " "
    << ds.mu_garment.z << "\n";
  f << "mu_body = " << ds.mu_body.x << " " << ds.mu_body.y << " " << ds.mu_body.z << "\n";
  f << "train_ids =";
  for (int t : ds.train_ids) f << " " << t;
  f << "\nheldout_ids =";
  for (int t : ds.heldout_ids) f << " " << t;
  f << "\n";
}

void populate_derived(Dataset& ds) {
  const SceneLayout layout;
  const auto& cfg = ds.cfg;
  ds.rig = make_camera_rig(cfg.cameras, layout.rig_radius, layout.cam_height,
                           layout.look_height, cfg.image_res, cfg.image_res);
  const float half_gap = 180.0f / static_cast<float>(cfg.cameras);
  CameraRig um_rig = make_camera_rig(layout.unseen_view_count, layout.rig_radius,
                                     layout.cam_height, layout.look_height, cfg.image_res,
                                     cfg.image_res, half_gap);
  ds.unseen_view_cams = um_rig.cameras;

  MotionConfig mc;
  mc.seed = cfg.motion_seed;
  ds.train_motion = generate_motion(mc, cfg.train_frames, 6);
  MotionConfig umc;
  umc.seed = cfg.unseen_motion_seed;
  ds.unseen_motion = generate_motion(umc, cfg.unseen_motion_frames, 6);

  ds.train_ids.clear();
  ds.heldout_ids.clear();
  for (int t = 0; t < cfg.train_frames; ++t) {
    if (t % 10 == 5) ds.heldout_ids.push_back(t);
    else ds.train_ids.push_back(t);
  }
}

}  // namespace

Dataset build_dataset(const RunConfig& cfg, const std::string& out_dir) {
  Dataset ds;
  ds.root = out_dir;
  ds.cfg = cfg;
  fs::create_directories(out_dir);
  ds.tmpl = make_body_template();
  geom::save_template(out_dir + "/template", ds.tmpl);
  populate_derived(ds);

  MeanAccum acc_g, acc_b;
  for (int um = 0; um <= 1; ++um) {
    const auto& mo = ds.motion(um != 0);
    for (int t = 0; t < static_cast<int>(mo.frames.size()); ++t) {
      const geom::Mesh body = ds.posed_body(um != 0, t);
      const auto hist = ds.velocity_history(um != 0, t, std::max(cfg.history_k, 3));
      const geom::Mesh garment =
          generate_garment_frame(mo.frames[t].root_transform, hist, ds.garment_cfg);
      const auto wrinkle =
          garment_wrinkle_scalars(mo.frames[t].root_transform, hist, ds.garment_cfg);
      const bool is_train =
          um == 0 && std::find(ds.train_ids.begin(), ds.train_ids.end(), t) != ds.train_ids.end();
      render_and_write(ds, um != 0, t, body, garment, wrinkle, &acc_g, &acc_b, is_train);
    }
  }
  ds.mu_garment = acc_g.mean();
  ds.mu_body = acc_b.mean();
  write_manifest(ds);
  return ds;
}

Dataset load_dataset(const std::string& dir) {
  std::ifstream f(dir + "/manifest");
  if (!f) throw std::runtime_error("cannot open dataset manifest: " + dir + "/manifest");
  Dataset ds;
  ds.root = dir;
  std::map<std::string, std::string> cfg_kv;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string key;
    is >> key;
    if (key == "format") {
      std::string fmt;
      is >> fmt;
      if (fmt != "ganerf-dataset-1")
        throw std::runtime_error("unknown dataset format: " + fmt);
      continue;
    }
    std::string eq;
    is >> eq;
    if (eq != "=") throw std::runtime_error("bad manifest line: " + line);
    if (key.rfind("cfg.", 0) == 0) {
      std::string rest;
      std::getline(is, rest);
      const auto a = rest.find_first_not_of(' ');
      cfg_kv[key.substr(4)] = a == std::string::npos ? "" : rest.substr(a);
    } else if (key == "mu_garment") {
      is >> ds.mu_garment.x >> ds.mu_garment.y >> ds.mu_garment.z;
    } else if (key == "mu_body") {
      is >> ds.mu_body.x >> ds.mu_body.y >> ds.mu_body.z;
    } else if (key == "train_ids") {
      int t;
      while (is >> t) ds.train_ids.push_back(t);
    } else if (key == "heldout_ids") {
      int t;
      while (is >> t) ds.heldout_ids.push_back(t);
    } else {
      throw std::runtime_error("unknown manifest key: " + key);
    }
  }
  ds.cfg = RunConfig::from_map(cfg_kv);
  ds.tmpl = geom::load_template(dir + "/template");
  const auto saved_train = ds.train_ids, saved_heldout = ds.heldout_ids;
  populate_derived(ds);
  ds.train_ids = saved_train;
  ds.heldout_ids = saved_heldout;
  return ds;
}

}  // namespace ganerf::data
