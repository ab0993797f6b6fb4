#include "ganerf/eval/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "ganerf/train/training.hpp"

namespace ganerf::eval {

namespace fs = std::filesystem;

void MetricReport::write_csv(const std::string& path) const {
  std::ofstream f(path);
  f << "split,method,metric,value,failed\n";
  for (const auto& r : rows)
    f << r.split << ',' << r.method << ',' << r.metric << ',' << std::setprecision(9) << r.value
      << ',' << (r.failed ? 1 : 0) << '\n';
}

void MetricReport::write_summary(const std::string& path) const {
  std::ofstream f(path);
  f << "config_hash = " << config_hash << "\n";
  f << "seed = " << seed << "\n";
  f << "iteration = " << iteration << "\n";
  for (const auto& r : rows) {
    f << r.split << " / " << r.method << " / " << r.metric << " = ";
    if (r.failed)
      f << "FAILED\n";
    else
      f << std::setprecision(9) << r.value << "\n";
  }
}

Tensor render_eval_image(const data::Dataset& ds, const train::Models& m, bool um, int t,
                         int cam_id) {
  const train::FrameContext ctx = train::build_frame_context(ds, m, um, t);
  const train::RenderedFrame rf = train::render_frame(ds, m, ctx, cam_id, nullptr);
  Tensor img = rf.image->val;
  for (float& v : img.data) v = std::min(std::max(v, 0.0f), 1.0f);
  return img;
}

Tensor temporal_mean_image(const data::Dataset& ds, int cam_id) {
  Tensor acc = Tensor::zeros({3, ds.cfg.image_res, ds.cfg.image_res});
  for (int t : ds.train_ids) {
    const Tensor img = ds.gt_image(false, t, cam_id);
    for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += img.data[i];
  }
  for (float& v : acc.data) v /= static_cast<float>(ds.train_ids.size());
  return acc;
}

namespace {

struct SplitDef {
  std::string name;
  bool um = false;
  std::vector<int> frames;
  int cam_id = 0;
};

void metric_rows(MetricReport& rep, const std::string& split, const std::string& method,
                 const std::vector<Tensor>& pred, const std::vector<Tensor>& gt,
                 const train::PerceptualExtractor& ex, const FlowEstimator& fe,
                 bool include_tof) {
  double mp = 0, ms = 0, ml = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    mp += psnr(pred[i], gt[i]);
    ms += ssim(pred[i], gt[i]);
    ml += perceptual(ex, pred[i], gt[i]);
  }
  const float n = static_cast<float>(pred.size());
  rep.rows.push_back({split, method, "psnr", static_cast<float>(mp) / n});
  rep.rows.push_back({split, method, "ssim", static_cast<float>(ms) / n});
  rep.rows.push_back({split, method, "perceptual", static_cast<float>(ml) / n});
  if (include_tof && pred.size() >= 2)
    rep.rows.push_back({split, method, "tof", tof(pred, gt, fe)});
}

int nearest_rig_camera(const data::Dataset& ds, const data::Camera& cam) {
  int best = 0;
  float best_d = 1e30f;
  for (int i = 0; i < ds.n_rig_cams(); ++i) {
    const geom::Vec3 d = ds.rig.cameras[static_cast<std::size_t>(i)].center() - cam.center();
    const float dist = d.dot(d);
    if (dist < best_d - 1e-12f) {
      best_d = dist;
      best = i;
    }
  }
  return best;
}

}  // namespace

MetricReport evaluate(const data::Dataset& ds, const train::Models& m, const EvalOptions& opts) {
  MetricReport rep;
  rep.config_hash = ds.cfg.hash();
  rep.seed = ds.cfg.seed;

  const train::PerceptualExtractor ex;
  const FlowEstimator fe;

  std::vector<SplitDef> splits;
  {
    SplitDef seen{"seen_motion", false, ds.heldout_ids, ds.rig.front_index};
    if (static_cast<int>(seen.frames.size()) > opts.max_frames_per_split)
      seen.frames.resize(static_cast<std::size_t>(opts.max_frames_per_split));
    splits.push_back(seen);
  }
  if (!ds.unseen_view_cams.empty()) {
    SplitDef uv{"unseen_view", false, splits[0].frames,
                ds.n_rig_cams() + opts.unseen_view_cam};
    splits.push_back(uv);
  } else {
    std::cerr << "evaluate: unseen_view split missing, skipped\n";
  }
  {
    SplitDef um{"unseen_motion", true, {}, ds.rig.front_index};
    const int n_um = static_cast<int>(ds.unseen_motion.frames.size());
    for (int t = ds.cfg.history_k; t < n_um && static_cast<int>(um.frames.size()) < opts.max_frames_per_split; ++t)
      um.frames.push_back(t);
    if (um.frames.size() >= 2)
      splits.push_back(um);
    else
      std::cerr << "evaluate: unseen_motion split missing, skipped\n";
  }

  for (const SplitDef& sp : splits) {
    std::vector<Tensor> pred, gt;
    for (int t : sp.frames) {
      pred.push_back(render_eval_image(ds, m, sp.um, t, sp.cam_id));
      gt.push_back(ds.gt_image(sp.um, t, sp.cam_id));
    }
    metric_rows(rep, sp.name, "model", pred, gt, ex, fe, opts.include_tof);

    if (sp.name == "unseen_view") {
      const int src = nearest_rig_camera(ds, ds.camera(sp.cam_id));
      std::vector<Tensor> base;
      for (int t : sp.frames) base.push_back(ds.gt_image(false, t, src));
      metric_rows(rep, sp.name, "nearest_view", base, gt, ex, fe, opts.include_tof);
    } else {
      const Tensor mean_img = temporal_mean_image(ds, sp.cam_id);
      std::vector<Tensor> base(sp.frames.size(), mean_img);
      metric_rows(rep, sp.name, "temporal_mean", base, gt, ex, fe, opts.include_tof);
    }
  }
  return rep;
}

namespace {

struct RunOutcome {
  float psnr_v = 0, ssim_v = 0;
  bool failed = false;
};

RunOutcome run_cell(data::Dataset& ds, const RunConfig& cfg, const std::string& run_dir,
                    int pretrain_iters, int eval_frames) {
  RunOutcome out;
  try {
    ds.cfg = cfg;
    train::Models m(cfg, ds, cfg.seed);
    gen::pretrain_generator(ds, m.gimg, m.texture, pretrain_iters, cfg.seed + 5);
    train::train(ds, m, run_dir);
    std::vector<int> frames = ds.heldout_ids;
    if (static_cast<int>(frames.size()) > eval_frames)
      frames.resize(static_cast<std::size_t>(eval_frames));
    double mp = 0, ms = 0;
    for (int t : frames) {
      const Tensor pred = render_eval_image(ds, m, false, t, ds.rig.front_index);
      const Tensor gt = ds.gt_image(false, t, ds.rig.front_index);
      mp += psnr(pred, gt);
      ms += ssim(pred, gt);
    }
    out.psnr_v = static_cast<float>(mp / frames.size());
    out.ssim_v = static_cast<float>(ms / frames.size());
  } catch (const std::exception& e) {
    std::cerr << "ablation cell failed: " << e.what() << "\n";
    out.failed = true;
  }
  return out;
}

void push_cell(MetricReport& rep, const std::string& split, const RunOutcome& oc) {
  rep.rows.push_back({split, "model", "psnr", oc.psnr_v, oc.failed});
  rep.rows.push_back({split, "model", "ssim", oc.ssim_v, oc.failed});
}

}  // namespace

MetricReport ablate(const RunConfig& base, const std::string& work_dir,
                    const AblateOptions& opts) {
  MetricReport rep;
  rep.config_hash = base.hash();
  rep.seed = base.seed;
  fs::create_directories(work_dir);

  RunConfig cfg = base;
  cfg.iterations = opts.train_iterations;
  cfg.checkpoint_every = opts.train_iterations;

  const std::string base_data = work_dir + "/data_base";
  data::Dataset ds = fs::exists(base_data + "/manifest") ? data::load_dataset(base_data)
                                                         : data::build_dataset(cfg, base_data);

  // feature toggles: {neither, detail only, dynamic only, both}
  const std::pair<bool, bool> toggles[4] = {{false, false}, {false, true}, {true, false}, {true, true}};
  for (const auto& [dyn, det] : toggles) {
    RunConfig c = cfg;
    c.use_dynamic_feature = dyn;
    c.use_detail_feature = det;
    const std::string label =
        std::string("features_dyn") + (dyn ? "1" : "0") + "_det" + (det ? "1" : "0");
    push_cell(rep, label, run_cell(ds, c, work_dir + "/" + label, opts.pretrain_iterations,
                                   opts.eval_frames));
  }

  for (int views : opts.view_counts) {
    RunConfig c = cfg;
    c.cameras = views;
    const std::string ddir = work_dir + "/data_views" + std::to_string(views);
    const std::string label = "views_" + std::to_string(views);
    try {
      data::Dataset vds = fs::exists(ddir + "/manifest") ? data::load_dataset(ddir)
                                                         : data::build_dataset(c, ddir);
      push_cell(rep, label, run_cell(vds, c, work_dir + "/" + label, opts.pretrain_iterations,
                                     opts.eval_frames));
    } catch (const std::exception& e) {
      std::cerr << "ablation cell failed: " << e.what() << "\n";
      push_cell(rep, label, {0, 0, true});
    }
  }

  for (int k : opts.k_values) {
    RunConfig c = cfg;
    c.history_k = k;
    const std::string label = "k_" + std::to_string(k);
    push_cell(rep, label, run_cell(ds, c, work_dir + "/" + label, opts.pretrain_iterations,
                                   opts.eval_frames));
  }

  ds.cfg = cfg;  // restore
  return rep;
}

}  // namespace ganerf::eval
