#include "ganerf/train/training.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace ganerf::train {

namespace fs = std::filesystem;

float lr_at(const RunConfig& cfg, int it) {
  const int total = std::max(cfg.iterations, 2);
  const float f = static_cast<float>(std::min(it, total - 1)) / static_cast<float>(total - 1);
  return cfg.lr_start * std::pow(cfg.lr_end / cfg.lr_start, f);
}

namespace {

Tensor mask_tensor(const std::vector<std::uint8_t>& mask, int h, int w) {
  Tensor out({1, h, w});
  for (std::size_t i = 0; i < mask.size(); ++i)
    out.data[i] = mask[i] ? 1.0f : 0.0f;
  return out;
}

void write_sidecar(const std::string& path, const RunConfig& cfg, int iteration, float lr) {
  std::ofstream f(path);
  f << "iteration = " << iteration << "\n";
  f << "lr = " << std::setprecision(9) << lr << "\n";
  f << "seed = " << cfg.seed << "\n";
  f << "config_hash = " << cfg.hash() << "\n";
}

}  // namespace

TrainResult train(const data::Dataset& ds, Models& m, const std::string& out_dir,
                  int start_iteration, int max_iterations) {
  const RunConfig& cfg = ds.cfg;
  fs::create_directories(out_dir);
  if (!m.gimg.frozen)
    throw std::logic_error("image generator must be frozen before joint training");

  nn::ParamMap trainable, frozen;
  m.reg_trainable(trainable);
  m.gimg.reg(frozen);
  std::vector<ag::Var> params;
  for (auto& [n, v] : trainable.items) params.push_back(v);

  TrainResult result;
  result.frozen_checksum_before = param_checksum(frozen);

  PerceptualExtractor ex;
  nn::Adam adam;
  adam.t = start_iteration;

  const std::string csv_path = out_dir + "/metrics.csv";
  const bool fresh_csv = !fs::exists(csv_path) || start_iteration == 0;
  std::ofstream csv(csv_path, fresh_csv ? std::ios::trunc : std::ios::app);
  if (fresh_csv) csv << "iteration,L_img,L_vgg,L_sp,L_off,L_p,total,lr\n";

  const int stop = (max_iterations < 0) ? cfg.iterations
                                        : std::min(cfg.iterations, start_iteration + max_iterations);
  for (int it = start_iteration; it < stop; ++it) {
    std::mt19937 rng(cfg.seed * 0x9E3779B9u + static_cast<std::uint32_t>(it));
    const int t = ds.train_ids[rng() % ds.train_ids.size()];
    const int cam_id = static_cast<int>(rng() % static_cast<std::uint32_t>(ds.n_rig_cams()));

    const FrameContext ctx = build_frame_context(ds, m, false, t);
    const RenderedFrame rf = render_frame(ds, m, ctx, cam_id, cfg.jitter ? &rng : nullptr);

    const Tensor gt = ds.gt_image(false, t, cam_id);
    const Tensor gt_mask = mask_tensor(ds.gt_mask(false, t, cam_id), cfg.image_res, cfg.image_res);

    LossBreakdown bd;
    const ag::Var loss = total_loss(
        {loss_img(rf.image, gt, rf.maps.M, gt_mask), loss_vgg(ex, rf.image, gt),
         loss_sp(rf.maps.w), loss_off(rf.maps.O), loss_p(m.pal.p, m.pal.p_star())},
        {cfg.lambda1, cfg.lambda2, cfg.lambda3, cfg.lambda4, cfg.lambda5}, &bd);
    if (!std::isfinite(bd.total))
      throw std::runtime_error("non-finite total loss at iteration " + std::to_string(it) +
                               "; last-good checkpoint retained");

    adam.zero_grad(params);
    ag::backward(loss);
    adam.step(params, lr_at(cfg, it));

    csv << it << ',' << std::setprecision(9) << bd.img << ',' << bd.vgg << ',' << bd.sp << ','
        << bd.off << ',' << bd.p << ',' << bd.total << ',' << lr_at(cfg, it) << '\n';
    result.history.push_back(bd);
    ++result.iterations_run;

    const int done = it + 1;
    if (done % cfg.checkpoint_every == 0 || done == stop) {
      std::ostringstream name;
      name << out_dir << "/ckpt_" << std::setw(6) << std::setfill('0') << done;
      save_models(name.str() + ".gckp", m);
      write_sidecar(name.str() + ".txt", cfg, done, lr_at(cfg, it));
      result.last_checkpoint = name.str() + ".gckp";
      csv.flush();
    }
  }

  result.frozen_checksum_after = param_checksum(frozen);
  if (result.frozen_checksum_after != result.frozen_checksum_before)
    throw std::logic_error("frozen generator parameters changed during training");
  return result;
}

}  // namespace ganerf::train
