#pragma once

#include <string>
#include <vector>

#include "ganerf/eval/metrics.hpp"
#include "ganerf/train/pipeline.hpp"

namespace ganerf::eval {

struct MetricRow {
  std::string split, method, metric;
  float value = 0;
  bool failed = false;
};

struct MetricReport {
  std::vector<MetricRow> rows;
  std::uint64_t config_hash = 0;
  std::uint32_t seed = 0;
  int iteration = 0;
  void write_csv(const std::string& path) const;
  void write_summary(const std::string& path) const;
};

struct EvalOptions {
  int max_frames_per_split = 12;
  int unseen_view_cam = 0;  // index into the dataset's unseen-view cameras
  bool include_tof = true;
};

// clamped-to-[0,1] composited render of one frame (eval mode, no jitter)
Tensor render_eval_image(const data::Dataset& ds, const train::Models& m, bool um, int t,
                         int cam_id);

// mean of the ground-truth training images at one camera; the
// checkpoint-free temporal baseline
Tensor temporal_mean_image(const data::Dataset& ds, int cam_id);

// Renders every (frame, camera) of each split, computes PSNR / SSIM /
// perceptual / tOF against ground truth, and adds the nearest-view and
// temporal-mean baseline rows.
MetricReport evaluate(const data::Dataset& ds, const train::Models& m,
                      const EvalOptions& opts = {});

struct AblateOptions {
  int train_iterations = 25;
  int pretrain_iterations = 40;
  int eval_frames = 4;
  std::vector<int> view_counts = {2, 4, 8, 16};
  std::vector<int> k_values = {0, 1, 2};
};

// The three sweeps (feature toggles, camera count, history length); each
// cell trains a small run from scratch. Failures are isolated per row.
MetricReport ablate(const RunConfig& base, const std::string& work_dir,
                    const AblateOptions& opts = {});

}  // namespace ganerf::eval
