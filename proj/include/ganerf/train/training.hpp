#pragma once

#include <string>
#include <vector>

#include "ganerf/train/losses.hpp"
#include "ganerf/train/pipeline.hpp"

namespace ganerf::train {

// learning rate at iteration `it` of a `total`-iteration run:
// lr_start * (lr_end / lr_start)^f, exponential in the run fraction f
float lr_at(const RunConfig& cfg, int it);

struct TrainResult {
  int iterations_run = 0;
  std::vector<LossBreakdown> history;  // one entry per iteration run here
  std::string last_checkpoint;
  std::uint64_t frozen_checksum_before = 0, frozen_checksum_after = 0;
};

// Joint optimization of E, G_en, M_NeRF, M_D and p with the generator
// frozen. Appends to <out_dir>/metrics.csv, writes periodic checkpoints
// with a text sidecar. Deterministic given (config, seed, start
// iteration): frame/camera sampling is stateless per iteration, so a
// resumed run draws the same sequence as the continuous run (optimizer
// moments restart at the resume point).
TrainResult train(const data::Dataset& ds, Models& m, const std::string& out_dir,
                  int start_iteration = 0, int max_iterations = -1);

}  // namespace ganerf::train
