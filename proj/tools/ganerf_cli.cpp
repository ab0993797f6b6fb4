#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "ganerf/data/image_io.hpp"
#include "ganerf/eval/evaluate.hpp"
#include "ganerf/train/training.hpp"

namespace fs = std::filesystem;
using namespace ganerf;

namespace {

struct FrameRange {
  int first = 0, last = 0;
};

FrameRange parse_frames(const std::string& s) {
  const auto pos = s.find("..");
  FrameRange r;
  if (pos == std::string::npos) {
    r.first = r.last = std::stoi(s);
  } else {
    r.first = std::stoi(s.substr(0, pos));
    r.last = std::stoi(s.substr(pos + 2));
  }
  if (r.last < r.first) throw std::invalid_argument("empty frame range " + s);
  return r;
}

geom::Vec3 parse_color(const std::string& s) {
  int r, g, b;
  if (std::sscanf(s.c_str(), "%d,%d,%d", &r, &g, &b) != 3)
    throw std::invalid_argument("expected R,G,B color, got " + s);
  auto conv = [](int v) {
    if (v < 0 || v > 255) throw std::invalid_argument("color component out of [0,255]");
    return static_cast<float>(v) / 255.0f;
  };
  return {conv(r), conv(g), conv(b)};
}

// the dataset on disk defines the scene; the run config may only change
// non-data keys
void adopt_config(data::Dataset& ds, const RunConfig& cfg) {
  const RunConfig& d = ds.cfg;
  if (cfg.image_res != d.image_res || cfg.uv_res != d.uv_res || cfg.cameras != d.cameras ||
      cfg.train_frames != d.train_frames || cfg.motion_seed != d.motion_seed ||
      cfg.unseen_motion_seed != d.unseen_motion_seed || cfg.feature_res != d.feature_res)
    throw std::invalid_argument("config scene keys disagree with the dataset manifest");
  ds.cfg = cfg;
}

train::Models load_run(const std::string& ckpt, data::Dataset& ds) {
  train::Models m(ds.cfg, ds, ds.cfg.seed);
  train::load_models(ckpt, m);
  return m;
}

int cmd_gen_data(const std::string& config, const std::string& out) {
  const RunConfig cfg = RunConfig::from_file(config);
  data::build_dataset(cfg, out);
  std::cerr << "dataset written to " << out << "\n";
  return 0;
}

int cmd_pretrain(const std::string& config, const std::string& data_dir, const std::string& out,
                 int iterations) {
  const RunConfig cfg = RunConfig::from_file(config);
  data::Dataset ds = data::load_dataset(data_dir);
  adopt_config(ds, cfg);
  std::mt19937 rng(cfg.seed);
  gen::ImageGenerator g(cfg, rng);
  gen::NeuralTexture tex(cfg.neural_texture_channels, cfg.neural_texture_res, rng);
  const int iters = iterations > 0 ? iterations : cfg.pretrain_iterations;
  const gen::PretrainStats st = gen::pretrain_generator(ds, g, tex, iters, cfg.seed + 5);
  gen::save_generator(out, g, tex);
  std::cerr << "generator pre-training: " << st.steps << " steps, loss " << st.first_loss
            << " -> " << st.last_loss << "\n";
  return 0;
}

int cmd_train(const std::string& config, const std::string& data_dir, const std::string& gimg,
              const std::string& out, const std::string& resume, int start_iter) {
  const RunConfig cfg = RunConfig::from_file(config);
  data::Dataset ds = data::load_dataset(data_dir);
  adopt_config(ds, cfg);
  train::Models m(cfg, ds, cfg.seed);
  if (!resume.empty())
    train::load_models(resume, m);
  else
    gen::load_generator(gimg, m.gimg, m.texture);
  const train::TrainResult res = train::train(ds, m, out, start_iter);
  std::cerr << "trained " << res.iterations_run << " iterations; last checkpoint "
            << res.last_checkpoint << "\n";
  return 0;
}

int cmd_render(const std::string& ckpt, const std::string& data_dir, const std::string& frames,
               int camera, const std::string& out, bool um) {
  data::Dataset ds = data::load_dataset(data_dir);
  const train::Models m = load_run(ckpt, ds);
  const FrameRange r = parse_frames(frames);
  fs::create_directories(out);
  for (int t = r.first; t <= r.last; ++t) {
    const Tensor img = eval::render_eval_image(ds, m, um, t, camera);
    char name[64];
    std::snprintf(name, sizeof(name), "/frame_%04d.png", t);
    data::save_png_rgb(out + name, img);
  }
  return 0;
}

int cmd_recolor(const std::string& ckpt, const std::string& data_dir, const std::string& frames,
                int camera, const std::string& color, const std::string& out) {
  data::Dataset ds = data::load_dataset(data_dir);
  const train::Models m = load_run(ckpt, ds);
  const geom::Vec3 new_pG = parse_color(color);
  const FrameRange r = parse_frames(frames);
  fs::create_directories(out);
  for (int t = r.first; t <= r.last; ++t) {
    const train::FrameContext ctx = train::build_frame_context(ds, m, false, t);
    const train::RenderedFrame rf = train::render_frame(ds, m, ctx, camera, nullptr);
    Tensor img = palette::recolor(rf.maps, m.pal.p, new_pG);
    for (float& v : img.data) v = std::min(std::max(v, 0.0f), 1.0f);
    char name[64];
    std::snprintf(name, sizeof(name), "/frame_%04d.png", t);
    data::save_png_rgb(out + name, img);
  }
  return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& dataset, const std::string& out) {
  data::Dataset ds = data::load_dataset(dataset);
  const train::Models m = load_run(ckpt, ds);
  const eval::MetricReport rep = eval::evaluate(ds, m);
  fs::create_directories(out);
  rep.write_csv(out + "/metrics.csv");
  rep.write_summary(out + "/summary.txt");
  std::cerr << "report written to " << out << "\n";
  return 0;
}

int cmd_ablate(const std::string& config, const std::string& out, int iterations) {
  const RunConfig cfg = RunConfig::from_file(config);
  eval::AblateOptions opts;
  if (iterations > 0) opts.train_iterations = iterations;
  const eval::MetricReport rep = eval::ablate(cfg, out, opts);
  rep.write_csv(out + "/ablation.csv");
  rep.write_summary(out + "/ablation_summary.txt");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"body-motion-driven garment animation with palette recoloring"};
  app.require_subcommand(1);

  std::string config, data_dir, out, ckpt, gimg, resume, frames = "0..0", color = "255,0,0",
                                                         dataset;
  int iterations = 0, camera = 0, start_iter = 0;
  bool um = false;

  auto* gen_data = app.add_subcommand("gen-data", "generate the synthetic dataset");
  gen_data->add_option("--config", config)->required();
  gen_data->add_option("--out", out)->required();

  auto* pretrain = app.add_subcommand("pretrain-generator", "pre-train the image generator");
  pretrain->add_option("--config", config)->required();
  pretrain->add_option("--data", data_dir)->required();
  pretrain->add_option("--out", out)->required();
  pretrain->add_option("--iterations", iterations);

  auto* train_cmd = app.add_subcommand("train", "joint training");
  train_cmd->add_option("--config", config)->required();
  train_cmd->add_option("--data", data_dir)->required();
  train_cmd->add_option("--gimg", gimg);
  train_cmd->add_option("--out", out)->required();
  train_cmd->add_option("--resume", resume);
  train_cmd->add_option("--start-iter", start_iter);

  auto* render = app.add_subcommand("render", "render frames from a checkpoint");
  render->add_option("--ckpt", ckpt)->required();
  render->add_option("--data", data_dir)->required();
  render->add_option("--frames", frames)->required();
  render->add_option("--camera", camera)->required();
  render->add_option("--out", out)->required();
  render->add_flag("--unseen-motion", um);

  auto* recolor = app.add_subcommand("recolor", "recolor the garment");
  recolor->add_option("--ckpt", ckpt)->required();
  recolor->add_option("--data", data_dir)->required();
  recolor->add_option("--frames", frames)->required();
  recolor->add_option("--camera", camera)->required();
  recolor->add_option("--garment-color", color)->required();
  recolor->add_option("--out", out)->required();

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--ckpt", ckpt)->required();
  eval_cmd->add_option("--dataset", dataset)->required();
  eval_cmd->add_option("--out", out)->required();

  auto* ablate = app.add_subcommand("ablate", "run the ablation sweeps");
  ablate->add_option("--config", config)->required();
  ablate->add_option("--out", out)->required();
  ablate->add_option("--iterations", iterations);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (gen_data->parsed()) return cmd_gen_data(config, out);
    if (pretrain->parsed()) return cmd_pretrain(config, data_dir, out, iterations);
    if (train_cmd->parsed()) {
      if (resume.empty() && gimg.empty())
        throw std::invalid_argument("train needs either --gimg or --resume");
      return cmd_train(config, data_dir, gimg, out, resume, start_iter);
    }
    if (render->parsed()) return cmd_render(ckpt, data_dir, frames, camera, out, um);
    if (recolor->parsed()) return cmd_recolor(ckpt, data_dir, frames, camera, color, out);
    if (eval_cmd->parsed()) return cmd_eval(ckpt, dataset, out);
    if (ablate->parsed()) return cmd_ablate(config, out, iterations);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
