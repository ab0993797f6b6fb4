#pragma once

#include <string>
#include <vector>

#include "ganerf/core/config.hpp"
#include "ganerf/core/tensor.hpp"
#include "ganerf/data/camera.hpp"
#include "ganerf/data/render.hpp"
#include "ganerf/data/scene.hpp"
#include "ganerf/geometry/geometry.hpp"

namespace ganerf::data {

// On-disk multi-view dataset. Directory layout:
//   manifest                      rig/splits/seeds/mean colors
//   template/                     body template (manifest + raw arrays)
//   frames/<t>/<cam>.png          ground-truth image (cameras beyond the
//                                 rig are the unseen-view cameras)
//   frames/<t>/mask_<cam>.png     front mask
//   frames/<t>/seg_<cam>.png      segmentation labels (0/1/2)
//   frames/<t>/body.mesh, garment.mesh
//   um_frames/<t>/...             the held-out unseen-motion sequence
class Dataset {
 public:
  std::string root;
  RunConfig cfg;
  geom::BodyTemplate tmpl;
  CameraRig rig;
  std::vector<Camera> unseen_view_cams;
  geom::MotionSequence train_motion;
  geom::MotionSequence unseen_motion;
  std::vector<int> train_ids;    // frames used for optimization
  std::vector<int> heldout_ids;  // seen-motion evaluation frames
  geom::Vec3 mu_garment, mu_body;
  GarmentConfig garment_cfg;

  int n_rig_cams() const { return static_cast<int>(rig.cameras.size()); }
  int n_all_cams() const { return n_rig_cams() + static_cast<int>(unseen_view_cams.size()); }
  const Camera& camera(int cam_id) const;

  std::string frame_dir(bool unseen_motion_split, int t) const;
  Tensor gt_image(bool um, int t, int cam_id) const;
  std::vector<std::uint8_t> gt_mask(bool um, int t, int cam_id) const;
  std::vector<std::uint8_t> gt_seg(bool um, int t, int cam_id) const;

  const geom::MotionSequence& motion(bool um) const { return um ? unseen_motion : train_motion; }
  geom::Mesh posed_body(bool um, int t) const;
  geom::Mesh garment_mesh(bool um, int t) const;
  // newest-first per-frame root velocities ending at frame t
  std::vector<geom::Vec3> velocity_history(bool um, int t, int n) const;
};

Dataset build_dataset(const RunConfig& cfg, const std::string& out_dir);
Dataset load_dataset(const std::string& dir);

// scene constants shared by every subcommand
struct SceneLayout {
  float rig_radius = 2.4f;
  float cam_height = 1.0f;
  float look_height = 0.95f;
  int unseen_view_count = 4;
};

}  // namespace ganerf::data
