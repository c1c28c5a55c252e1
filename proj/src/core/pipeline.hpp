#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <vector>

#include "config.hpp"
#include "logs.hpp"
#include "report.hpp"

namespace footsim {

// Skeleton named by skeleton.file, or the built-in one.
SkeletonModel configured_skeleton(const RunConfig& cfg);
// Right mesh from the config and its mirror, or both loaded from a gen-mesh
// output directory when `mesh_dir` is set.
FootPair configured_feet(const RunConfig& cfg, const std::string& mesh_dir = {});

struct GenMeshResult {
  std::vector<std::string> files;
  std::size_t vertices = 0;
  std::size_t triangles = 0;
};
// Writes foot_right.obj, foot_right.attr.csv, foot_left.obj, foot_left.attr.csv
// into an existing directory.
GenMeshResult gen_mesh(const RunConfig& cfg, const std::string& out_dir);

struct RetargetResult {
  std::size_t input_frames = 0;
  std::size_t output_frames = 0;
  double max_site_residual = 0.0;
  int unconverged_frames = 0;
  std::vector<double> scale_factors;
  std::string skeleton_file;  // scaled skeleton written next to the trajectory, if any
};
// Keypoint CSV to trajectory CSV at retarget.rate. With retarget.scale the
// scaled skeleton is written to "<out>.skeleton.cfg".
RetargetResult retarget(const RunConfig& cfg, const std::string& keypoints_path, const std::string& out_path);

// Skeleton for a trajectory: skeleton.file if set, else the sidecar written
// by retarget if present, else the built-in skeleton.
SkeletonModel trajectory_skeleton(const RunConfig& cfg, const std::string& trajectory_path);

struct SimulateOptions {
  std::vector<FootModel> models{FootModel::Deformable};
  std::string mesh_dir;
  double time_limit = 0.0;                       // s of wall time per run; <= 0 disables
  const std::atomic<bool>* stop = nullptr;       // external interrupt
  std::function<void(const std::string&)> info;  // progress lines
};

struct SimulateRun {
  FootModel model = FootModel::Deformable;
  std::string dir;
  long steps_planned = 0;
  long steps_completed = 0;
  bool truncated = false;
  std::string failure;
  long failed_step = -1;
  double wall_seconds = 0.0;
};
// One log directory per model under out_dir, run on up to cfg.jobs threads.
std::vector<SimulateRun> simulate(const RunConfig& cfg, const std::string& trajectory_path, const std::string& out_dir,
                                  const SimulateOptions& options = {});

struct AnalyzeResult {
  GaitReport report;
  std::string report_path;
};
AnalyzeResult analyze(const RunConfig& cfg, const std::string& log_dir, const std::string& out_dir, bool svg,
                      const std::string& mesh_dir = {});

struct CompareResult {
  GaitReport deformable;
  GaitReport rigid;
  std::string compare_path;
};
// Analyzes both log directories into out_dir/deformable and out_dir/rigid and
// writes out_dir/compare.json.
CompareResult compare(const RunConfig& cfg, const std::string& deformable_dir, const std::string& rigid_dir,
                      const std::string& out_dir, bool svg, const std::string& mesh_dir = {});

}  // namespace footsim
