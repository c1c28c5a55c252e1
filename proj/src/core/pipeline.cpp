#include "pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <mutex>
#include <thread>

#include "error.hpp"
#include "text.hpp"

namespace footsim {

namespace fs = std::filesystem;

namespace {

void require_dir(const std::string& dir, const char* what) {
  if (dir.empty()) fail(ErrorKind::Config, std::string(what) + " is not set");
  if (!fs::is_directory(dir)) fail(ErrorKind::Config, std::string(what) + " '" + dir + "' does not exist");
}

void make_dir(const std::string& dir) {
  if (dir.empty()) fail(ErrorKind::Config, "output directory is not set");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorKind::Config, "cannot create output directory '" + dir + "'");
}

std::string mesh_file(const std::string& dir, Side s, const char* ext) {
  return (fs::path(dir) / (std::string("foot_") + side_name(s) + ext)).string();
}

void save_feet(const FootPair& feet, const std::string& dir, const std::vector<std::string>& header,
               std::vector<std::string>* files) {
  for (Side s : {Side::Right, Side::Left}) {
    const auto obj = mesh_file(dir, s, ".obj");
    const auto attr = mesh_file(dir, s, ".attr.csv");
    save_mesh(feet.mesh[static_cast<std::size_t>(s)], obj, attr, header);
    if (files) {
      files->push_back(obj);
      files->push_back(attr);
    }
  }
}

FootPair load_feet(const std::string& dir) {
  FootPair feet;
  for (Side s : {Side::Right, Side::Left}) {
    auto m = load_mesh(mesh_file(dir, s, ".obj"), mesh_file(dir, s, ".attr.csv"));
    if (m.side != s) fail(ErrorKind::Config, mesh_file(dir, s, ".obj") + " holds the wrong side");
    feet.mesh[static_cast<std::size_t>(s)] = std::move(m);
  }
  return feet;
}

// Input errors surface as config/input errors at the command boundary.
template <typename F>
auto as_input(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Numerical || e.kind() == ErrorKind::Config) throw;
    fail(ErrorKind::Config, what + ": " + e.what());
  }
}

}  // namespace

SkeletonModel configured_skeleton(const RunConfig& cfg) {
  if (cfg.skeleton_file.empty()) return default_skeleton();
  return as_input("skeleton", [&] { return load_skeleton(cfg.skeleton_file); });
}

FootPair configured_feet(const RunConfig& cfg, const std::string& mesh_dir) {
  if (!mesh_dir.empty()) {
    require_dir(mesh_dir, "mesh directory");
    return as_input("mesh", [&] { return load_feet(mesh_dir); });
  }
  FootPair feet;
  feet.mesh[0] = as_input("mesh", [&] { return configured_mesh(cfg); });
  feet.mesh[1] = mirror_foot(feet.mesh[0]);
  return feet;
}

GenMeshResult gen_mesh(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  require_dir(out_dir, "output directory");
  FootPair feet = configured_feet(cfg);
  GenMeshResult out;
  save_feet(feet, out_dir, {"config_hash " + cfg.hash(), "seed " + std::to_string(cfg.seed)}, &out.files);
  out.vertices = feet.mesh[0].vertices.size();
  out.triangles = feet.mesh[0].triangles.size();
  return out;
}

RetargetResult retarget(const RunConfig& cfg, const std::string& keypoints_path, const std::string& out_path) {
  cfg.validate();
  const fs::path out(out_path);
  if (out_path.empty()) fail(ErrorKind::Config, "output path is not set");
  if (out.has_parent_path() && !fs::is_directory(out.parent_path()))
    fail(ErrorKind::Config, "output directory '" + out.parent_path().string() + "' does not exist");
  KeypointSequence seq = as_input("keypoints", [&] { return load_keypoints(keypoints_path); });
  SkeletonModel model = configured_skeleton(cfg);
  RetargetResult res;
  res.input_frames = seq.frame_count();
  if (cfg.scale_skeleton) {
    ScaleResult scaled = as_input("keypoints", [&] { return scale_skeleton(model, seq); });
    model = std::move(scaled.model);
    res.scale_factors = scaled.factors;
  }
  TrajectorySolveStats stats;
  JointTrajectory raw = as_input("keypoints", [&] { return solve_trajectory(model, seq, cfg.ik, &stats); });
  JointTrajectory traj = resample_and_filter(raw, cfg.retarget_rate, cfg.filter_cutoff, &model);
  res.output_frames = traj.frame_count();
  res.max_site_residual = stats.max_site_residual;
  res.unconverged_frames = stats.unconverged_frames;
  std::vector<std::string> header{
      "config_hash " + cfg.hash(),
      "lambda " + text::fmt(cfg.ik.lambda),
      "source_rate_hz " + text::fmt(seq.rate),
      "cutoff_hz " + text::fmt(cfg.filter_cutoff),
      "max_site_residual_m " + text::fmt(stats.max_site_residual),
      "unconverged_frames " + std::to_string(stats.unconverged_frames),
  };
  if (cfg.scale_skeleton) {
    res.skeleton_file = out_path + ".skeleton.cfg";
    text::write_file(res.skeleton_file, "# config_hash " + cfg.hash() + "\n" + skeleton_to_text(model));
    header.push_back("skeleton " + fs::path(res.skeleton_file).filename().string());
  }
  text::write_file(out_path, trajectory_to_csv(model, traj, header));
  return res;
}

SkeletonModel trajectory_skeleton(const RunConfig& cfg, const std::string& trajectory_path) {
  if (!cfg.skeleton_file.empty()) return configured_skeleton(cfg);
  const std::string sidecar = trajectory_path + ".skeleton.cfg";
  if (fs::exists(sidecar)) return as_input("skeleton", [&] { return load_skeleton(sidecar); });
  return default_skeleton();
}

std::vector<SimulateRun> simulate(const RunConfig& cfg, const std::string& trajectory_path, const std::string& out_dir,
                                  const SimulateOptions& options) {
  cfg.validate();
  if (options.models.empty()) fail(ErrorKind::Config, "no foot model selected");
  make_dir(out_dir);
  const SkeletonModel model = trajectory_skeleton(cfg, trajectory_path);
  const JointTrajectory traj = as_input("trajectory", [&] { return load_trajectory(model, trajectory_path); });
  const FootPair feet = configured_feet(cfg, options.mesh_dir);
  const std::string hash = cfg.hash();

  std::vector<SimulateRun> runs(options.models.size());
  std::vector<std::exception_ptr> errors(options.models.size());
  std::mutex info_mutex;
  auto say = [&](const std::string& line) {
    if (!options.info) return;
    std::lock_guard<std::mutex> lock(info_mutex);
    options.info(line);
  };

  auto run_one = [&](std::size_t i) {
    try {
      PlaybackConfig pc = cfg.playback;
      pc.model = options.models[i];
      SimulateRun& run = runs[i];
      run.model = pc.model;
      run.dir = (fs::path(out_dir) / foot_model_name(pc.model)).string();
      const auto t0 = std::chrono::steady_clock::now();
      PlaybackHooks hooks;
      hooks.should_stop = [&, t0](long) {
        if (options.stop && options.stop->load(std::memory_order_relaxed)) return true;
        if (options.time_limit > 0) {
          const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
          if (dt.count() > options.time_limit) return true;
        }
        return false;
      };
      PlaybackLog log = run_playback(model, traj, feet, pc, hooks);
      run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      run.steps_planned = log.steps_planned;
      run.steps_completed = log.steps_completed;
      run.truncated = log.truncated;
      run.failure = log.failure;
      run.failed_step = log.failed_step;
      LogHeader header{hash,
                       {"model " + std::string(foot_model_name(pc.model)), "sim_rate_hz " + text::fmt(pc.sim_rate),
                        "trajectory " + fs::path(trajectory_path).filename().string()}};
      save_playback_log(run.dir, model, feet, log, header);
      text::write_file((fs::path(run.dir) / "skeleton.cfg").string(),
                       "# config_hash " + hash + "\n" + skeleton_to_text(model));
      save_feet(feet, run.dir, {"config_hash " + hash}, nullptr);
      if (log.truncated) say(std::string(foot_model_name(pc.model)) + ": " + completion_marker(log));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, cfg.jobs)), runs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < runs.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < runs.size(); i = next++) run_one(i);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return runs;
}

AnalyzeResult analyze(const RunConfig& cfg, const std::string& log_dir, const std::string& out_dir, bool svg,
                      const std::string& mesh_dir) {
  cfg.validate();
  require_dir(log_dir, "log directory");
  const fs::path base(log_dir);
  SkeletonModel model = fs::exists(base / "skeleton.cfg")
                            ? as_input("skeleton", [&] { return load_skeleton((base / "skeleton.cfg").string()); })
                            : configured_skeleton(cfg);
  FootPair feet = !mesh_dir.empty() ? configured_feet(cfg, mesh_dir)
                  : fs::exists(base / "foot_right.obj") ? as_input("mesh", [&] { return load_feet(log_dir); })
                                                        : configured_feet(cfg);
  LoadedLog loaded = as_input("log", [&] { return load_playback_log(log_dir, model); });
  PlaybackConfig pc = cfg.playback;
  pc.model = loaded.log.model;
  AnalysisProducts products = analyze_playback(model, feet, pc, loaded.log, cfg.analysis);
  products.report.config_hash = cfg.hash();
  make_dir(out_dir);
  ReportContext ctx{cfg.hash(), loaded.config_hash, log_dir};
  write_analysis(out_dir, products, feet, loaded.log, cfg.analysis, ctx, svg);
  return {products.report, (fs::path(out_dir) / "report.json").string()};
}

CompareResult compare(const RunConfig& cfg, const std::string& deformable_dir, const std::string& rigid_dir,
                      const std::string& out_dir, bool svg, const std::string& mesh_dir) {
  make_dir(out_dir);
  CompareResult out;
  auto d = analyze(cfg, deformable_dir, (fs::path(out_dir) / "deformable").string(), svg, mesh_dir);
  auto r = analyze(cfg, rigid_dir, (fs::path(out_dir) / "rigid").string(), svg, mesh_dir);
  if (d.report.model != "deformable" || r.report.model != "rigid")
    fail(ErrorKind::Config, "compare expects a deformable log and a rigid log, got " + d.report.model + " and " +
                                r.report.model);
  out.deformable = d.report;
  out.rigid = r.report;
  out.compare_path = (fs::path(out_dir) / "compare.json").string();
  text::write_file(out.compare_path, compare_to_json(out.deformable, out.rigid, cfg.hash()));
  if (svg) {
    text::write_file((fs::path(out_dir) / "regional_compare.svg").string(),
                     regional_svg({{"deformable right", &out.deformable.feet[0].regional},
                                   {"rigid right", &out.rigid.feet[0].regional}},
                                  cfg.hash()));
  }
  return out;
}

}  // namespace footsim
