#include <CLI11.hpp>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "footsim/footsim.h"

namespace {

struct CfgHandle {
  fsim_config* p = nullptr;
  ~CfgHandle() { fsim_config_free(p); }
};

bool g_quiet = false;

void log_line(const char* line, void*) {
  if (!g_quiet) std::fprintf(stderr, "%s\n", line);
}

void on_signal(int) { fsim_request_stop(); }

int report(fsim_status s, const char* what) {
  if (s != FSIM_OK) std::fprintf(stderr, "footsim %s: %s: %s\n", what, fsim_status_name(s), fsim_last_error());
  return fsim_exit_code(s);
}

struct Common {
  std::string config_path;
  std::vector<std::string> settings;
  long long seed = -1;
  int jobs = 0;
};

// Defaults, then the config file, then --set, then dedicated flags.
fsim_status build_config(const Common& c, const std::vector<std::pair<std::string, std::string>>& flags,
                         CfgHandle& cfg) {
  fsim_status s = fsim_config_new(&cfg.p);
  if (s != FSIM_OK) return s;
  std::string path = c.config_path;
  if (path.empty()) {
    const char* env = std::getenv(fsim_config_env());
    if (env) path = env;
  }
  if (!path.empty() && (s = fsim_config_load(cfg.p, path.c_str())) != FSIM_OK) return s;
  for (const auto& kv : c.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "footsim: --set expects key=value, got '%s'\n", kv.c_str());
      return FSIM_ERR_CONFIG;
    }
    auto trim = [](std::string x) {
      const auto a = x.find_first_not_of(" \t");
      const auto b = x.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : x.substr(a, b - a + 1);
    };
    if ((s = fsim_config_set(cfg.p, trim(kv.substr(0, eq)).c_str(), trim(kv.substr(eq + 1)).c_str())) != FSIM_OK)
      return s;
  }
  if (c.seed >= 0 && (s = fsim_config_set(cfg.p, "seed", std::to_string(c.seed).c_str())) != FSIM_OK) return s;
  if (c.jobs > 0 && (s = fsim_config_set(cfg.p, "run.jobs", std::to_string(c.jobs).c_str())) != FSIM_OK) return s;
  for (const auto& [k, v] : flags)
    if ((s = fsim_config_set(cfg.p, k.c_str(), v.c_str())) != FSIM_OK) return s;
  return fsim_config_validate(cfg.p);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deformable foot-ground contact simulation and gait analysis"};
  app.require_subcommand(1);
  Common common;
  app.add_option("-c,--config", common.config_path,
                 std::string("Config file (default: $") + fsim_config_env() + ")");
  app.add_option("--set", common.settings, "Override a config key, key=value (repeatable)");
  app.add_option("--seed", common.seed, "Random seed");
  app.add_flag("-q,--quiet", g_quiet, "Suppress progress output");

  auto* gen = app.add_subcommand("gen-mesh", "Generate the right and left foot meshes");
  std::string gen_out;
  gen->add_option("-o,--out", gen_out, "Existing output directory")->required();

  auto* ret = app.add_subcommand("retarget", "Retarget a keypoint CSV to a joint trajectory");
  std::string ret_in, ret_out, lambda;
  ret->add_option("-i,--keypoints", ret_in, "Keypoint CSV")->required();
  ret->add_option("-o,--out", ret_out, "Trajectory CSV to write")->required();
  ret->add_option("--lambda", lambda, "Damping of the least-squares solve");

  auto* sim = app.add_subcommand("simulate", "Play a trajectory back on one or both foot models");
  std::string sim_traj, sim_out, sim_mesh;
  std::vector<std::string> sim_models;
  double time_limit = 0.0;
  sim->add_option("-t,--trajectory", sim_traj, "Trajectory CSV")->required();
  sim->add_option("-o,--out", sim_out, "Output directory; one subdirectory per model")->required();
  sim->add_option("-m,--model", sim_models, "deformable, rigid or both (repeatable)")
      ->check(CLI::IsMember({"deformable", "rigid", "both"}));
  sim->add_option("--mesh-dir", sim_mesh, "Load meshes written by gen-mesh");
  sim->add_option("--time-limit", time_limit, "Wall-clock limit per run in seconds; logs are truncated");
  sim->add_option("-j,--jobs", common.jobs, "Parallel runs")->check(CLI::PositiveNumber);

  auto* ana = app.add_subcommand("analyze", "Compute the gait report of one log directory");
  std::string ana_log, ana_out, ana_mesh;
  bool ana_svg = false;
  ana->add_option("-l,--log", ana_log, "Log directory written by simulate")->required();
  ana->add_option("-o,--out", ana_out, "Report directory")->required();
  ana->add_option("--mesh-dir", ana_mesh, "Meshes to use instead of the ones stored with the log");
  ana->add_flag("--svg", ana_svg, "Also write heatmap and curve figures");

  auto* cmp = app.add_subcommand("compare", "Analyze a deformable and a rigid run side by side");
  std::string cmp_def, cmp_rig, cmp_out, cmp_mesh;
  bool cmp_svg = false;
  cmp->add_option("--deformable", cmp_def, "Deformable log directory")->required();
  cmp->add_option("--rigid", cmp_rig, "Rigid log directory")->required();
  cmp->add_option("-o,--out", cmp_out, "Output directory")->required();
  cmp->add_option("--mesh-dir", cmp_mesh, "Meshes to use instead of the ones stored with the logs");
  cmp->add_flag("--svg", cmp_svg, "Also write heatmap and curve figures");

  auto* show = app.add_subcommand("show-config", "Print the effective configuration and its hash");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  fsim_set_log(log_line, nullptr);
  std::vector<std::pair<std::string, std::string>> flags;
  if (!lambda.empty()) flags.emplace_back("retarget.lambda", lambda);
  CfgHandle cfg;
  if (fsim_status s = build_config(common, flags, cfg); s != FSIM_OK) return report(s, "config");

  if (*show) {
    const char* text = nullptr;
    const char* hash = nullptr;
    if (fsim_status s = fsim_config_canonical(cfg.p, &text); s != FSIM_OK) return report(s, "show-config");
    std::fputs(text, stdout);
    if (fsim_status s = fsim_config_hash(cfg.p, &hash); s != FSIM_OK) return report(s, "show-config");
    std::printf("# config_hash %s\n", hash);
    return 0;
  }
  if (*gen) {
    size_t v = 0, t = 0;
    fsim_status s = fsim_gen_mesh(cfg.p, gen_out.c_str(), &v, &t);
    if (s == FSIM_OK && !g_quiet) std::fprintf(stderr, "mesh: %zu vertices, %zu triangles\n", v, t);
    return report(s, "gen-mesh");
  }
  if (*ret) {
    fsim_retarget_info info{};
    return report(fsim_retarget(cfg.p, ret_in.c_str(), ret_out.c_str(), &info), "retarget");
  }
  if (*sim) {
    std::vector<fsim_model> models;
    if (sim_models.empty()) sim_models.push_back("deformable");
    for (const auto& m : sim_models) {
      if (m == "deformable" || m == "both") models.push_back(FSIM_MODEL_DEFORMABLE);
      if (m == "rigid" || m == "both") models.push_back(FSIM_MODEL_RIGID);
    }
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::vector<fsim_run_info> infos(models.size());
    fsim_status s = fsim_simulate(cfg.p, sim_traj.c_str(), sim_out.c_str(), models.data(), models.size(),
                                  sim_mesh.empty() ? nullptr : sim_mesh.c_str(), time_limit, infos.data());
    std::signal(SIGINT, SIG_DFL);
    std::signal(SIGTERM, SIG_DFL);
    if (s == FSIM_OK || s == FSIM_ERR_NUMERICAL) {
      for (const auto& i : infos)
        if (!g_quiet)
          std::fprintf(stderr, "%s: %ld/%ld steps in %.2f s%s\n", i.model == FSIM_MODEL_RIGID ? "rigid" : "deformable",
                       i.steps_completed, i.steps_planned, i.wall_seconds, i.truncated ? " (truncated)" : "");
    }
    return report(s, "simulate");
  }
  if (*ana) {
    fsim_report_summary sum{};
    fsim_status s = fsim_analyze(cfg.p, ana_log.c_str(), ana_out.c_str(), ana_svg ? 1 : 0,
                                 ana_mesh.empty() ? nullptr : ana_mesh.c_str(), &sum);
    if (s == FSIM_OK && !g_quiet)
      std::fprintf(stderr, "peak GRF %.1f N, %.1f contact points per stance, speed CV %.4f\n", sum.peak_grf,
                   sum.contact_points, sum.speed_cv);
    return report(s, "analyze");
  }
  if (*cmp) {
    fsim_report_summary d{}, r{};
    fsim_status s = fsim_compare(cfg.p, cmp_def.c_str(), cmp_rig.c_str(), cmp_out.c_str(), cmp_svg ? 1 : 0,
                                 cmp_mesh.empty() ? nullptr : cmp_mesh.c_str(), &d, &r);
    if (s == FSIM_OK && !g_quiet) {
      std::fprintf(stderr, "%-12s %10s %10s\n", "", "deformable", "rigid");
      std::fprintf(stderr, "%-12s %10.1f %10.1f\n", "peak GRF N", d.peak_grf, r.peak_grf);
      std::fprintf(stderr, "%-12s %10.1f %10.1f\n", "contacts", d.contact_points, r.contact_points);
      std::fprintf(stderr, "%-12s %10.4f %10.4f\n", "speed CV", d.speed_cv, r.speed_cv);
      std::fprintf(stderr, "%-12s %10.2f %10.2f\n", "KE mean J", d.kinetic_mean, r.kinetic_mean);
    }
    return report(s, "compare");
  }
  return 2;
}
