#include "footsim/footsim.h"

#include <atomic>
#include <mutex>
#include <new>
#include <string>

#include "error.hpp"
#include "flex_dynamics.hpp"
#include "pipeline.hpp"

using namespace footsim;

struct fsim_config {
  RunConfig cfg;
  std::string scratch;
};

struct fsim_mesh {
  FootMesh mesh;
};

namespace {

thread_local std::string g_error;
std::atomic<bool> g_stop{false};
std::mutex g_log_mutex;
fsim_log_fn g_log_fn = nullptr;
void* g_log_user = nullptr;

fsim_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return FSIM_ERR_INVALID_ARGUMENT;
    case ErrorKind::Parse: return FSIM_ERR_PARSE;
    case ErrorKind::Io: return FSIM_ERR_IO;
    case ErrorKind::Config: return FSIM_ERR_CONFIG;
    case ErrorKind::Numerical: return FSIM_ERR_NUMERICAL;
  }
  return FSIM_ERR_INTERNAL;
}

fsim_status set_error(fsim_status s, const std::string& what) {
  g_error = what;
  return s;
}

template <typename F>
fsim_status guard(F&& f) {
  try {
    g_error.clear();
    return f();
  } catch (const Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FSIM_ERR_INTERNAL, e.what());
  }
}

#define FSIM_REQUIRE(cond, what) \
  if (!(cond)) return set_error(FSIM_ERR_INVALID_ARGUMENT, what)

void emit(const std::string& line) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  if (g_log_fn) g_log_fn(line.c_str(), g_log_user);
}

std::string str(const char* s) { return s ? std::string(s) : std::string(); }

void fill_summary(const GaitReport& r, fsim_report_summary* s) {
  if (!s) return;
  *s = {};
  s->peak_grf = r.peak_grf;
  double sum = 0.0;
  int n = 0;
  for (const auto& f : r.feet)
    for (int c : f.contact_counts) {
      sum += c;
      ++n;
      s->contact_points_max = std::max(s->contact_points_max, c);
    }
  s->contact_points = n ? sum / n : 0.0;
  s->speed_cv = r.speed.cv;
  s->accel_cv = r.accel.cv;
  s->kinetic_mean = r.kinetic.mean;
  s->potential_mean = r.potential.mean;
  s->zmp_inside_fraction = r.zmp_supported_frames ? static_cast<double>(r.zmp_inside_frames) / r.zmp_supported_frames : 0.0;
  s->cycles = static_cast<int>(r.feet[0].segmentation.cycles.size());
  s->truncated = r.truncated ? 1 : 0;
}

}  // namespace

extern "C" {

const char* fsim_version(void) { return "0.1.0"; }
const char* fsim_last_error(void) { return g_error.c_str(); }

const char* fsim_status_name(fsim_status s) {
  switch (s) {
    case FSIM_OK: return "ok";
    case FSIM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FSIM_ERR_PARSE: return "parse error";
    case FSIM_ERR_IO: return "i/o error";
    case FSIM_ERR_CONFIG: return "config error";
    case FSIM_ERR_NUMERICAL: return "numerical failure";
    case FSIM_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

int fsim_exit_code(fsim_status s) {
  if (s == FSIM_OK) return 0;
  if (s == FSIM_ERR_NUMERICAL) return 3;
  return 2;
}

void fsim_set_log(fsim_log_fn fn, void* user) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  g_log_fn = fn;
  g_log_user = user;
}

void fsim_request_stop(void) { g_stop.store(true, std::memory_order_relaxed); }
void fsim_clear_stop(void) { g_stop.store(false, std::memory_order_relaxed); }

const char* fsim_config_env(void) { return kConfigEnv; }

fsim_status fsim_config_new(fsim_config** out) {
  FSIM_REQUIRE(out, "null output handle");
  return guard([&] {
    *out = new fsim_config();
    return FSIM_OK;
  });
}

void fsim_config_free(fsim_config* cfg) { delete cfg; }

fsim_status fsim_config_load(fsim_config* cfg, const char* path) {
  FSIM_REQUIRE(cfg && path, "null argument");
  return guard([&] {
    cfg->cfg = load_config(path, cfg->cfg);
    return FSIM_OK;
  });
}

fsim_status fsim_config_parse(fsim_config* cfg, const char* text, const char* source) {
  FSIM_REQUIRE(cfg && text, "null argument");
  return guard([&] {
    cfg->cfg = parse_config(text, source ? source : "config", cfg->cfg);
    return FSIM_OK;
  });
}

fsim_status fsim_config_set(fsim_config* cfg, const char* key, const char* value) {
  FSIM_REQUIRE(cfg && key && value, "null argument");
  return guard([&] {
    apply_setting(cfg->cfg, key, value);
    return FSIM_OK;
  });
}

fsim_status fsim_config_get(fsim_config* cfg, const char* key, const char** value) {
  FSIM_REQUIRE(cfg && key && value, "null argument");
  return guard([&] {
    cfg->scratch = get_setting(cfg->cfg, key);
    *value = cfg->scratch.c_str();
    return FSIM_OK;
  });
}

fsim_status fsim_config_canonical(fsim_config* cfg, const char** text) {
  FSIM_REQUIRE(cfg && text, "null argument");
  return guard([&] {
    cfg->scratch = cfg->cfg.canonical_text(true);
    *text = cfg->scratch.c_str();
    return FSIM_OK;
  });
}

fsim_status fsim_config_hash(fsim_config* cfg, const char** hash) {
  FSIM_REQUIRE(cfg && hash, "null argument");
  return guard([&] {
    cfg->scratch = cfg->cfg.hash();
    *hash = cfg->scratch.c_str();
    return FSIM_OK;
  });
}

fsim_status fsim_config_validate(const fsim_config* cfg) {
  FSIM_REQUIRE(cfg, "null argument");
  return guard([&] {
    cfg->cfg.validate();
    return FSIM_OK;
  });
}

size_t fsim_config_key_count(void) { return config_keys().size(); }

const char* fsim_config_key(size_t index) {
  static const std::vector<std::string> keys = config_keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

fsim_status fsim_mesh_generate(const fsim_config* cfg, fsim_side side, fsim_mesh** out) {
  FSIM_REQUIRE(cfg && out, "null argument");
  return guard([&] {
    cfg->cfg.validate();
    FootMesh m = configured_mesh(cfg->cfg);
    if (side == FSIM_SIDE_LEFT) m = mirror_foot(m);
    *out = new fsim_mesh{std::move(m)};
    return FSIM_OK;
  });
}

fsim_status fsim_mesh_load(const char* obj_path, const char* attr_path, fsim_mesh** out) {
  FSIM_REQUIRE(obj_path && attr_path && out, "null argument");
  return guard([&] {
    *out = new fsim_mesh{load_mesh(obj_path, attr_path)};
    return FSIM_OK;
  });
}

fsim_status fsim_mesh_save(const fsim_mesh* mesh, const char* obj_path, const char* attr_path) {
  FSIM_REQUIRE(mesh && obj_path && attr_path, "null argument");
  return guard([&] {
    save_mesh(mesh->mesh, obj_path, attr_path);
    return FSIM_OK;
  });
}

fsim_status fsim_mesh_mirror(const fsim_mesh* mesh, fsim_mesh** out) {
  FSIM_REQUIRE(mesh && out, "null argument");
  return guard([&] {
    *out = new fsim_mesh{mirror_foot(mesh->mesh)};
    return FSIM_OK;
  });
}

void fsim_mesh_free(fsim_mesh* mesh) { delete mesh; }

size_t fsim_mesh_vertex_count(const fsim_mesh* m) { return m ? m->mesh.vertices.size() : 0; }
size_t fsim_mesh_triangle_count(const fsim_mesh* m) { return m ? m->mesh.triangles.size() : 0; }
size_t fsim_mesh_edge_count(const fsim_mesh* m) { return m ? m->mesh.edges.size() : 0; }

size_t fsim_mesh_pinned_count(const fsim_mesh* m) {
  if (!m) return 0;
  size_t n = 0;
  for (bool p : m->mesh.pinned) n += p ? 1 : 0;
  return n;
}

fsim_side fsim_mesh_side(const fsim_mesh* m) {
  return m && m->mesh.side == Side::Left ? FSIM_SIDE_LEFT : FSIM_SIDE_RIGHT;
}

fsim_status fsim_mesh_vertex(const fsim_mesh* m, size_t i, double xyz[3]) {
  FSIM_REQUIRE(m && xyz, "null argument");
  FSIM_REQUIRE(i < m->mesh.vertices.size(), "vertex index out of range");
  for (int k = 0; k < 3; ++k) xyz[k] = m->mesh.vertices[i][k];
  return FSIM_OK;
}

fsim_status fsim_mesh_radial_dir(const fsim_mesh* m, size_t i, double xyz[3]) {
  FSIM_REQUIRE(m && xyz, "null argument");
  FSIM_REQUIRE(i < m->mesh.radial_dir.size(), "vertex index out of range");
  for (int k = 0; k < 3; ++k) xyz[k] = m->mesh.radial_dir[i][k];
  return FSIM_OK;
}

fsim_status fsim_mesh_bounds(const fsim_mesh* m, double lo[3], double hi[3]) {
  FSIM_REQUIRE(m && lo && hi, "null argument");
  FSIM_REQUIRE(!m->mesh.vertices.empty(), "empty mesh");
  Vec3 a = m->mesh.vertices.front();
  Vec3 b = a;
  for (const auto& v : m->mesh.vertices) {
    a = a.cwiseMin(v);
    b = b.cwiseMax(v);
  }
  for (int k = 0; k < 3; ++k) {
    lo[k] = a[k];
    hi[k] = b[k];
  }
  return FSIM_OK;
}

fsim_status fsim_impedance(const fsim_config* cfg, double violation, double* out) {
  FSIM_REQUIRE(cfg && out, "null argument");
  return guard([&] {
    *out = impedance(violation, cfg->cfg.playback.solver);
    return FSIM_OK;
  });
}

fsim_status fsim_reference_accel(const fsim_config* cfg, double violation, double violation_rate, double* out) {
  FSIM_REQUIRE(cfg && out, "null argument");
  return guard([&] {
    *out = reference_accel(violation, violation_rate, cfg->cfg.playback.solver);
    return FSIM_OK;
  });
}

fsim_status fsim_gen_mesh(const fsim_config* cfg, const char* out_dir, size_t* vertices, size_t* triangles) {
  FSIM_REQUIRE(cfg, "null argument");
  return guard([&] {
    auto r = gen_mesh(cfg->cfg, str(out_dir));
    if (vertices) *vertices = r.vertices;
    if (triangles) *triangles = r.triangles;
    for (const auto& f : r.files) emit("wrote " + f);
    return FSIM_OK;
  });
}

fsim_status fsim_retarget(const fsim_config* cfg, const char* keypoints_path, const char* out_path,
                          fsim_retarget_info* info) {
  FSIM_REQUIRE(cfg && keypoints_path, "null argument");
  return guard([&] {
    auto r = retarget(cfg->cfg, keypoints_path, str(out_path));
    if (info) *info = {r.input_frames, r.output_frames, r.max_site_residual, r.unconverged_frames};
    emit("retargeted " + std::to_string(r.input_frames) + " frames to " + std::to_string(r.output_frames) +
         ", max site residual " + std::to_string(r.max_site_residual) + " m");
    return FSIM_OK;
  });
}

fsim_status fsim_simulate(const fsim_config* cfg, const char* trajectory_path, const char* out_dir,
                          const fsim_model* models, size_t model_count, const char* mesh_dir, double time_limit,
                          fsim_run_info* infos) {
  FSIM_REQUIRE(cfg && trajectory_path && models && model_count > 0, "null argument");
  return guard([&] {
    SimulateOptions opt;
    opt.models.clear();
    for (size_t i = 0; i < model_count; ++i) {
      if (models[i] != FSIM_MODEL_DEFORMABLE && models[i] != FSIM_MODEL_RIGID)
        return set_error(FSIM_ERR_INVALID_ARGUMENT, "unknown model");
      opt.models.push_back(models[i] == FSIM_MODEL_RIGID ? FootModel::Rigid : FootModel::Deformable);
    }
    opt.mesh_dir = str(mesh_dir);
    opt.time_limit = time_limit;
    opt.stop = &g_stop;
    opt.info = emit;
    auto runs = simulate(cfg->cfg, trajectory_path, str(out_dir), opt);
    std::string failures;
    for (size_t i = 0; i < runs.size(); ++i) {
      const auto& r = runs[i];
      if (infos)
        infos[i] = {r.model == FootModel::Rigid ? FSIM_MODEL_RIGID : FSIM_MODEL_DEFORMABLE, r.steps_planned,
                    r.steps_completed, r.truncated ? 1 : 0, r.failed_step, r.wall_seconds};
      if (!r.failure.empty()) {
        if (!failures.empty()) failures += "; ";
        failures += std::string(foot_model_name(r.model)) + " aborted at step " + std::to_string(r.failed_step) +
                    ": " + r.failure;
      }
    }
    if (!failures.empty()) return set_error(FSIM_ERR_NUMERICAL, failures);
    return FSIM_OK;
  });
}

fsim_status fsim_analyze(const fsim_config* cfg, const char* log_dir, const char* out_dir, int svg,
                         const char* mesh_dir, fsim_report_summary* summary) {
  FSIM_REQUIRE(cfg && log_dir, "null argument");
  return guard([&] {
    auto r = analyze(cfg->cfg, log_dir, str(out_dir), svg != 0, str(mesh_dir));
    fill_summary(r.report, summary);
    emit("wrote " + r.report_path);
    return FSIM_OK;
  });
}

fsim_status fsim_compare(const fsim_config* cfg, const char* deformable_dir, const char* rigid_dir,
                         const char* out_dir, int svg, const char* mesh_dir, fsim_report_summary* deformable,
                         fsim_report_summary* rigid) {
  FSIM_REQUIRE(cfg && deformable_dir && rigid_dir, "null argument");
  return guard([&] {
    auto r = compare(cfg->cfg, deformable_dir, rigid_dir, str(out_dir), svg != 0, str(mesh_dir));
    fill_summary(r.deformable, deformable);
    fill_summary(r.rigid, rigid);
    emit("wrote " + r.compare_path);
    return FSIM_OK;
  });
}

}  // extern "C"
