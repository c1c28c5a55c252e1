#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>

#include "error.hpp"
#include "text.hpp"

namespace footsim {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  fail(ErrorKind::Config, key + ": " + why + " (got '" + value + "')");
}

std::vector<double> numbers(const std::string& key, const std::string& value, std::size_t count) {
  std::vector<double> out;
  for (auto tok : text::split_ws(value)) {
    try {
      out.push_back(text::parse_double(tok, key, 0));
    } catch (const Error&) {
      bad_value(key, value, "expected a number");
    }
  }
  if (out.size() != count) bad_value(key, value, "expected " + std::to_string(count) + " number(s)");
  return out;
}

double number(const std::string& key, const std::string& value) { return numbers(key, value, 1)[0]; }

long integer(const std::string& key, const std::string& value) {
  double v = number(key, value);
  if (v != std::floor(v) || std::abs(v) > 1e15) bad_value(key, value, "expected an integer");
  return static_cast<long>(v);
}

bool boolean(const std::string& key, const std::string& value) {
  std::string v(text::trim(value));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, value, "expected true or false");
}

std::string join(std::initializer_list<double> xs) {
  std::string out;
  for (double x : xs) {
    if (!out.empty()) out += ' ';
    out += text::fmt(x);
  }
  return out;
}

std::string vec_text(const Vec3& v) { return join({v.x(), v.y(), v.z()}); }

struct Key {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

using Table = std::map<std::string, Key>;

template <typename Get>
void add_double(Table& t, const std::string& name, Get ref) {
  t[name] = {[ref](RunConfig& c, const std::string& k, const std::string& v) { ref(c) = number(k, v); },
             [ref](const RunConfig& c) { return text::fmt(ref(const_cast<RunConfig&>(c))); }};
}

template <typename Get>
void add_int(Table& t, const std::string& name, Get ref) {
  t[name] = {[ref](RunConfig& c, const std::string& k, const std::string& v) {
               ref(c) = static_cast<std::remove_reference_t<decltype(ref(c))>>(integer(k, v));
             },
             [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); }};
}

template <typename Get>
void add_bool(Table& t, const std::string& name, Get ref) {
  t[name] = {[ref](RunConfig& c, const std::string& k, const std::string& v) { ref(c) = boolean(k, v); },
             [ref](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}

template <typename Get>
void add_vec(Table& t, const std::string& name, Get ref) {
  t[name] = {[ref](RunConfig& c, const std::string& k, const std::string& v) {
               auto n = numbers(k, v, 3);
               ref(c) = Vec3(n[0], n[1], n[2]);
             },
             [ref](const RunConfig& c) { return vec_text(ref(const_cast<RunConfig&>(c))); }};
}

Table build_table() {
  Table t;
  add_double(t, "mesh.length", [](RunConfig& c) -> double& { return c.mesh.length; });
  add_double(t, "mesh.width", [](RunConfig& c) -> double& { return c.mesh.width; });
  add_double(t, "mesh.height", [](RunConfig& c) -> double& { return c.mesh.height; });
  add_int(t, "mesh.target_vertices", [](RunConfig& c) -> int& { return c.mesh.target_vertices; });
  add_int(t, "mesh.target_triangles", [](RunConfig& c) -> int& { return c.mesh.target_triangles; });
  add_double(t, "mesh.heel_width", [](RunConfig& c) -> double& { return c.mesh.heel_width; });
  add_double(t, "mesh.forefoot_position", [](RunConfig& c) -> double& { return c.mesh.forefoot_position; });
  add_double(t, "mesh.ankle_position", [](RunConfig& c) -> double& { return c.mesh.ankle_position; });
  add_double(t, "mesh.toe_height", [](RunConfig& c) -> double& { return c.mesh.toe_height; });
  add_double(t, "mesh.heel_rocker", [](RunConfig& c) -> double& { return c.mesh.heel_rocker; });
  add_double(t, "mesh.toe_rocker", [](RunConfig& c) -> double& { return c.mesh.toe_rocker; });
  add_double(t, "mesh.plantar_density", [](RunConfig& c) -> double& { return c.mesh.plantar_density; });
  add_double(t, "mesh.pinned_fraction", [](RunConfig& c) -> double& { return c.mesh.pinned_fraction; });
  add_double(t, "mesh.vertex_radius", [](RunConfig& c) -> double& { return c.mesh.vertex_radius; });
  add_double(t, "mesh.vertex_mass", [](RunConfig& c) -> double& { return c.mesh.vertex_mass; });
  t["mesh.radial_mode"] = {
      [](RunConfig& c, const std::string& k, const std::string& v) {
        std::string s(text::trim(v));
        if (s == "body_center") c.mesh.radial_mode = RadialMode::BodyCenter;
        else if (s == "surface_normal") c.mesh.radial_mode = RadialMode::SurfaceNormal;
        else bad_value(k, v, "expected body_center or surface_normal");
      },
      [](const RunConfig& c) {
        return std::string(c.mesh.radial_mode == RadialMode::BodyCenter ? "body_center" : "surface_normal");
      }};
  t["mesh.radial_origin"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                               if (text::trim(v) == "auto") {
                                 c.radial_origin.reset();
                                 return;
                               }
                               auto n = numbers(k, v, 3);
                               c.radial_origin = Vec3(n[0], n[1], n[2]);
                             },
                             [](const RunConfig& c) {
                               return c.radial_origin ? vec_text(*c.radial_origin) : std::string("auto");
                             }};

  t["solver.timestep"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                            double dt = number(k, v);
                            if (!(dt > 0)) bad_value(k, v, "must be positive");
                            c.playback.solver.timestep = dt;
                            c.playback.sim_rate = 1.0 / dt;
                          },
                          [](const RunConfig& c) { return text::fmt(c.playback.solver.timestep); }};
  t["playback.sim_rate"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                              double r = number(k, v);
                              if (!(r > 0)) bad_value(k, v, "must be positive");
                              c.playback.sim_rate = r;
                              c.playback.solver.timestep = 1.0 / r;
                            },
                            [](const RunConfig& c) { return text::fmt(c.playback.sim_rate); }};
  add_double(t, "solver.young_modulus", [](RunConfig& c) -> double& { return c.playback.solver.young_modulus; });
  add_double(t, "solver.poisson_ratio", [](RunConfig& c) -> double& { return c.playback.solver.poisson_ratio; });
  t["solver.accel_ref"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                             auto n = numbers(k, v, 2);
                             c.playback.solver.accel_ref_stiffness = n[0];
                             c.playback.solver.accel_ref_damping = n[1];
                           },
                           [](const RunConfig& c) {
                             return join({c.playback.solver.accel_ref_stiffness, c.playback.solver.accel_ref_damping});
                           }};
  t["solver.impedance"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                             auto n = numbers(k, v, 5);
                             c.playback.solver.impedance = {n[0], n[1], n[2], n[3], n[4]};
                           },
                           [](const RunConfig& c) {
                             const auto& i = c.playback.solver.impedance;
                             return join({i.d_min, i.d_max, i.width, i.midpoint, i.power});
                           }};
  add_bool(t, "solver.edge_constraints", [](RunConfig& c) -> bool& { return c.playback.solver.edge_constraint_enabled; });
  add_double(t, "solver.gravity", [](RunConfig& c) -> double& { return c.playback.solver.gravity; });
  add_double(t, "solver.force_cap", [](RunConfig& c) -> double& { return c.playback.solver.force_cap; });

  add_double(t, "contact.mu", [](RunConfig& c) -> double& { return c.playback.friction.mu; });
  add_double(t, "contact.friction_slope", [](RunConfig& c) -> double& { return c.playback.friction.slope; });
  add_int(t, "contact.rigid_spheres", [](RunConfig& c) -> int& { return c.playback.rigid_spheres; });
  add_double(t, "contact.rigid_effective_mass", [](RunConfig& c) -> double& { return c.playback.rigid_effective_mass; });

  t["skeleton.file"] = {[](RunConfig& c, const std::string&, const std::string& v) { c.skeleton_file = std::string(text::trim(v)); },
                        [](const RunConfig& c) { return c.skeleton_file; }};

  add_double(t, "retarget.lambda", [](RunConfig& c) -> double& { return c.ik.lambda; });
  add_double(t, "retarget.mu_initial", [](RunConfig& c) -> double& { return c.ik.mu_initial; });
  add_int(t, "retarget.max_iterations", [](RunConfig& c) -> int& { return c.ik.max_iterations; });
  add_double(t, "retarget.step_tolerance", [](RunConfig& c) -> double& { return c.ik.step_tolerance; });
  add_int(t, "retarget.max_halvings", [](RunConfig& c) -> int& { return c.ik.max_halvings; });
  add_double(t, "retarget.rate", [](RunConfig& c) -> double& { return c.retarget_rate; });
  add_double(t, "retarget.cutoff", [](RunConfig& c) -> double& { return c.filter_cutoff; });
  add_bool(t, "retarget.scale", [](RunConfig& c) -> bool& { return c.scale_skeleton; });

  add_double(t, "playback.control_rate", [](RunConfig& c) -> double& { return c.playback.control_rate; });
  add_double(t, "playback.target_speed", [](RunConfig& c) -> double& { return c.playback.target_speed; });
  t["playback.model"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                           try {
                             c.playback.model = parse_foot_model(std::string(text::trim(v)));
                           } catch (const Error&) {
                             bad_value(k, v, "expected deformable or rigid");
                           }
                         },
                         [](const RunConfig& c) { return std::string(foot_model_name(c.playback.model)); }};
  add_double(t, "playback.body_mass", [](RunConfig& c) -> double& { return c.playback.body_mass; });
  add_double(t, "playback.duration", [](RunConfig& c) -> double& { return c.playback.duration; });
  add_int(t, "playback.activation_count", [](RunConfig& c) -> int& { return c.playback.activation_count; });
  add_vec(t, "playback.ankle_in_mesh", [](RunConfig& c) -> Vec3& { return c.playback.attach.ankle_in_mesh; });

  add_double(t, "reward.w_q", [](RunConfig& c) -> double& { return c.playback.weights.q; });
  add_double(t, "reward.w_qdot", [](RunConfig& c) -> double& { return c.playback.weights.qdot; });
  add_double(t, "reward.w_act", [](RunConfig& c) -> double& { return c.playback.weights.act; });
  add_double(t, "reward.w_vel", [](RunConfig& c) -> double& { return c.playback.weights.vel; });
  add_double(t, "reward.w_healthy", [](RunConfig& c) -> double& { return c.playback.weights.healthy; });
  add_double(t, "reward.q_scale", [](RunConfig& c) -> double& { return c.playback.kernels.q_scale; });
  add_double(t, "reward.qdot_scale", [](RunConfig& c) -> double& { return c.playback.kernels.qdot_scale; });
  add_double(t, "reward.vel_width", [](RunConfig& c) -> double& { return c.playback.kernels.vel_width; });
  add_double(t, "reward.pelvis_min", [](RunConfig& c) -> double& { return c.playback.kernels.pelvis_min; });
  add_double(t, "reward.pelvis_max", [](RunConfig& c) -> double& { return c.playback.kernels.pelvis_max; });
  add_double(t, "reward.max_tilt", [](RunConfig& c) -> double& { return c.playback.kernels.max_tilt; });

  add_double(t, "analysis.heel", [](RunConfig& c) -> double& { return c.analysis.regions.heel; });
  add_double(t, "analysis.midfoot", [](RunConfig& c) -> double& { return c.analysis.regions.midfoot; });
  add_double(t, "analysis.forefoot", [](RunConfig& c) -> double& { return c.analysis.regions.forefoot; });
  add_double(t, "analysis.strike_threshold", [](RunConfig& c) -> double& { return c.analysis.events.threshold; });
  add_double(t, "analysis.debounce", [](RunConfig& c) -> double& { return c.analysis.events.debounce; });
  add_double(t, "analysis.heatmap_bin", [](RunConfig& c) -> double& { return c.analysis.heatmap_bin; });
  add_double(t, "analysis.zmp_threshold", [](RunConfig& c) -> double& { return c.analysis.zmp_threshold; });
  add_double(t, "analysis.datum", [](RunConfig& c) -> double& { return c.analysis.datum; });
  add_double(t, "analysis.late_stance", [](RunConfig& c) -> double& { return c.analysis.late_stance; });
  add_int(t, "analysis.phase_points", [](RunConfig& c) -> int& { return c.analysis.phase_points; });
  add_double(t, "analysis.continuity_fraction", [](RunConfig& c) -> double& { return c.analysis.continuity_fraction; });

  t["seed"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                 long s = integer(k, v);
                 if (s < 0) bad_value(k, v, "must be non-negative");
                 c.seed = static_cast<std::uint64_t>(s);
                 c.mesh.seed = c.seed;
               },
               [](const RunConfig& c) { return std::to_string(c.seed); }};
  add_int(t, "run.jobs", [](RunConfig& c) -> int& { return c.jobs; });
  return t;
}

const Table& table() {
  static const Table t = build_table();
  return t;
}

}  // namespace

void RunConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::Config, what);
  };
  check(mesh.length > 0 && mesh.width > 0 && mesh.height > 0, "mesh dimensions must be positive");
  check(mesh.target_vertices >= 4 && mesh.target_triangles >= 4, "mesh needs at least 4 vertices and 4 triangles");
  check(mesh.vertex_radius > 0 && mesh.vertex_mass > 0, "vertex radius and mass must be positive");
  check(mesh.pinned_fraction > 0 && mesh.pinned_fraction < 1, "mesh.pinned_fraction must be in (0, 1)");
  check(ik.lambda > 0 && ik.mu_initial > 0 && ik.max_iterations > 0 && ik.step_tolerance > 0 && ik.max_halvings >= 0,
        "retarget solver settings are out of range");
  check(retarget_rate > 0, "retarget.rate must be positive");
  check(filter_cutoff > 0 && filter_cutoff < 0.5 * retarget_rate, "retarget.cutoff must be in (0, rate/2)");
  check(jobs >= 1, "run.jobs must be at least 1");
  check(std::abs(playback.solver.timestep * playback.sim_rate - 1.0) < 1e-9,
        "solver.timestep must equal 1 / playback.sim_rate");
  check(mesh.seed == seed, "mesh seed must follow the run seed");
  try {
    playback.validate();
    analysis.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(ErrorKind::Config, e.what());
  }
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, v] : table()) out.push_back(k);
  return out;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto it = table().find(key);
  if (it == table().end()) fail(ErrorKind::Config, "unknown config key '" + key + "'");
  try {
    it->second.set(cfg, key, value);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(ErrorKind::Config, key + ": " + e.what());
  }
}

std::string get_setting(const RunConfig& cfg, const std::string& key) {
  auto it = table().find(key);
  if (it == table().end()) fail(ErrorKind::Config, "unknown config key '" + key + "'");
  return it->second.get(cfg);
}

std::string RunConfig::canonical_text(bool include_run) const {
  std::string out;
  for (const auto& [k, key] : table()) {
    if (!include_run && k.rfind("run.", 0) == 0) continue;
    out += k + " = " + key.get(*this) + "\n";
  }
  return out;
}

std::string RunConfig::hash() const { return text::hex64(text::fnv1a(canonical_text(false))); }

RunConfig parse_config(const std::string& text_in, const std::string& source, RunConfig base) {
  text::LineReader reader(text_in, source);
  std::string_view line;
  while (reader.next(line)) {
    auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(reader.line_number()) + ": ";
    if (eq == std::string_view::npos) fail(ErrorKind::Config, where + "expected 'key = value'");
    std::string key(text::trim(line.substr(0, eq)));
    std::string value(text::trim(line.substr(eq + 1)));
    try {
      apply_setting(base, key, value);
    } catch (const Error& e) {
      fail(ErrorKind::Config, where + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::string contents;
  try {
    contents = text::read_file(path);
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("cannot read config: ") + e.what());
  }
  return parse_config(contents, path, std::move(base));
}

std::string resolve_config_path(const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  const char* env = std::getenv(kConfigEnv);
  return env ? std::string(env) : std::string();
}

FootMesh configured_mesh(const RunConfig& cfg) {
  FootMesh m = generate_foot_mesh(cfg.mesh);
  if (cfg.radial_origin && cfg.mesh.radial_mode == RadialMode::BodyCenter)
    m = assign_radial_directions(m, *cfg.radial_origin);
  return m;
}

}  // namespace footsim
