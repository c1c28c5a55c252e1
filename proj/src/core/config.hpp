#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biomech_analysis.hpp"
#include "foot_mesh.hpp"
#include "gait_playback.hpp"
#include "retargeting.hpp"

namespace footsim {

// Every tunable of the pipeline. Text form is one "key = value" per line;
// see docs/config.md for the schema.
struct RunConfig {
  MeshGenSpec mesh;
  std::optional<Vec3> radial_origin;  // empty: centroid of the pinned vertices
  std::string skeleton_file;          // empty: built-in skeleton
  SolveOptions ik;
  double retarget_rate = 100.0;
  double filter_cutoff = 6.0;
  bool scale_skeleton = true;
  PlaybackConfig playback;  // owns the solver and friction parameters
  AnalysisConfig analysis;
  std::uint64_t seed = 1;
  int jobs = 1;  // run.* keys change scheduling only and are not hashed

  void validate() const;
  // All keys with canonical values, sorted; run.* keys only when asked.
  std::string canonical_text(bool include_run = false) const;
  // FNV-1a of the canonical text without run.* keys, as 16 hex digits.
  std::string hash() const;
};

std::vector<std::string> config_keys();

// Throws Error(Config) naming the key for unknown keys or bad values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_setting(const RunConfig& cfg, const std::string& key);

RunConfig parse_config(const std::string& text, const std::string& source = "config", RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

constexpr const char* kConfigEnv = "FOOTSIM_CONFIG";
// `explicit_path` if set, else $FOOTSIM_CONFIG, else empty.
std::string resolve_config_path(const std::string& explicit_path);

// Right foot mesh for the configured shape and radial origin.
FootMesh configured_mesh(const RunConfig& cfg);

}  // namespace footsim
