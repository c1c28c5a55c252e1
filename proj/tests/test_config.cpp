#include <doctest.h>

#include <cstdlib>

#include "config.hpp"
#include "error.hpp"
#include "test_util.hpp"
#include "text.hpp"

using namespace footsim;

TEST_SUITE("config") {

TEST_CASE("every key round-trips through its canonical value") {
  RunConfig cfg;
  for (const auto& key : config_keys()) {
    RunConfig other;
    apply_setting(other, key, get_setting(cfg, key));
    CHECK_MESSAGE(other.canonical_text(true) == cfg.canonical_text(true), key);
  }
  CHECK(config_keys().size() > 60);
}

TEST_CASE("canonical text reparses to the same hash") {
  RunConfig cfg;
  apply_setting(cfg, "contact.mu", "0.8");
  apply_setting(cfg, "analysis.heel", "0.25");
  RunConfig back = parse_config(cfg.canonical_text(true));
  CHECK(back.hash() == cfg.hash());
  CHECK(back.canonical_text(true) == cfg.canonical_text(true));
}

TEST_CASE("shipped default config matches the built-in defaults") {
  RunConfig file = load_config(FOOTSIM_DATA_DIR "/default.cfg");
  CHECK(file.hash() == RunConfig{}.hash());
  CHECK_NOTHROW(file.validate());
}

TEST_CASE("hash ignores scheduling keys and tracks physics keys") {
  RunConfig a, b;
  apply_setting(b, "run.jobs", "4");
  CHECK(a.hash() == b.hash());
  apply_setting(b, "solver.young_modulus", "2e6");
  CHECK(a.hash() != b.hash());
  CHECK(a.hash().size() == 16);
}

TEST_CASE("timestep and simulation rate stay coupled") {
  RunConfig c;
  apply_setting(c, "playback.sim_rate", "1000");
  CHECK(c.playback.solver.timestep == doctest::Approx(0.001));
  apply_setting(c, "solver.timestep", "0.002");
  CHECK(c.playback.sim_rate == doctest::Approx(500.0));
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("seed drives the mesh seed") {
  RunConfig c;
  apply_setting(c, "seed", "7");
  CHECK(c.seed == 7);
  CHECK(c.mesh.seed == 7);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("errors name the key and the line") {
  RunConfig c;
  CHECK_THROWS_WITH_AS(apply_setting(c, "solver.nonsense", "1"), doctest::Contains("solver.nonsense"), Error);
  CHECK_THROWS_WITH_AS(apply_setting(c, "contact.mu", "abc"), doctest::Contains("contact.mu"), Error);
  CHECK_THROWS_WITH_AS(apply_setting(c, "solver.accel_ref", "1"), doctest::Contains("2 number"), Error);
  CHECK_THROWS_WITH_AS(apply_setting(c, "solver.edge_constraints", "maybe"), doctest::Contains("true or false"), Error);
  CHECK_THROWS_WITH_AS(apply_setting(c, "playback.model", "soft"), doctest::Contains("playback.model"), Error);
  try {
    parse_config("# comment\ncontact.mu = 1\nbroken line\n", "x.cfg");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("x.cfg:3") != std::string::npos);
  }
}

TEST_CASE("validation rejects inconsistent settings") {
  auto invalid = [](const char* key, const char* value) {
    RunConfig c;
    apply_setting(c, key, value);
    CHECK_THROWS_AS(c.validate(), Error);
  };
  invalid("retarget.cutoff", "60");
  invalid("playback.control_rate", "30");
  invalid("retarget.lambda", "0");
  invalid("run.jobs", "0");
  invalid("mesh.pinned_fraction", "1.5");
  invalid("contact.rigid_spheres", "5");
  invalid("analysis.phase_points", "1");
  RunConfig c;
  c.mesh.seed = 99;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("config path resolution") {
  ::unsetenv(kConfigEnv);
  CHECK(resolve_config_path("").empty());
  CHECK(resolve_config_path("a.cfg") == "a.cfg");
  ::setenv(kConfigEnv, "/tmp/env.cfg", 1);
  CHECK(resolve_config_path("") == "/tmp/env.cfg");
  CHECK(resolve_config_path("a.cfg") == "a.cfg");
  ::unsetenv(kConfigEnv);
  CHECK_THROWS_AS(load_config("/nonexistent/footsim.cfg"), Error);
}

TEST_CASE("custom radial origin is applied to the mesh") {
  RunConfig c;
  apply_setting(c, "mesh.radial_origin", "0.1 0 0.05");
  FootMesh m = configured_mesh(c);
  for (std::size_t i = 0; i < m.vertex_count(); ++i) {
    if (m.pinned[i]) continue;
    const Vec3 d = (m.vertices[i] - Vec3(0.1, 0, 0.05)).normalized();
    CHECK((m.radial_dir[i] - d).norm() < 1e-12);
  }
  CHECK(get_setting(c, "mesh.radial_origin") == "0.1 0 0.05");
  apply_setting(c, "mesh.radial_origin", "auto");
  CHECK(get_setting(c, "mesh.radial_origin") == "auto");
}

}  // TEST_SUITE
