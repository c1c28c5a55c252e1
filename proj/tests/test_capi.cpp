#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <footsim/footsim.h>

namespace fs = std::filesystem;

namespace {

struct Config {
  fsim_config* p = nullptr;
  Config() { REQUIRE(fsim_config_new(&p) == FSIM_OK); }
  ~Config() { fsim_config_free(p); }
};

std::string scratch(const char* name) {
  fs::path p = fs::temp_directory_path() / (std::string("footsim_capi_") + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("status names and exit codes") {
  CHECK(std::string(fsim_version()).size() > 0);
  CHECK(fsim_exit_code(FSIM_OK) == 0);
  CHECK(fsim_exit_code(FSIM_ERR_NUMERICAL) == 3);
  for (fsim_status s : {FSIM_ERR_INVALID_ARGUMENT, FSIM_ERR_PARSE, FSIM_ERR_IO, FSIM_ERR_CONFIG})
    CHECK(fsim_exit_code(s) == 2);
  CHECK(std::string(fsim_status_name(FSIM_ERR_PARSE)).size() > 0);
  CHECK(std::string(fsim_config_env()) == "FOOTSIM_CONFIG");
}

TEST_CASE("config handles") {
  Config c;
  const char* h1 = nullptr;
  REQUIRE(fsim_config_hash(c.p, &h1) == FSIM_OK);
  const std::string before(h1);
  CHECK(before.size() == 16);
  CHECK(fsim_config_set(c.p, "contact.mu", "0.7") == FSIM_OK);
  const char* v = nullptr;
  REQUIRE(fsim_config_get(c.p, "contact.mu", &v) == FSIM_OK);
  CHECK(std::string(v) == "0.7");
  REQUIRE(fsim_config_hash(c.p, &h1) == FSIM_OK);
  CHECK(std::string(h1) != before);
  CHECK(fsim_config_set(c.p, "no.such_key", "1") == FSIM_ERR_CONFIG);
  CHECK(std::string(fsim_last_error()).find("no.such_key") != std::string::npos);
  CHECK(fsim_config_parse(c.p, "contact.mu = 0.5\nbad\n", "t.cfg") == FSIM_ERR_CONFIG);
  CHECK(std::string(fsim_last_error()).find("t.cfg:2") != std::string::npos);
  CHECK(fsim_config_load(c.p, "/nonexistent.cfg") == FSIM_ERR_CONFIG);
  CHECK(fsim_config_validate(c.p) == FSIM_OK);
  CHECK(fsim_config_set(c.p, "retarget.cutoff", "80") == FSIM_OK);
  CHECK(fsim_config_validate(c.p) == FSIM_ERR_CONFIG);
  CHECK(fsim_config_key_count() > 60);
  CHECK(fsim_config_key(fsim_config_key_count()) == nullptr);
  // the failed parse above left the handle untouched
  const char* text = nullptr;
  REQUIRE(fsim_config_canonical(c.p, &text) == FSIM_OK);
  CHECK(std::string(text).find("contact.mu = 0.7\n") != std::string::npos);
}

TEST_CASE("null arguments are rejected") {
  CHECK(fsim_config_new(nullptr) == FSIM_ERR_INVALID_ARGUMENT);
  CHECK(fsim_config_set(nullptr, "a", "b") == FSIM_ERR_INVALID_ARGUMENT);
  CHECK(fsim_mesh_generate(nullptr, FSIM_SIDE_RIGHT, nullptr) == FSIM_ERR_INVALID_ARGUMENT);
  fsim_config_free(nullptr);
  fsim_mesh_free(nullptr);
}

TEST_CASE("mesh generation and persistence") {
  Config c;
  fsim_mesh* right = nullptr;
  REQUIRE(fsim_mesh_generate(c.p, FSIM_SIDE_RIGHT, &right) == FSIM_OK);
  const size_t nv = fsim_mesh_vertex_count(right);
  CHECK(nv == 223);
  CHECK(fsim_mesh_triangle_count(right) == 2 * nv - 4);
  CHECK(fsim_mesh_edge_count(right) == 3 * nv - 6);
  CHECK(fsim_mesh_pinned_count(right) > 0);
  CHECK(fsim_mesh_side(right) == FSIM_SIDE_RIGHT);
  double lo[3], hi[3], p[3];
  REQUIRE(fsim_mesh_bounds(right, lo, hi) == FSIM_OK);
  CHECK(hi[0] - lo[0] == doctest::Approx(0.298).epsilon(1e-9));
  CHECK(fsim_mesh_vertex(right, nv, p) == FSIM_ERR_INVALID_ARGUMENT);

  fsim_mesh* left = nullptr;
  REQUIRE(fsim_mesh_mirror(right, &left) == FSIM_OK);
  CHECK(fsim_mesh_side(left) == FSIM_SIDE_LEFT);
  double a[3], b[3];
  REQUIRE(fsim_mesh_vertex(right, 7, a) == FSIM_OK);
  REQUIRE(fsim_mesh_vertex(left, 7, b) == FSIM_OK);
  CHECK(a[1] == -b[1]);

  const std::string dir = scratch("mesh");
  const std::string obj = dir + "/r.obj", attr = dir + "/r.attr.csv";
  REQUIRE(fsim_mesh_save(right, obj.c_str(), attr.c_str()) == FSIM_OK);
  fsim_mesh* loaded = nullptr;
  REQUIRE(fsim_mesh_load(obj.c_str(), attr.c_str(), &loaded) == FSIM_OK);
  CHECK(fsim_mesh_vertex_count(loaded) == nv);
  double r1[3], r2[3];
  REQUIRE(fsim_mesh_radial_dir(right, nv - 1, r1) == FSIM_OK);
  REQUIRE(fsim_mesh_radial_dir(loaded, nv - 1, r2) == FSIM_OK);
  for (int k = 0; k < 3; ++k) CHECK(r1[k] == r2[k]);
  CHECK(fsim_mesh_load((dir + "/missing.obj").c_str(), attr.c_str(), &loaded) != FSIM_OK);
  fsim_mesh_free(loaded);
  fsim_mesh_free(left);
  fsim_mesh_free(right);
  fs::remove_all(dir);
}

TEST_CASE("impedance and reference acceleration primitives") {
  Config c;
  double d = 0.0, a = 0.0;
  REQUIRE(fsim_impedance(c.p, 0.0, &d) == FSIM_OK);
  CHECK(d == doctest::Approx(0.1));
  REQUIRE(fsim_impedance(c.p, 0.01, &d) == FSIM_OK);
  CHECK(d == doctest::Approx(0.9));
  REQUIRE(fsim_reference_accel(c.p, 0.001, 0.0, &a) == FSIM_OK);
  CHECK(a == doctest::Approx(-50.0));
  CHECK(fsim_impedance(c.p, 0.0, nullptr) == FSIM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("pipeline entry points report bad inputs") {
  Config c;
  size_t nv = 0, nt = 0;
  const fsim_status missing = fsim_gen_mesh(c.p, "/nonexistent/dir", &nv, &nt);
  CHECK(fsim_exit_code(missing) == 2);
  CHECK(std::string(fsim_last_error()).find("/nonexistent/dir") != std::string::npos);
  fsim_retarget_info info{};
  CHECK(fsim_retarget(c.p, "/nonexistent.csv", "/tmp/x.csv", &info) != FSIM_OK);
  const std::string dir = scratch("gen");
  REQUIRE(fsim_gen_mesh(c.p, dir.c_str(), &nv, &nt) == FSIM_OK);
  CHECK(nt == 2 * nv - 4);
  CHECK(fs::exists(dir + "/foot_right.obj"));
  CHECK(fs::exists(dir + "/foot_left.attr.csv"));
  fs::remove_all(dir);
}

}  // TEST_SUITE
