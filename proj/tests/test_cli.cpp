#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const std::string kBin = FOOTSIM_CLI;
const std::string kData = FOOTSIM_DATA_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code = -1;
  std::string err;
};

// Runs the CLI with FOOTSIM_CONFIG cleared unless `env` sets it.
Result run(const std::string& args, const std::string& env = "FOOTSIM_CONFIG=") {
  static int counter = 0;
  const fs::path err = fs::temp_directory_path() / ("footsim_cli_err_" + std::to_string(::getpid()) + "_" +
                                                    std::to_string(counter++));
  const std::string cmd = "env " + env + " " + kBin + " -q " + args + " > /dev/null 2> " + err.string();
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  fs::remove(err);
  return r;
}

fs::path scratch(const char* name) {
  fs::path p = fs::temp_directory_path() / (std::string("footsim_cli_") + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path retargeted_walk() {
  static const fs::path p = [] {
    fs::path dir = scratch("walk");
    fs::path out = dir / "walk.csv";
    REQUIRE(run("retarget -i " + kData + "/walk_keypoints.csv -o " + out.string()).code == 0);
    return out;
  }();
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("missing output directory is an input error") {
  Result r = run("gen-mesh -o /nonexistent/footsim_out");
  CHECK(r.code == 2);
  CHECK(r.err.find("/nonexistent/footsim_out") != std::string::npos);
  CHECK(run("gen-mesh").code == 2);
  CHECK(run("no-such-command").code == 2);
}

TEST_CASE("malformed keypoint rows name the row") {
  fs::path dir = scratch("bad");
  std::ofstream(dir / "kp.csv") << "# rate_hz 30\nframe,site,x,y,z\n0,pelvis,0,0,0.9\n0,toe_r,abc,0,0\n";
  Result r = run("retarget -i " + (dir / "kp.csv").string() + " -o " + (dir / "t.csv").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("kp.csv:4") != std::string::npos);
  CHECK(!fs::exists(dir / "t.csv"));
  fs::remove_all(dir);
}

TEST_CASE("configuration errors exit with 2") {
  fs::path dir = scratch("cfg");
  CHECK(run("--set contact.mu=abc show-config").code == 2);
  CHECK(run("--set nonsense=1 show-config").code == 2);
  std::ofstream(dir / "bad.cfg") << "contact.mu = 0.5\nnot a setting\n";
  Result r = run("show-config", "FOOTSIM_CONFIG=" + (dir / "bad.cfg").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("bad.cfg:2") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("config from the environment reaches every output") {
  fs::path dir = scratch("env");
  std::ofstream(dir / "mu.cfg") << "contact.mu = 0.8\n";
  REQUIRE(run("gen-mesh -o " + dir.string(), "FOOTSIM_CONFIG=" + (dir / "mu.cfg").string()).code == 0);
  const std::string env_obj = slurp(dir / "foot_right.obj");
  REQUIRE(run("gen-mesh -o " + dir.string()).code == 0);
  const std::string default_obj = slurp(dir / "foot_right.obj");
  CHECK(env_obj.find("config_hash") != std::string::npos);
  CHECK(env_obj != default_obj);
  REQUIRE(run("--config " + (dir / "mu.cfg").string() + " gen-mesh -o " + dir.string()).code == 0);
  CHECK(slurp(dir / "foot_right.obj") == env_obj);
  fs::remove_all(dir);
}

TEST_CASE("gen-mesh output is a pure function of the seed") {
  fs::path a = scratch("seed_a"), b = scratch("seed_b"), c = scratch("seed_c");
  REQUIRE(run("--seed 5 gen-mesh -o " + a.string()).code == 0);
  REQUIRE(run("--seed 5 gen-mesh -o " + b.string()).code == 0);
  REQUIRE(run("--seed 6 gen-mesh -o " + c.string()).code == 0);
  for (const char* f : {"foot_right.obj", "foot_left.obj", "foot_right.attr.csv", "foot_left.attr.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(!slurp(a / f).empty());
  }
  CHECK(slurp(a / "foot_right.obj") != slurp(c / "foot_right.obj"));
  for (const auto& p : {a, b, c}) fs::remove_all(p);
}

TEST_CASE("retarget records its damping") {
  fs::path dir = scratch("lambda");
  REQUIRE(run("retarget -i " + kData + "/stand_keypoints.csv -o " + (dir / "t.csv").string() + " --lambda 0.01")
              .code == 0);
  const std::string t = slurp(dir / "t.csv");
  CHECK(t.rfind("# config_hash ", 0) == 0);
  CHECK(t.find("# lambda 0.01\n") != std::string::npos);
  CHECK(run("retarget -i " + kData + "/stand_keypoints.csv -o " + (dir / "t.csv").string() + " --lambda -1")
            .code == 2);
  fs::remove_all(dir);
}

TEST_CASE("numerical blow-up exits with 3 and keeps the partial log") {
  fs::path dir = scratch("nan");
  Result r = run("--set solver.young_modulus=inf --set solver.edge_constraints=false --set playback.duration=0.2 "
                 "simulate -m deformable -t " + retargeted_walk().string() + " -o " + dir.string());
  CHECK(r.code == 3);
  const std::string body = slurp(dir / "deformable" / "body.csv");
  CHECK(body.find("# aborted at step") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("wall-clock limit writes a truncation marker") {
  fs::path dir = scratch("limit");
  Result r = run("simulate -m deformable --time-limit 0.3 -t " + retargeted_walk().string() + " -o " + dir.string());
  CHECK(r.code == 0);
  const std::string body = slurp(dir / "deformable" / "body.csv");
  CHECK(body.find("# truncated at step") != std::string::npos);
  CHECK(slurp(dir / "deformable" / "meta.json").find("\"truncated\": true") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("interrupt writes a truncation marker") {
  fs::path dir = scratch("sigint");
  const std::string traj = retargeted_walk().string(), out = dir.string();
  const pid_t pid = ::fork();
  REQUIRE(pid >= 0);
  if (pid == 0) {
    ::unsetenv("FOOTSIM_CONFIG");
    // a finer step keeps the run well past the signal
    ::execl(kBin.c_str(), kBin.c_str(), "-q", "--set", "playback.sim_rate=2000", "simulate", "-m", "deformable", "-t",
            traj.c_str(), "-o", out.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(500));
  ::kill(pid, SIGINT);
  int status = 0;
  ::waitpid(pid, &status, 0);
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(slurp(dir / "deformable" / "contacts.csv").find("# truncated at step") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("full pipeline with parallel jobs and figures") {
  fs::path dir = scratch("pipe");
  const std::string sims = (dir / "sims").string();
  REQUIRE(run("--set playback.duration=2.5 simulate -m both -j 2 -t " + retargeted_walk().string() + " -o " + sims)
              .code == 0);
  Result r = run("compare --svg --deformable " + sims + "/deformable --rigid " + sims + "/rigid -o " +
                 (dir / "cmp").string());
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "cmp" / "compare.json"));
  int svgs = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "cmp"))
    if (e.path().extension() == ".svg") ++svgs;
  CHECK(svgs > 0);
  REQUIRE(run("analyze -l " + sims + "/rigid -o " + (dir / "rep").string()).code == 0);
  CHECK(slurp(dir / "rep" / "report.json").find("\"config_hash\"") != std::string::npos);
  fs::remove_all(dir);
}

}  // TEST_SUITE
