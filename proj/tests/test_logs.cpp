#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "error.hpp"
#include "gait_synth.hpp"
#include "logs.hpp"
#include "retargeting.hpp"
#include "test_util.hpp"
#include "text.hpp"

using namespace footsim;

namespace {

FootPair default_feet() {
  FootPair f;
  f.mesh[0] = generate_foot_mesh(MeshGenSpec{});
  f.mesh[1] = mirror_foot(f.mesh[0]);
  return f;
}

PlaybackLog short_run(FootModel model, double seconds) {
  SkeletonModel m = default_skeleton();
  StandPattern s;
  s.duration = seconds + 0.5;
  JointTrajectory traj = resample_and_filter(synthesize_stand(m, s).trajectory, 100.0, 6.0, &m);
  PlaybackConfig c;
  c.model = model;
  c.duration = seconds;
  return run_playback(m, traj, default_feet(), c);
}

const LogHeader kHeader{"0123456789abcdef", {"model deformable", "seed 1"}};

}  // namespace

TEST_SUITE("logs") {

TEST_CASE("every log starts with the config hash") {
  CHECK(header_lines(kHeader).front() == " config_hash 0123456789abcdef");
  const std::string csv = contacts_to_csv({}, kHeader);
  CHECK(csv.rfind("# config_hash 0123456789abcdef\n# model deformable\n# seed 1\ntime,side,vertex", 0) == 0);
  CHECK(rewards_to_csv({}, kHeader).rfind("# config_hash", 0) == 0);
  CHECK(meta_to_json(PlaybackLog{}, kHeader).find("\"config_hash\": \"0123456789abcdef\"") != std::string::npos);
}

TEST_CASE("contact records round-trip exactly") {
  std::vector<ContactRecord> in(3);
  for (int i = 0; i < 3; ++i) {
    in[i].time = 0.002 * i + 1.0 / 3.0;
    in[i].side = i % 2 ? Side::Left : Side::Right;
    in[i].vertex = 10 * i;
    in[i].position = Vec3(0.1 / 7.0, -0.02 * i, 0.004);
    in[i].normal = 123.456789 * (i + 1);
    in[i].tangential = Vec3(-1e-7, 2.5, 0.0);
    in[i].penetration = 1e-4 / 3.0;
  }
  auto out = parse_contacts(contacts_to_csv(in, kHeader, "truncated at step 3 of 9"));
  REQUIRE(out.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(out[i].time == in[i].time);
    CHECK(out[i].side == in[i].side);
    CHECK(out[i].vertex == in[i].vertex);
    CHECK(out[i].position == in[i].position);
    CHECK(out[i].normal == in[i].normal);
    CHECK(out[i].tangential == in[i].tangential);
    CHECK(out[i].penetration == in[i].penetration);
  }
}

TEST_CASE("simulated logs round-trip through the CSV writers") {
  SkeletonModel m = default_skeleton();
  FootPair feet = default_feet();
  PlaybackLog log = short_run(FootModel::Deformable, 0.1);
  REQUIRE(!log.contacts.empty());
  CHECK(contacts_to_csv(parse_contacts(contacts_to_csv(log.contacts, kHeader)), kHeader) ==
        contacts_to_csv(log.contacts, kHeader));
  CHECK(body_to_csv(m, parse_body(m, body_to_csv(m, log.body, kHeader)), kHeader) == body_to_csv(m, log.body, kHeader));
  CHECK(rewards_to_csv(parse_rewards(rewards_to_csv(log.rewards, kHeader)), kHeader) ==
        rewards_to_csv(log.rewards, kHeader));
  const std::size_t nv = feet.mesh[0].vertex_count();
  auto flex = parse_flex(flex_to_csv(log.flex[0], nv, kHeader));
  REQUIRE(flex.size() == log.flex[0].size());
  CHECK(flex.back().u == log.flex[0].back().u);
  CHECK(flex.back().pose.position == log.flex[0].back().pose.position);
  CHECK(flex_to_csv(flex, nv, kHeader) == flex_to_csv(log.flex[0], nv, kHeader));
}

TEST_CASE("log directories round-trip with their markers") {
  SkeletonModel m = default_skeleton();
  FootPair feet = default_feet();
  test::TempDir dir;
  PlaybackLog log = short_run(FootModel::Rigid, 0.1);
  log.truncated = true;
  log.steps_planned = 500;
  save_playback_log(dir.str(), m, feet, log, kHeader);
  CHECK(!std::filesystem::exists(dir.file("flex_right.csv")));
  const std::string body = text::read_file(dir.file("body.csv"));
  CHECK(body.find("# truncated at step 50 of 500\n") != std::string::npos);
  LoadedLog back = load_playback_log(dir.str(), m);
  CHECK(back.config_hash == kHeader.config_hash);
  CHECK(back.log.model == FootModel::Rigid);
  CHECK(back.log.truncated);
  CHECK(back.log.steps_completed == 50);
  CHECK(completion_marker(back.log) == "truncated at step 50 of 500");
  CHECK(back.log.body.size() == log.body.size());
  CHECK(back.log.contacts.size() == log.contacts.size());
  CHECK(back.log.rewards.size() == log.rewards.size());
}

TEST_CASE("complete runs carry no marker") {
  PlaybackLog log = short_run(FootModel::Rigid, 0.05);
  CHECK(completion_marker(log).empty());
  const std::string csv = rewards_to_csv(log.rewards, kHeader, completion_marker(log));
  CHECK(csv.find("truncated") == std::string::npos);
}

TEST_CASE("malformed logs report file and line") {
  const std::string good = contacts_to_csv({ContactRecord{}}, kHeader);
  auto expect_line = [](const std::string& text, const char* where) {
    try {
      parse_contacts(text, "c.csv");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(where) != std::string::npos, e.what());
    }
  };
  std::string bad = good;
  bad.insert(bad.size() - 1, ",9");
  expect_line(bad, "c.csv:5");
  bad = good + "0.1,right,3,0,0,nan,0,0,0,0\n";
  expect_line(bad, "c.csv:6");
  bad = good + "0.1,middle,3,0,0,0,0,0,0,0\n";
  expect_line(bad, "c.csv:6");
  expect_line("time,side\n", "c.csv:1");
  expect_line("", "c.csv");
  test::TempDir dir;
  CHECK_THROWS_AS(load_playback_log(dir.str(), default_skeleton()), Error);
  std::ofstream(dir.file("meta.json")) << "{\"config_hash\": 3}";
  CHECK_THROWS_AS(load_playback_log(dir.str(), default_skeleton()), ParseError);
}

}  // TEST_SUITE
