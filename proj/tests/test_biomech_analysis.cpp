#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "biomech_analysis.hpp"
#include "error.hpp"
#include "test_util.hpp"

using namespace footsim;

namespace {

ContactRecord contact(double t, int vertex, double normal, Vec3 pos = Vec3::Zero(), Side side = Side::Right) {
  ContactRecord r;
  r.time = t;
  r.side = side;
  r.vertex = vertex;
  r.position = pos;
  r.normal = normal;
  return r;
}

// Brute-force signed distance to a convex polygon given counter-clockwise.
double brute_signed_distance(const std::vector<Vec2>& hull, const Vec2& p) {
  if (hull.size() == 1) return -(p - hull[0]).norm() * ((p - hull[0]).norm() > 0 ? 1.0 : 0.0);
  double d = 1e18;
  bool inside = hull.size() >= 3;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 a = hull[i], b = hull[(i + 1) % hull.size()];
    const Vec2 ab = b - a;
    const double s = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    d = std::min(d, (p - (a + s * ab)).norm());
    const double cross = ab.x() * (p - a).y() - ab.y() * (p - a).x();
    if (cross < 0) inside = false;
  }
  return inside ? d : -d;
}

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

RegionalSeries heel_series(const std::vector<double>& heel, double rate) {
  RegionalSeries s;
  s.rate = rate;
  for (double f : heel) {
    s.force.push_back({f, 0.0, 0.0, 0.0});
    s.total.push_back(f);
  }
  return s;
}

}  // namespace

TEST_SUITE("biomech_analysis") {

TEST_CASE("strain is zero at rest and 0.1 at 1.1 rest length") {
  FootMesh m = generate_foot_mesh(MeshGenSpec{});
  for (double e : edge_strain(m, std::vector<double>(m.vertex_count(), 0.0))) CHECK(e == 0.0);
  FootMesh two;
  two.vertices = {{-0.05, 0, 0}, {0.05, 0, 0}};
  two.edges = {{0, 1, 0.1}};
  two.pinned = {false, false};
  two.radial_dir = {{-1, 0, 0}, {1, 0, 0}};
  CHECK(edge_strain(two, {0.005, 0.005})[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(edge_strain(two, {-0.005, -0.005})[0] == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("uniform scaling scales strain plus one by the factor") {
  FootMesh m = test::tetra_mesh({{0.1, 0.0, 0.0}, {0.1, 0.1, 0.0}, {-0.1, -0.05, 0.05}, {-0.05, 0.05, 0.1}},
                                {false, false, false, false});
  m = assign_radial_directions(m, Vec3::Zero());
  for (double s : {0.8, 1.0, 1.25}) {
    std::vector<double> u;
    for (const auto& v : m.vertices) u.push_back((s - 1.0) * v.norm());
    for (double e : edge_strain(m, u)) CHECK(std::abs((e + 1.0) - s) < 1e-12);
  }
}

TEST_CASE("single contact in a single bin gives a 1x1 heatmap") {
  GrfHeatmap h = grf_heatmap({contact(0.0, 3, 100.0)}, 0.01);
  REQUIRE(h.points.size() == 1);
  REQUIRE(h.bins() == 1);
  CHECK(h.values[0][0] == 100.0);
  CHECK(h.peak_cell == 100.0);
  CHECK(h.peak_total == 100.0);
}

TEST_CASE("heatmap row sums equal per-point force-time integrals") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> f(0.0, 50.0);
  const double dt = 0.002;
  std::vector<ContactRecord> log;
  std::map<int, double> integral;
  for (int n = 0; n < 400; ++n)
    for (int v = 0; v < 5; ++v) {
      if ((n + v) % 7 == 0) continue;
      ContactRecord r = contact(n * dt, v, f(rng));
      r.tangential = Vec3(0.1 * r.normal, -0.05 * r.normal, 0.0);
      log.push_back(r);
      integral[v] += std::sqrt(r.normal * r.normal + r.tangential.squaredNorm()) * dt;
    }
  GrfHeatmap h = grf_heatmap(log, 0.01);
  REQUIRE(h.points.size() == 5);
  for (std::size_t row = 0; row < 5; ++row) {
    double sum = 0.0;
    for (double v : h.values[row]) sum += v;
    CHECK(sum * dt == doctest::Approx(integral[h.points[row].vertex]).epsilon(1e-12));
  }
}

TEST_CASE("peak total force is the vector sum per foot and instant") {
  std::vector<ContactRecord> log{contact(0.0, 0, 10.0), contact(0.0, 1, 20.0), contact(0.002, 0, 25.0),
                                 contact(0.002, 0, 40.0, Vec3::Zero(), Side::Left)};
  GrfHeatmap h = grf_heatmap(log, 0.01);
  CHECK(h.peak_total == doctest::Approx(40.0));
  CHECK(h.peak_side == Side::Left);
  CHECK(h.peak_by_side[0] == doctest::Approx(30.0));
  CHECK(h.peak_cell == doctest::Approx(40.0));  // right vertex 0 sums to 35 over bin 0
}

TEST_CASE("zmp of a single contact is that point with zero margin") {
  ZmpResult z = zmp_and_margin({contact(0, 0, 30.0)});
  CHECK(z.supported);
  CHECK(z.zmp.norm() == 0.0);
  CHECK(z.margin == 0.0);
}

TEST_CASE("zmp of two equal contacts is the midpoint with zero margin") {
  ZmpResult z = zmp_and_margin({contact(0, 0, 30.0, Vec3(-0.1, 0, 0)), contact(0, 1, 30.0, Vec3(0.1, 0, 0))});
  CHECK(z.supported);
  CHECK(z.zmp.norm() < 1e-15);
  CHECK(std::abs(z.margin) < 1e-15);
}

TEST_CASE("zmp of a square of equal contacts is the centre with margin 0.1") {
  std::vector<ContactRecord> c;
  int k = 0;
  for (double x : {-0.1, 0.1})
    for (double y : {-0.1, 0.1}) c.push_back(contact(0, k++, 25.0, Vec3(x, y, 0)));
  ZmpResult z = zmp_and_margin(c);
  CHECK(z.zmp.norm() < 1e-15);
  CHECK(z.margin == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(z.active == 4);
  CHECK(z.total_normal == doctest::Approx(100.0));
}

TEST_CASE("insufficient normal force means no support") {
  ZmpResult z = zmp_and_margin({contact(0, 0, 10.0), contact(0, 1, 10.0, Vec3(0.1, 0, 0))});
  CHECK(!z.supported);
  CHECK(!z.diagnostic.empty());
  CHECK(!zmp_and_margin({}).supported);
}

TEST_CASE("convex hull matches brute-force predicates") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> count(1, 10);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Vec2> pts(static_cast<std::size_t>(count(rng)));
    for (auto& p : pts) p = Vec2(u(rng), u(rng));
    auto hull = convex_hull(pts);
    REQUIRE(!hull.empty());
    for (const auto& h : hull) CHECK(std::find(pts.begin(), pts.end(), h) != pts.end());
    if (hull.size() >= 3) {
      for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec2 a = hull[i], b = hull[(i + 1) % hull.size()], c = hull[(i + 2) % hull.size()];
        CHECK(cross(a, b, c) > 0.0);  // strictly convex, counter-clockwise
        for (const auto& p : pts) CHECK(cross(a, b, p) >= -1e-12);
      }
      // Every point not on the hull lies strictly inside some triangle fan of hull vertices.
      for (const auto& p : pts)
        CHECK(signed_hull_distance(hull, p) >= -1e-12);
    }
  }
}

TEST_CASE("signed hull distance matches the brute-force oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> count(3, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Vec2> pts(static_cast<std::size_t>(count(rng)));
    for (auto& p : pts) p = Vec2(u(rng), u(rng));
    auto hull = convex_hull(pts);
    if (hull.size() < 3) continue;
    const Vec2 q(1.5 * u(rng), 1.5 * u(rng));
    CHECK(std::abs(signed_hull_distance(hull, q) - brute_signed_distance(hull, q)) < 1e-9);
  }
}

TEST_CASE("degenerate hulls") {
  CHECK(convex_hull({Vec2(1, 1)}).size() == 1);
  CHECK(convex_hull({Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)}).size() == 2);
  CHECK(convex_hull({Vec2(0, 0), Vec2(0, 0)}).size() == 1);
  auto seg = convex_hull({Vec2(-0.1, 0), Vec2(0.1, 0)});
  CHECK(signed_hull_distance(seg, Vec2(0, 0)) == doctest::Approx(0.0));
  CHECK(signed_hull_distance(seg, Vec2(0, 0.3)) == doctest::Approx(-0.3));
}

TEST_CASE("kinetic energy of simple bodies") {
  SegmentState s;
  s.velocity = Vec3(1, 0, 0);
  CHECK(kinetic_energy({s}, {{2.0, Vec3::Zero()}}) == doctest::Approx(1.0).epsilon(1e-15));
  s.velocity = Vec3(1.38, 0, 0);
  CHECK(kinetic_energy({s}, {{70.0, Vec3::Zero()}}) == doctest::Approx(66.654).epsilon(1e-12));
  SegmentState spin;
  spin.omega_body = Vec3(0, 0, 2.0);
  CHECK(kinetic_energy({spin}, {{1.0, Vec3(0.1, 0.2, 0.3)}}) == doctest::Approx(0.5 * 0.3 * 4.0));
}

TEST_CASE("potential energy is zero at the datum and non-negative above it") {
  SkeletonModel m = default_skeleton();
  auto inertia = segment_inertias(m);
  REQUIRE(inertia.size() == m.bodies.size());
  std::vector<SegmentState> segs(m.bodies.size());
  CHECK(potential_energy(segs, inertia, 0.0, kGravity) == 0.0);
  for (auto& s : segs) s.com.z() = 0.5;
  CHECK(potential_energy(segs, inertia, 0.0, kGravity) == doctest::Approx(70.0 * kGravity * 0.5));
  CHECK(potential_energy(segs, inertia, 0.5, kGravity) == doctest::Approx(0.0));
}

TEST_CASE("energies reject missing inertia entries") {
  BodyFrame f;
  f.segments.resize(3);
  std::vector<SegmentInertia> inertia(2, {1.0, Vec3::Zero()});
  CHECK_THROWS_AS(energies({f}, inertia), Error);
  CHECK_THROWS_AS(kinetic_energy(f.segments, inertia), Error);
}

TEST_CASE("cv statistics") {
  CvStats a = cv_stats({1.0, 3.0});
  CHECK(a.mean == 2.0);
  CHECK(a.sd == 1.0);
  CHECK(a.cv == 0.5);
  CvStats c = cv_stats({4.0, 4.0, 4.0});
  CHECK(c.sd == 0.0);
  CHECK(c.cv == 0.0);
  CHECK_THROWS_AS(cv_stats({-1.0, 1.0}), Error);
  CHECK_THROWS_AS(cv_stats({}), Error);
}

TEST_CASE("strikes at 1.0 s and 2.1 s give one cycle") {
  const double rate = 500.0;
  std::vector<double> heel(1500, 0.0);
  for (std::size_t i = 0; i < heel.size(); ++i) {
    const double t = static_cast<double>(i) / rate;
    if ((t >= 1.0 - 1e-9 && t < 1.6) || (t >= 2.1 - 1e-9 && t < 2.7)) heel[i] = 100.0;
  }
  CycleSegmentation seg = segment_cycles(heel_series(heel, rate), EventParams{});
  REQUIRE(seg.strikes.size() == 2);
  CHECK(seg.strikes[0] == doctest::Approx(1.0));
  CHECK(seg.strikes[1] == doctest::Approx(2.1));
  REQUIRE(seg.cycles.size() == 1);
  CHECK(seg.cycles[0].start == doctest::Approx(1.0));
  CHECK(seg.cycles[0].end == doctest::Approx(2.1));
  CHECK(seg.cycles[0].phase(1.0) == doctest::Approx(0.0));
  CHECK(seg.cycles[0].phase(2.1) == doctest::Approx(100.0));
  REQUIRE(seg.stances.size() == 2);
  CHECK(seg.stances[0].end == doctest::Approx(1.598));
}

TEST_CASE("force chattering around the threshold within the debounce is one strike") {
  const double rate = 500.0;
  std::vector<double> heel(600, 0.0);
  for (std::size_t i = 200; i < 600; ++i) heel[i] = 100.0;
  for (std::size_t i = 200; i < 215; ++i) heel[i] = (i % 2) ? 25.0 : 15.0;  // 30 ms of chatter from 0.402 s
  auto strikes = detect_strikes(heel, rate, EventParams{});
  REQUIRE(strikes.size() == 1);
  CHECK(strikes[0] == doctest::Approx(0.402));
}

TEST_CASE("no strike leaves an empty list with a diagnostic") {
  CycleSegmentation seg = segment_cycles(heel_series(std::vector<double>(100, 5.0), 500.0), EventParams{});
  CHECK(seg.strikes.empty());
  CHECK(seg.cycles.empty());
  CHECK(!seg.diagnostic.empty());
}

TEST_CASE("region classification by rest position along the foot") {
  RegionBounds b;
  CHECK(classify_region(0.1, b) == Region::Heel);
  CHECK(classify_region(0.45, b) == Region::Midfoot);
  CHECK(classify_region(0.7, b) == Region::Forefoot);
  CHECK(classify_region(0.9, b) == Region::Toes);
  FootMesh m = generate_foot_mesh(MeshGenSpec{});
  auto regions = vertex_regions(m, b);
  REQUIRE(regions.size() == m.vertex_count());
  for (int r = 0; r < kRegionCount; ++r) CHECK(std::count(regions.begin(), regions.end(), static_cast<Region>(r)) > 0);
  RegionBounds bad;
  bad.midfoot = 0.2;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("regional series partition the total force") {
  FootMesh m = generate_foot_mesh(MeshGenSpec{});
  auto regions = vertex_regions(m, RegionBounds{});
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> vtx(0, static_cast<int>(m.vertex_count()) - 1);
  std::uniform_real_distribution<double> f(0.0, 30.0);
  std::vector<ContactRecord> log;
  for (int n = 0; n < 200; ++n)
    for (int k = 0; k < 20; ++k) log.push_back(contact(n * 0.002, vtx(rng), f(rng)));
  RegionalSeries s = regional_series(log, Side::Right, regions, 500.0, 200);
  for (std::size_t i = 0; i < s.size(); ++i) {
    double sum = 0.0;
    for (double v : s.force[i]) sum += v;
    CHECK(std::abs(sum - s.total[i]) <= 1e-9);
  }
}

TEST_CASE("all-heel contacts leave the forefoot curve at zero") {
  const double rate = 500.0;
  std::vector<ContactRecord> log;
  for (int n = 0; n < 1500; ++n) {
    const double t = n / rate;
    if ((t >= 0.2 && t < 0.8) || (t >= 1.3 && t < 1.9)) log.push_back(contact(t, 0, 300.0));
  }
  std::vector<Region> map{Region::Heel};
  RegionalSeries s = regional_series(log, Side::Right, map, rate, 1500);
  CycleSegmentation seg = segment_cycles(s, EventParams{});
  REQUIRE(seg.cycles.size() == 1);
  RegionalCurves c = regional_forces(s, seg.cycles);
  REQUIRE(c.mean[2].size() == 101);
  for (double v : c.mean[2]) CHECK(v == 0.0);
  for (double v : c.mean[3]) CHECK(v == 0.0);
  CHECK(c.mean[0][0] == doctest::Approx(300.0));
  for (std::size_t k = 0; k < 101; ++k) CHECK(std::abs(c.mean[0][k] - c.total_mean[k]) <= 1e-9);
}

TEST_CASE("unmapped contact vertices are rejected") {
  std::vector<ContactRecord> log{contact(0.0, 5, 10.0)};
  CHECK_THROWS_AS(regional_series(log, Side::Right, std::vector<Region>(3, Region::Heel), 500.0, 10), Error);
}

TEST_CASE("stance contact counts are distinct points per stance") {
  std::vector<ContactRecord> log;
  for (int v = 0; v < 4; ++v) log.push_back(contact(0.1, v, 5.0));
  log.push_back(contact(0.1, 0, 5.0));
  log.push_back(contact(0.2, 9, 0.0));  // zero force does not count
  log.push_back(contact(0.9, 7, 5.0));
  log.push_back(contact(0.5, 8, 5.0));  // between stances
  log.push_back(contact(0.1, 6, 5.0, Vec3::Zero(), Side::Left));
  std::vector<Stance> st{{0.05, 0.3}, {0.8, 1.0}};
  auto counts = stance_contact_counts(log, Side::Right, st);
  REQUIRE(counts.size() == 2);
  CHECK(counts[0] == 4);
  CHECK(counts[1] == 1);
}

TEST_CASE("analysis configuration validation") {
  AnalysisConfig c;
  CHECK_NOTHROW(c.validate());
  c.phase_points = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = AnalysisConfig{};
  c.late_stance = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  EventParams e;
  e.debounce = -1.0;
  CHECK_THROWS_AS(e.validate(), Error);
}

}  // TEST_SUITE
