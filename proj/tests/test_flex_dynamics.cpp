#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "flex_dynamics.hpp"
#include "ground_contact.hpp"

using namespace footsim;

namespace {

// Two free vertices on the x axis joined by one edge, radial directions
// pointing outward along the edge.
FootMesh two_vertex_mesh() {
  FootMesh m;
  m.vertices = {{-0.05, 0.0, 0.0}, {0.05, 0.0, 0.0}};
  m.edges = {{0, 1, 0.1}};
  m.pinned = {false, false};
  m.radial_dir = {{-1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
  m.bbox_min = m.vertices[0];
  m.bbox_max = m.vertices[1];
  return m;
}

SolverParams no_gravity() {
  SolverParams p;
  p.gravity = 0.0;
  return p;
}

}  // namespace

TEST_SUITE("flex_dynamics") {

TEST_CASE("impedance endpoints and midpoint") {
  SolverParams p;
  CHECK(std::abs(impedance(0.0, p) - 0.1) <= 1e-12);
  CHECK(std::abs(impedance(0.001, p) - 0.9) <= 1e-12);
  CHECK(std::abs(impedance(0.5, p) - 0.9) <= 1e-12);
  CHECK(std::abs(impedance(0.0005, p) - 0.5) <= 1e-12);
}

TEST_CASE("impedance matches the two-branch power polynomial") {
  SolverParams p;
  for (double x : {0.1, 0.25, 0.4, 0.6, 0.75, 0.9}) {
    const double y = x <= 0.5 ? 2.0 * x * x : 1.0 - 2.0 * (1.0 - x) * (1.0 - x);
    CHECK(std::abs(impedance(x * 0.001, p) - (0.1 + 0.8 * y)) < 1e-12);
  }
}

TEST_CASE("impedance is monotone non-decreasing") {
  SolverParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.0015);
  for (int k = 0; k < 10000; ++k) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    CHECK(impedance(a, p) <= impedance(b, p));
  }
}

TEST_CASE("reference acceleration in negative format") {
  SolverParams p;
  CHECK(reference_accel(1e-3, 0.0, p) == -50.0);
  CHECK(reference_accel(0.0, 0.0, p) == 0.0);
  CHECK(reference_accel(0.0, 0.1, p) == doctest::Approx(-100.0).epsilon(1e-15));
  CHECK(p.stiffness() == 5e4);
  CHECK(p.damping() == 1e3);
}

TEST_CASE("solver parameter validation") {
  SolverParams p;
  CHECK_NOTHROW(p.validate());
  p.timestep = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = SolverParams{};
  p.impedance.d_min = 0.95;
  CHECK_THROWS_AS(p.validate(), Error);
  p = SolverParams{};
  p.impedance.midpoint = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = SolverParams{};
  p.impedance.power = 0.5;
  CHECK_THROWS_AS(p.validate(), Error);
  p = SolverParams{};
  p.impedance.width = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("edges at rest length produce no force") {
  FootMesh m = generate_foot_mesh(MeshGenSpec{});
  FlexState s = rest_state(m, Pose{});
  auto f = edge_constraint_forces(m, s, SolverParams{});
  for (double x : f.force) CHECK(x == 0.0);
}

TEST_CASE("stretched edge pulls both endpoints together equally") {
  FootMesh m = two_vertex_mesh();
  FlexState s = rest_state(m, Pose{});
  s.u = {0.0005, 0.0005};  // L = L0 + 1 mm
  SolverParams p;
  auto f = edge_constraint_forces(m, s, p);
  CHECK(f.force[0] < 0.0);
  CHECK(f.force[1] < 0.0);
  CHECK(f.force[0] == doctest::Approx(f.force[1]).epsilon(1e-15));
  // Saturated impedance, harmonic-mean mass 0.05 kg, |a_ref| = 50 m/s^2.
  CHECK(std::abs(f.force[0]) == doctest::Approx(0.9 * 0.05 * 50.0).epsilon(1e-12));
}

TEST_CASE("compressed edge pushes the endpoints apart") {
  FootMesh m = two_vertex_mesh();
  FlexState s = rest_state(m, Pose{});
  s.u = {-0.0005, -0.0005};
  auto f = edge_constraint_forces(m, s, SolverParams{});
  CHECK(f.force[0] > 0.0);
  CHECK(f.force[1] > 0.0);
}

TEST_CASE("stretched edge shortens on the next step") {
  FootMesh m = two_vertex_mesh();
  FlexState s = rest_state(m, Pose{});
  s.u = {0.0005, 0.0005};
  SolverParams p = no_gravity();
  const double before = (body_position(m, s, 1) - body_position(m, s, 0)).norm();
  FlexState n = step(m, s, ContactLoad::zeros(2), p, Pose{});
  const double after = (body_position(m, n, 1) - body_position(m, n, 0)).norm();
  CHECK(after < before);
  // The constrained pair settles back to its rest length.
  for (int k = 0; k < 2000; ++k) n = step(m, n, ContactLoad::zeros(2), p, Pose{});
  CHECK(std::abs((body_position(m, n, 1) - body_position(m, n, 0)).norm() - 0.1) < 1e-6);
}

TEST_CASE("zero forces and velocity leave the state unchanged except the pose") {
  FootMesh m = generate_foot_mesh(MeshGenSpec{});
  FlexState s = rest_state(m, Pose{});
  Pose next{Vec3(0.1, 0.2, 0.3), Quat(Eigen::AngleAxisd(0.2, Vec3::UnitZ()))};
  FlexState n = step(m, s, ContactLoad::zeros(m.vertex_count()), no_gravity(), next);
  CHECK(n.u == s.u);
  CHECK(n.udot == s.udot);
  CHECK((n.pose.position - next.position).norm() == 0.0);
  CHECK(n.pose.orientation.isApprox(next.orientation));
  CHECK(n.time == doctest::Approx(0.002));
  CHECK(n.step == 1);
}

TEST_CASE("constant radial force for one step matches closed-form Euler") {
  FootMesh m = two_vertex_mesh();
  m.edges.clear();
  FlexState s = rest_state(m, Pose{});
  SolverParams p = no_gravity();
  ContactLoad load = ContactLoad::zeros(2);
  const double f = 3.0;
  load.force[1] = f * m.radial_dir[1];
  FlexState n = step(m, s, load, p, Pose{});
  const double v = f / m.vertex_mass * p.timestep;
  CHECK(n.udot[1] == doctest::Approx(v).epsilon(1e-14));
  CHECK(n.u[1] == doctest::Approx(v * p.timestep).epsilon(1e-14));
  CHECK(n.u[0] == 0.0);
}

TEST_CASE("gravity acts through the radial projection") {
  FootMesh m = two_vertex_mesh();
  m.edges.clear();
  m.radial_dir = {{0.0, 0.0, -1.0}, {1.0, 0.0, 0.0}};
  FlexState n = step(m, rest_state(m, Pose{}), ContactLoad::zeros(2), SolverParams{}, Pose{});
  CHECK(n.udot[0] == doctest::Approx(kGravity * 0.002).epsilon(1e-14));
  CHECK(n.udot[1] == 0.0);
}

TEST_CASE("non-finite state aborts with the step index") {
  FootMesh m = two_vertex_mesh();
  FlexState s = rest_state(m, Pose{});
  s.udot[0] = std::numeric_limits<double>::infinity();
  s.step = 41;
  try {
    step(m, s, ContactLoad::zeros(2), SolverParams{}, Pose{});
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(e.step() == 42);
  }
}

TEST_CASE("degenerate edges are skipped and counted") {
  FootMesh m = two_vertex_mesh();
  FlexState s = rest_state(m, Pose{});
  s.u = {-0.05, -0.05};  // both endpoints at the origin
  ForceDiagnostics diag;
  auto f = edge_constraint_forces(m, s, SolverParams{}, &diag);
  CHECK(diag.degenerate == 1);
  CHECK(std::isfinite(f.force[0]));
  CHECK(std::isfinite(f.force[1]));
}

TEST_CASE("generalized forces are capped and the cap is logged") {
  FootMesh m = two_vertex_mesh();
  FlexState s = rest_state(m, Pose{});
  s.u = {0.01, 0.01};
  SolverParams p = no_gravity();
  p.force_cap = 1.0;
  ForceDiagnostics diag;
  FlexState n = step(m, s, ContactLoad::zeros(2), p, Pose{}, &diag);
  CHECK(diag.capped == 2);
  // |f| = cap: velocity change bounded by cap/m * dt (damping only slows it).
  CHECK(std::abs(n.udot[0]) <= 1.0 / m.vertex_mass * p.timestep + 1e-15);
}

TEST_CASE("elastic edges replace the constraint when disabled") {
  FootMesh m = two_vertex_mesh();
  FlexState s = rest_state(m, Pose{});
  s.u = {0.0005, 0.0005};
  SolverParams p;
  p.edge_constraint_enabled = false;
  auto f = edge_constraint_forces(m, s, p);
  const double k = p.young_modulus * kPi * m.vertex_radius * m.vertex_radius / 0.1;
  CHECK(f.force[0] == doctest::Approx(-k * 0.001).epsilon(1e-12));
}

TEST_CASE("standing foot on the ground stays bounded for 10 s") {
  FootMesh m = generate_foot_mesh(MeshGenSpec{});
  SolverParams p;
  FrictionParams fr;
  // Frame held so the foot spheres just touch the ground.
  Pose pose{Vec3(0.0, 0.0, m.vertex_radius - m.bbox_min.z()), Quat::Identity()};
  FlexState s = rest_state(m, pose);
  std::vector<Vec3> pinned_rest;
  for (std::size_t i = 0; i < m.vertex_count(); ++i) pinned_rest.push_back(body_position(m, s, i));
  double max_u = 0.0, max_collinear = 0.0;
  for (int k = 0; k < 5000; ++k) {
    FlexContactResult c = flex_contacts(m, s, Twist{}, p, fr);
    s = step(m, s, c.load, p, pose);
    for (std::size_t i = 0; i < m.vertex_count(); ++i) {
      REQUIRE(std::isfinite(s.u[i]));
      max_u = std::max(max_u, std::abs(s.u[i]));
      const Vec3 disp = body_position(m, s, i) - m.vertices[i];
      if (m.pinned[i]) {
        CHECK(body_position(m, s, i) == pinned_rest[i]);
      } else {
        max_collinear = std::max(max_collinear, (disp - disp.dot(m.radial_dir[i]) * m.radial_dir[i]).norm());
      }
    }
  }
  CHECK(max_u < 0.02);
  CHECK(max_collinear < 1e-12);
}

TEST_CASE("stepping is deterministic") {
  FootMesh m = generate_foot_mesh(MeshGenSpec{});
  SolverParams p;
  FrictionParams fr;
  Pose pose{Vec3(0.0, 0.0, 0.002 - m.bbox_min.z()), Quat::Identity()};
  auto run = [&] {
    FlexState s = rest_state(m, pose);
    for (int k = 0; k < 300; ++k) s = step(m, s, flex_contacts(m, s, Twist{}, p, fr).load, p, pose);
    return s;
  };
  FlexState a = run(), b = run();
  CHECK(a.u == b.u);
  CHECK(a.udot == b.udot);
}

}  // TEST_SUITE
