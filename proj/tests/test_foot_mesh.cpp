#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "error.hpp"
#include "foot_mesh.hpp"
#include "test_util.hpp"

using namespace footsim;

TEST_SUITE("foot_mesh") {

TEST_CASE("default spec matches the target counts and bounding box") {
  MeshGenSpec spec;  // 0.298 x 0.116 x 0.12, 223 vertices, 426 triangles, seed 1
  FootMesh m = generate_foot_mesh(spec);
  CHECK(std::abs(static_cast<int>(m.vertices.size()) - 223) <= 11);
  CHECK(std::abs(static_cast<int>(m.triangles.size()) - 426) <= 21);
  Vec3 lo = m.vertices.front(), hi = lo;
  for (const auto& v : m.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  CHECK(std::abs((hi - lo).x() - 0.298) < 1e-6);
  CHECK(std::abs((hi - lo).y() - 0.116) < 1e-6);
  CHECK(std::abs((hi - lo).z() - 0.12) < 1e-6);
  CHECK_NOTHROW(validate_mesh(m));
}

TEST_CASE("minimal spec gives a tetrahedron") {
  MeshGenSpec spec;
  spec.target_vertices = 4;
  spec.target_triangles = 4;
  FootMesh m = generate_foot_mesh(spec);
  CHECK(m.vertices.size() == 4);
  CHECK(m.triangles.size() == 4);
  CHECK(m.edges.size() == 6);
  CHECK(m.pinned_count() >= 1);
}

TEST_CASE("infeasible counts are rejected with a diagnostic") {
  MeshGenSpec spec;
  spec.target_vertices = 3;
  spec.target_triangles = 2;
  CHECK_THROWS_WITH_AS(generate_foot_mesh(spec), doctest::Contains("at least 4 vertices"), Error);
  spec.target_vertices = 223;
  spec.target_triangles = 100;
  CHECK_THROWS_WITH_AS(generate_foot_mesh(spec), doctest::Contains("infeasible"), Error);
}

TEST_CASE("generation is deterministic for a seed") {
  MeshGenSpec spec;
  FootMesh a = generate_foot_mesh(spec);
  FootMesh b = generate_foot_mesh(spec);
  CHECK(mesh_to_obj(a) == mesh_to_obj(b));
  CHECK(mesh_to_attributes(a) == mesh_to_attributes(b));
  REQUIRE(a.vertices.size() == b.vertices.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) CHECK((a.vertices[i] - b.vertices[i]).norm() == 0.0);
}

TEST_CASE("mesh invariants hold for the generated foot") {
  FootMesh m = generate_foot_mesh(MeshGenSpec{});
  std::set<std::pair<int, int>> tri_edges;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) {
      int a = t[static_cast<std::size_t>(k)], b = t[static_cast<std::size_t>((k + 1) % 3)];
      tri_edges.insert({std::min(a, b), std::max(a, b)});
    }
  std::set<std::pair<int, int>> seen;
  for (const auto& e : m.edges) {
    CHECK(e.rest_length > 0.0);
    CHECK(tri_edges.count({e.a, e.b}) == 1);
    CHECK(seen.insert({e.a, e.b}).second);
  }
  CHECK(seen.size() == tri_edges.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    if (m.pinned[i]) {
      CHECK(m.radial_dir[i].norm() == 0.0);
    } else {
      CHECK(std::abs(m.radial_dir[i].norm() - 1.0) < 1e-9);
    }
    CHECK((m.vertices[i].array() >= m.bbox_min.array() - 1e-12).all());
    CHECK((m.vertices[i].array() <= m.bbox_max.array() + 1e-12).all());
  }
  CHECK(m.pinned_count() > 0);
  // Euler characteristic of a closed genus-0 surface.
  const long chi = static_cast<long>(m.vertices.size()) - static_cast<long>(m.edges.size()) +
                   static_cast<long>(m.triangles.size());
  CHECK(chi == 2);
}

TEST_CASE("pinned set is the dorsal top quarter and the plantar surface is lowest") {
  MeshGenSpec spec;
  FootMesh m = generate_foot_mesh(spec);
  const double cut = m.bbox_max.z() - spec.pinned_fraction * spec.height;
  for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK(m.pinned[i] == (m.vertices[i].z() >= cut - 1e-12));
  double min_pinned = 1e9, min_free = 1e9;
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    (m.pinned[i] ? min_pinned : min_free) = std::min(m.pinned[i] ? min_pinned : min_free, m.vertices[i].z());
  CHECK(min_free < min_pinned);
  CHECK(std::abs(min_free - m.bbox_min.z()) < 1e-12);
}

TEST_CASE("mirror reflects y, flips the side and keeps topology") {
  FootMesh r = generate_foot_mesh(MeshGenSpec{});
  FootMesh l = mirror_foot(r);
  CHECK(l.side == Side::Left);
  CHECK(l.vertices.size() == 223);
  REQUIRE(l.vertices.size() == r.vertices.size());
  for (std::size_t i = 0; i < r.vertices.size(); ++i) {
    CHECK(l.vertices[i].x() == r.vertices[i].x());
    CHECK(l.vertices[i].y() == -r.vertices[i].y());
    CHECK(l.vertices[i].z() == r.vertices[i].z());
    CHECK(l.pinned[i] == r.pinned[i]);
  }
  REQUIRE(l.edges.size() == r.edges.size());
  for (std::size_t e = 0; e < r.edges.size(); ++e) {
    CHECK(l.edges[e].a == r.edges[e].a);
    CHECK(l.edges[e].b == r.edges[e].b);
    CHECK(l.edges[e].rest_length == r.edges[e].rest_length);
  }
  CHECK(l.triangles.size() == r.triangles.size());
  CHECK_NOTHROW(validate_mesh(l));
}

TEST_CASE("mirror is an involution and an isometry") {
  FootMesh r = generate_foot_mesh(MeshGenSpec{});
  FootMesh l = mirror_foot(r);
  FootMesh rr = mirror_foot(l);
  CHECK(rr.side == Side::Right);
  for (std::size_t i = 0; i < r.vertices.size(); ++i) CHECK((rr.vertices[i] - r.vertices[i]).norm() < 1e-12);
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, r.vertices.size() - 1);
  for (int k = 0; k < 500; ++k) {
    const std::size_t i = pick(rng), j = pick(rng);
    const double dr = (r.vertices[i] - r.vertices[j]).norm();
    const double dl = (l.vertices[i] - l.vertices[j]).norm();
    CHECK(std::abs(dr - dl) < 1e-12);
  }
}

TEST_CASE("radial directions point away from the origin") {
  FootMesh m = test::tetra_mesh({{0.1, 0.0, 0.0}, {0.1, 0.1, 0.0}, {-0.1, -0.05, 0.05}, {-0.05, 0.05, 0.1}},
                                {false, false, false, true});
  FootMesh d = assign_radial_directions(m, Vec3::Zero());
  CHECK((d.radial_dir[0] - Vec3(1, 0, 0)).norm() < 1e-12);
  CHECK(std::abs(d.radial_dir[1].x() - 0.7071) < 1e-4);
  CHECK(std::abs(d.radial_dir[1].y() - 0.7071) < 1e-4);
  CHECK(d.radial_dir[1].z() == 0.0);
  CHECK(d.radial_dir[3].norm() == 0.0);  // pinned
  for (int i = 0; i < 3; ++i) CHECK(std::abs(d.radial_dir[static_cast<std::size_t>(i)].norm() - 1.0) < 1e-9);
  FootMesh g = assign_radial_directions(generate_foot_mesh(MeshGenSpec{}), Vec3(0.1, 0.0, 0.05));
  for (std::size_t i = 0; i < g.vertices.size(); ++i)
    if (!g.pinned[i]) CHECK(std::abs(g.radial_dir[i].norm() - 1.0) < 1e-9);
}

TEST_CASE("vertex at the radial origin is rejected") {
  FootMesh m = test::tetra_mesh({{0.0, 0.0, 0.0}, {0.1, 0.1, 0.0}, {-0.1, -0.05, 0.05}, {-0.05, 0.05, 0.1}},
                                {false, false, false, true});
  CHECK_THROWS_AS(assign_radial_directions(m, Vec3::Zero()), Error);
}

TEST_CASE("surface-normal radial mode gives unit outward directions") {
  MeshGenSpec spec;
  spec.radial_mode = RadialMode::SurfaceNormal;
  FootMesh m = generate_foot_mesh(spec);
  const Vec3 c = 0.5 * (m.bbox_min + m.bbox_max);
  int outward = 0, free = 0;
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    if (m.pinned[i]) continue;
    ++free;
    CHECK(std::abs(m.radial_dir[i].norm() - 1.0) < 1e-9);
    if (m.radial_dir[i].dot(m.vertices[i] - c) > 0) ++outward;
  }
  CHECK(outward > 0.9 * free);
}

TEST_CASE("save and load round-trip") {
  FootMesh m = generate_foot_mesh(MeshGenSpec{});
  test::TempDir dir;
  const auto obj = dir.file("m.obj"), attr = dir.file("m.attr.csv");
  save_mesh(m, obj, attr, {"config_hash abc"});
  FootMesh back = load_mesh(obj, attr);
  REQUIRE(back.vertices.size() == m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    CHECK((back.vertices[i] - m.vertices[i]).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((back.radial_dir[i] - m.radial_dir[i]).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(back.pinned[i] == m.pinned[i]);
  }
  CHECK(back.triangles == m.triangles);
  CHECK(back.edges.size() == m.edges.size());
  CHECK(back.side == m.side);
  // A second save of the loaded mesh is byte-identical.
  CHECK(mesh_to_obj(back) == mesh_to_obj(m));
  CHECK(mesh_to_attributes(back) == mesh_to_attributes(m));
}

TEST_CASE("face index 0 is an error at that line") {
  FootMesh m = generate_foot_mesh(MeshGenSpec{});
  const std::string attr = mesh_to_attributes(m);
  std::string obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 0 2 3\n";
  try {
    parse_mesh(obj, attr, "bad.obj", "bad.attr.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
    CHECK(std::string(e.what()).find("out of range") != std::string::npos);
  }
}

TEST_CASE("quad face is rejected") {
  std::string obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 2 3 4\n";
  try {
    parse_mesh(obj, "vertex_index,pinned,rdx,rdy,rdz\n", "quad.obj", "quad.attr.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("non-triangular face") != std::string::npos);
    CHECK(e.line() == 5);
  }
}

TEST_CASE("malformed vertex record names the line") {
  std::string obj = "v 0 0 0\nv 1 0\n";
  try {
    parse_mesh(obj, "", "m.obj", "m.attr.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

}  // TEST_SUITE
