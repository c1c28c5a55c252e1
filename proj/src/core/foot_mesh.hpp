#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace footsim {

enum class Side { Right, Left };

inline const char* side_name(Side s) { return s == Side::Right ? "right" : "left"; }
Side parse_side(const std::string& s);

enum class RadialMode { BodyCenter, SurfaceNormal };

struct Edge {
  int a = 0;
  int b = 0;
  double rest_length = 0.0;
};

// Rest geometry of one deformable foot in its body frame (x along the
// foot from heel to toe, y lateral-left, z up from the plantar surface).
struct FootMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Edge> edges;  // sorted by (a, b) with a < b
  std::vector<bool> pinned;
  std::vector<Vec3> radial_dir;  // zero for pinned vertices
  double vertex_radius = 0.005;
  double vertex_mass = 0.05;
  Side side = Side::Right;
  Vec3 bbox_min = Vec3::Zero();
  Vec3 bbox_max = Vec3::Zero();

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t pinned_count() const;
  double length() const { return bbox_max.x() - bbox_min.x(); }
};

struct MeshGenSpec {
  double length = 0.298;
  double width = 0.116;
  double height = 0.12;
  int target_vertices = 223;
  int target_triangles = 426;
  // Shaping, all dimensionless.
  double heel_width = 0.62;       // heel half-width relative to the widest section
  double forefoot_position = 0.7; // widest section, fraction of length
  double ankle_position = 0.3;    // dorsum stays at full height behind this fraction
  double toe_height = 0.3;        // dorsum height at the toe tip, fraction of height
  double heel_rocker = 0.10;      // plantar rise at the heel tip, fraction of height
  double toe_rocker = 0.16;       // plantar rise at the toe tip, fraction of height
  double plantar_density = 1.6;   // relative vertex density on the plantar cap
  double pinned_fraction = 0.25;  // top fraction of height that is pinned
  std::uint64_t seed = 1;
  double vertex_radius = 0.005;
  double vertex_mass = 0.05;
  RadialMode radial_mode = RadialMode::BodyCenter;
};

FootMesh generate_foot_mesh(const MeshGenSpec& spec);

FootMesh mirror_foot(const FootMesh& mesh);

// Free vertices get normalize(rest - origin); pinned vertices get zero.
FootMesh assign_radial_directions(const FootMesh& mesh, const Vec3& origin);
// Area-weighted outward vertex normals for free vertices.
FootMesh assign_normal_directions(const FootMesh& mesh);

Vec3 pinned_centroid(const FootMesh& mesh);

// Unique edges of a triangle list with rest lengths from `vertices`.
std::vector<Edge> build_edges(const std::vector<Vec3>& vertices,
                              const std::vector<std::array<int, 3>>& triangles);

// Throws Error(InvalidArgument) naming the first violated invariant.
void validate_mesh(const FootMesh& mesh);

// OBJ subset ("v x y z", "f i j k", 1-based) plus CSV sidecar
// "vertex_index,pinned,rdx,rdy,rdz". `header` lines are written as comments.
void save_mesh(const FootMesh& mesh, const std::string& obj_path, const std::string& attr_path,
               const std::vector<std::string>& header = {});
FootMesh load_mesh(const std::string& obj_path, const std::string& attr_path);

std::string mesh_to_obj(const FootMesh& mesh, const std::vector<std::string>& header = {});
std::string mesh_to_attributes(const FootMesh& mesh, const std::vector<std::string>& header = {});
FootMesh parse_mesh(const std::string& obj_text, const std::string& attr_text,
                    const std::string& obj_source = "mesh.obj",
                    const std::string& attr_source = "mesh.attr.csv");

}  // namespace footsim
