#pragma once

#include <string>
#include <vector>

#include "flex_dynamics.hpp"
#include "foot_mesh.hpp"
#include "geometry.hpp"

namespace footsim {

struct FrictionParams {
  double mu = 1.0;
  double slope = 1.0e3;  // regularization, N s / m
};

struct ContactRecord {
  double time = 0.0;
  Side side = Side::Right;
  int vertex = 0;  // mesh vertex, or sphere index for the rigid layout
  Vec3 position = Vec3::Zero();
  double normal = 0.0;
  Vec3 tangential = Vec3::Zero();  // z component is always zero
  double penetration = 0.0;
};

struct ContactCandidate {
  int vertex = 0;
  double penetration = 0.0;
  Vec3 position = Vec3::Zero();  // world centre of the vertex sphere
  Vec3 velocity = Vec3::Zero();  // world velocity of the sphere centre
};

// Vertex spheres below the ground plane z = 0. `frame_twist` is the
// attachment frame's velocity.
std::vector<ContactCandidate> detect_contacts(const FootMesh& mesh, const FlexState& state,
                                              const Twist& frame_twist);

struct ContactForce {
  double normal = 0.0;
  Vec3 tangential = Vec3::Zero();
  double normal_damping = 0.0;      // -dN / d(penetration rate) is negative of this
  double tangential_damping = 0.0;  // slope, or secant slope when sliding
};

ContactForce contact_force(double penetration, double penetration_rate, const Vec3& tangential_velocity,
                           const SolverParams& solver, const FrictionParams& friction, double effective_mass);

// Contact forces on every vertex of one deformable foot, as records and as
// the per-vertex load consumed by the flex integrator.
struct FlexContactResult {
  std::vector<ContactRecord> records;
  ContactLoad load;
};

FlexContactResult flex_contacts(const FootMesh& mesh, const FlexState& state, const Twist& frame_twist,
                                const SolverParams& solver, const FrictionParams& friction);

// Fixed spheres on the rigid baseline foot, in the foot mesh frame.
struct SphereLayout {
  std::vector<Vec3> centers;
  std::vector<std::string> names;
  double radius = 0.005;
  double effective_mass = 1.0;
};

// Six spheres under heel, midfoot, metatarsal heads and hallux, placed on
// the plantar surface of `mesh`.
SphereLayout default_sphere_layout(const FootMesh& mesh, double effective_mass = 1.0);
// Four spheres at heel and forefoot corners.
SphereLayout four_sphere_layout(const FootMesh& mesh, double effective_mass = 1.0);

// Lowest point of the mesh surface along the vertical line through (x, y)
// in the mesh frame; NaN if the line misses.
double plantar_height(const FootMesh& mesh, double x, double y);

std::vector<ContactRecord> rigid_baseline_contacts(const Pose& box_pose, const Twist& box_twist,
                                                   const SphereLayout& layout, const SolverParams& solver,
                                                   const FrictionParams& friction, double time, Side side);

}  // namespace footsim
