#pragma once

#include <span>
#include <vector>

#include "foot_mesh.hpp"
#include "geometry.hpp"

namespace footsim {

// Five-parameter smooth step (d_min, d_max, width, midpoint, power).
struct ImpedanceParams {
  double d_min = 0.1;
  double d_max = 0.9;
  double width = 0.001;
  double midpoint = 0.5;
  double power = 2.0;
};

struct SolverParams {
  double timestep = 0.002;
  double young_modulus = 1.0e5;
  double poisson_ratio = 0.49;
  // Negative format: (-stiffness, -damping).
  double accel_ref_stiffness = -5.0e4;
  double accel_ref_damping = -1.0e3;
  ImpedanceParams impedance;
  bool edge_constraint_enabled = true;
  double gravity = kGravity;
  double force_cap = 1.0e5;

  double stiffness() const { return -accel_ref_stiffness; }
  double damping() const { return -accel_ref_damping; }
  void validate() const;
};

double impedance(double violation, const SolverParams& params);

// a_ref = -(k * violation + b * rate) with (k, b) the negated stored pair.
double reference_accel(double violation, double violation_rate, const SolverParams& params);

// Radial displacement state of every vertex (pinned entries stay zero)
// together with the pose of the attachment frame.
struct FlexState {
  std::vector<double> u;
  std::vector<double> udot;
  Pose pose;
  double time = 0.0;
  long step = 0;
};

FlexState rest_state(const FootMesh& mesh, const Pose& pose, double time = 0.0);

inline Vec3 body_position(const FootMesh& mesh, const FlexState& s, std::size_t i) {
  return mesh.vertices[i] + s.u[i] * mesh.radial_dir[i];
}
inline Vec3 world_position(const FootMesh& mesh, const FlexState& s, std::size_t i) {
  return s.pose.apply(body_position(mesh, s, i));
}

struct ForceDiagnostics {
  long capped = 0;      // generalized forces clipped at the cap
  long degenerate = 0;  // edges shorter than 1e-9 m
};

// Generalized radial forces on each vertex DoF, and the diagonal of the
// force's derivative with respect to that DoF's own velocity (damping >= 0).
struct GeneralizedForces {
  std::vector<double> force;
  std::vector<double> damping;
};

GeneralizedForces edge_constraint_forces(const FootMesh& mesh, const FlexState& state,
                                         const SolverParams& params, ForceDiagnostics* diag = nullptr);

// External load from contacts: world force per vertex, and the radial
// damping coefficient that force contributes (for the velocity update).
struct ContactLoad {
  std::vector<Vec3> force;
  std::vector<double> radial_damping;

  static ContactLoad zeros(std::size_t n) { return {std::vector<Vec3>(n, Vec3::Zero()), std::vector<double>(n, 0.0)}; }
};

// Semi-implicit Euler on the radial DoFs. Velocity-proportional terms of
// each DoF's own force are taken at the new velocity so the constraint
// damping at 500 Hz stays stable. Throws NumericalError on non-finite state.
FlexState step(const FootMesh& mesh, const FlexState& state, const ContactLoad& contacts,
               const SolverParams& params, const Pose& next_frame_pose, ForceDiagnostics* diag = nullptr);

}  // namespace footsim
