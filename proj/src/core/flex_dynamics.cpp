#include "flex_dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace footsim {

void SolverParams::validate() const {
  const auto& imp = impedance;
  require(timestep > 0, "solver.timestep must be positive");
  require(0.0 <= imp.d_min && imp.d_min <= imp.d_max && imp.d_max <= 1.0,
          "impedance requires 0 <= d_min <= d_max <= 1");
  require(imp.width > 0, "impedance width must be positive");
  require(imp.midpoint > 0 && imp.midpoint < 1, "impedance midpoint must be in (0, 1)");
  require(imp.power >= 1, "impedance power must be >= 1");
  require(accel_ref_stiffness <= 0 && accel_ref_damping <= 0,
          "acceleration reference must be in negative format (-stiffness, -damping)");
  require(force_cap > 0, "force cap must be positive");
}

double impedance(double violation, const SolverParams& params) {
  const auto& p = params.impedance;
  double x = violation / p.width;
  if (!(x > 0)) return p.d_min;
  if (x >= 1.0) return p.d_max;
  double y;
  if (x <= p.midpoint) {
    y = std::pow(p.midpoint, 1.0 - p.power) * std::pow(x, p.power);
  } else {
    y = 1.0 - std::pow(1.0 - p.midpoint, 1.0 - p.power) * std::pow(1.0 - x, p.power);
  }
  return p.d_min + y * (p.d_max - p.d_min);
}

double reference_accel(double violation, double violation_rate, const SolverParams& params) {
  return params.accel_ref_stiffness * violation + params.accel_ref_damping * violation_rate;
}

FlexState rest_state(const FootMesh& mesh, const Pose& pose, double time) {
  FlexState s;
  s.u.assign(mesh.vertex_count(), 0.0);
  s.udot.assign(mesh.vertex_count(), 0.0);
  s.pose = pose;
  s.time = time;
  return s;
}

GeneralizedForces edge_constraint_forces(const FootMesh& mesh, const FlexState& state,
                                         const SolverParams& params, ForceDiagnostics* diag) {
  const std::size_t n = mesh.vertex_count();
  GeneralizedForces out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const double m_eff = 2.0 * mesh.vertex_mass * mesh.vertex_mass / (mesh.vertex_mass + mesh.vertex_mass);
  const double elastic_area = kPi * mesh.vertex_radius * mesh.vertex_radius;

  for (const auto& e : mesh.edges) {
    const auto a = static_cast<std::size_t>(e.a);
    const auto b = static_cast<std::size_t>(e.b);
    Vec3 d = body_position(mesh, state, b) - body_position(mesh, state, a);
    double len = d.norm();
    if (len < 1e-9) {
      if (diag) ++diag->degenerate;
      continue;
    }
    Vec3 dir = d / len;
    const double pa = dir.dot(mesh.radial_dir[a]);
    const double pb = dir.dot(mesh.radial_dir[b]);
    const double r = len - e.rest_length;
    const double rate = pb * state.udot[b] - pa * state.udot[a];

    // Tension along the edge, positive when pulling the endpoints together.
    double tension;
    double damping_coeff = 0.0;
    if (params.edge_constraint_enabled) {
      const double imp = impedance(std::abs(r), params);
      tension = -imp * m_eff * reference_accel(r, rate, params);
      damping_coeff = imp * m_eff * params.damping();
    } else {
      tension = params.young_modulus * elastic_area / e.rest_length * r;
    }
    out.force[a] += tension * pa;
    out.force[b] -= tension * pb;
    out.damping[a] += damping_coeff * pa * pa;
    out.damping[b] += damping_coeff * pb * pb;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (mesh.pinned[i]) {
      out.force[i] = 0.0;
      out.damping[i] = 0.0;
    }
  }
  return out;
}

FlexState step(const FootMesh& mesh, const FlexState& state, const ContactLoad& contacts,
               const SolverParams& params, const Pose& next_frame_pose, ForceDiagnostics* diag) {
  const std::size_t n = mesh.vertex_count();
  require(state.u.size() == n && state.udot.size() == n, "flex state does not match mesh");
  require(contacts.force.size() == n && contacts.radial_damping.size() == n, "contact load does not match mesh");

  GeneralizedForces edge = edge_constraint_forces(mesh, state, params, diag);
  const double dt = params.timestep;
  const double m = mesh.vertex_mass;
  const Vec3 gravity(0.0, 0.0, -params.gravity * m);

  FlexState next = state;
  next.pose = next_frame_pose;
  next.time = state.time + dt;
  next.step = state.step + 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (mesh.pinned[i]) continue;
    const Vec3 dir_world = state.pose.rotate(mesh.radial_dir[i]);
    double f = edge.force[i] + contacts.force[i].dot(dir_world) + gravity.dot(dir_world);
    if (std::abs(f) > params.force_cap) {
      f = std::copysign(params.force_cap, f);
      if (diag) ++diag->capped;
    }
    const double c = edge.damping[i] + contacts.radial_damping[i];
    const double v0 = state.udot[i];
    const double v1 = (v0 + dt * (f + c * v0) / m) / (1.0 + dt * c / m);
    next.udot[i] = v1;
    next.u[i] = state.u[i] + dt * v1;
    if (!std::isfinite(next.u[i]) || !std::isfinite(v1))
      throw NumericalError(next.step, "non-finite flex state at vertex " + std::to_string(i));
  }
  return next;
}

}  // namespace footsim
