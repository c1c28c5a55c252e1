#include "ground_contact.hpp"

#include <cmath>
#include <limits>

#include "error.hpp"

namespace footsim {

std::vector<ContactCandidate> detect_contacts(const FootMesh& mesh, const FlexState& state,
                                              const Twist& frame_twist) {
  std::vector<ContactCandidate> out;
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    Vec3 p = world_position(mesh, state, i);
    double pen = mesh.vertex_radius - p.z();
    if (!(pen > 0.0)) continue;
    Vec3 v = frame_twist.point_velocity(p, state.pose.position) +
             state.udot[i] * state.pose.rotate(mesh.radial_dir[i]);
    out.push_back({static_cast<int>(i), pen, p, v});
  }
  return out;
}

ContactForce contact_force(double penetration, double penetration_rate, const Vec3& tangential_velocity,
                           const SolverParams& solver, const FrictionParams& friction, double effective_mass) {
  ContactForce f;
  if (!(penetration > 0.0)) return f;
  const double imp = impedance(penetration, solver);
  // Reference acceleration pushes out of the ground when negative.
  const double a_ref = reference_accel(penetration, penetration_rate, solver);
  if (a_ref < 0.0) {
    f.normal = imp * effective_mass * -a_ref;
    f.normal_damping = imp * effective_mass * solver.damping();
  }
  Vec3 vt(tangential_velocity.x(), tangential_velocity.y(), 0.0);
  const double speed = vt.norm();
  if (speed > 0.0 && f.normal > 0.0) {
    const double cone = friction.mu * f.normal;
    const double viscous = friction.slope * speed;
    if (viscous < cone) {
      f.tangential = -friction.slope * vt;
      f.tangential_damping = friction.slope;
    } else {
      // Secant slope keeps the sliding branch dissipative in the velocity update.
      f.tangential = -(cone / speed) * vt;
      f.tangential_damping = cone / speed;
    }
  }
  return f;
}

FlexContactResult flex_contacts(const FootMesh& mesh, const FlexState& state, const Twist& frame_twist,
                                const SolverParams& solver, const FrictionParams& friction) {
  FlexContactResult out;
  out.load = ContactLoad::zeros(mesh.vertex_count());
  for (const auto& c : detect_contacts(mesh, state, frame_twist)) {
    ContactForce f = contact_force(c.penetration, -c.velocity.z(), c.velocity, solver, friction, mesh.vertex_mass);
    const auto i = static_cast<std::size_t>(c.vertex);
    out.load.force[i] = Vec3(f.tangential.x(), f.tangential.y(), f.normal);
    if (!mesh.pinned[i]) {
      Vec3 d = state.pose.rotate(mesh.radial_dir[i]);
      out.load.radial_damping[i] =
          f.normal_damping * d.z() * d.z() + f.tangential_damping * (d.x() * d.x() + d.y() * d.y());
    }
    if (f.normal > 0.0)
      out.records.push_back({state.time, mesh.side, c.vertex, c.position, f.normal, f.tangential, c.penetration});
  }
  return out;
}

double plantar_height(const FootMesh& mesh, double x, double y) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(t[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(t[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(t[2])];
    double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
    if (std::abs(det) < 1e-15) continue;
    double l1 = ((x - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (y - a.y())) / det;
    double l2 = ((b.x() - a.x()) * (y - a.y()) - (x - a.x()) * (b.y() - a.y())) / det;
    double l0 = 1.0 - l1 - l2;
    if (l0 < -1e-12 || l1 < -1e-12 || l2 < -1e-12) continue;
    double z = l0 * a.z() + l1 * b.z() + l2 * c.z();
    if (std::isnan(best) || z < best) best = z;
  }
  return best;
}

namespace {

SphereLayout layout_from_fractions(const FootMesh& mesh, const std::vector<std::pair<double, double>>& fractions,
                                   std::vector<std::string> names, double effective_mass) {
  SphereLayout layout;
  layout.radius = mesh.vertex_radius;
  layout.effective_mass = effective_mass;
  layout.names = std::move(names);
  const double half_width = 0.5 * (mesh.bbox_max.y() - mesh.bbox_min.y());
  const double y_mid = 0.5 * (mesh.bbox_max.y() + mesh.bbox_min.y());
  // Positive medial fraction points toward the body midline.
  const double medial_sign = mesh.side == Side::Right ? 1.0 : -1.0;
  for (const auto& [fx, fy] : fractions) {
    double x = mesh.bbox_min.x() + fx * mesh.length();
    double y = y_mid + medial_sign * fy * half_width;
    double z = plantar_height(mesh, x, y);
    if (std::isnan(z)) fail(ErrorKind::InvalidArgument, "sphere layout point misses the foot surface");
    layout.centers.emplace_back(x, y, z);
  }
  return layout;
}

}  // namespace

SphereLayout default_sphere_layout(const FootMesh& mesh, double effective_mass) {
  return layout_from_fractions(mesh,
                               {{0.08, 0.3}, {0.08, -0.3}, {0.45, -0.55}, {0.72, 0.5}, {0.72, -0.55}, {0.92, 0.25}},
                               {"heel_medial", "heel_lateral", "midfoot_lateral", "met1", "met5", "hallux"},
                               effective_mass);
}

SphereLayout four_sphere_layout(const FootMesh& mesh, double effective_mass) {
  return layout_from_fractions(mesh, {{0.08, 0.3}, {0.08, -0.3}, {0.75, 0.5}, {0.75, -0.5}},
                               {"heel_medial", "heel_lateral", "fore_medial", "fore_lateral"}, effective_mass);
}

std::vector<ContactRecord> rigid_baseline_contacts(const Pose& box_pose, const Twist& box_twist,
                                                   const SphereLayout& layout, const SolverParams& solver,
                                                   const FrictionParams& friction, double time, Side side) {
  require(layout.centers.size() >= 3, "rigid layout needs at least 3 spheres");
  std::vector<ContactRecord> out;
  for (std::size_t i = 0; i < layout.centers.size(); ++i) {
    Vec3 p = box_pose.apply(layout.centers[i]);
    double pen = layout.radius - p.z();
    if (!(pen > 0.0)) continue;
    Vec3 v = box_twist.point_velocity(p, box_pose.position);
    ContactForce f = contact_force(pen, -v.z(), v, solver, friction, layout.effective_mass);
    if (f.normal > 0.0) out.push_back({time, side, static_cast<int>(i), p, f.normal, f.tangential, pen});
  }
  return out;
}

}  // namespace footsim
