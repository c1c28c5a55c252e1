#include "gait_synth.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "ground_contact.hpp"

namespace footsim {

namespace {

double min_jerk(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

Quat pitch(double toe_up) { return Quat(Eigen::AngleAxisd(toe_up, -Vec3::UnitY())); }

struct Pivots {
  Vec3 heel;
  Vec3 toe;
};

Pivots rocker_pivots(const WalkPattern& p, const FootMesh& mesh) {
  double zh = plantar_height(mesh, p.heel_pivot, 0.0);
  double zt = plantar_height(mesh, p.toe_pivot, 0.0);
  require(!std::isnan(zh) && !std::isnan(zt), "rocker pivots must lie under the foot");
  return {Vec3(p.heel_pivot, 0.0, zh), Vec3(p.toe_pivot, 0.0, zt)};
}

// Mesh pose rotated by `toe_up` about a mesh point that stays where it is
// when the foot is flat at `flat_origin`.
Pose pivot_pose(const Vec3& flat_origin, const Vec3& pivot, double toe_up) {
  Quat r = pitch(toe_up);
  return {flat_origin + pivot - r * pivot, r};
}

struct FootPhase {
  Pose pose;
  double toe_up = 0.0;
  double mtp = 0.0;
};

FootPhase foot_phase(const WalkPattern& p, const Pivots& piv, Side side, double t) {
  const double T = p.stride_period;
  const double Ts = p.stance_fraction * T;
  const double t0 = p.first_strike + (side == Side::Left ? 0.5 * T : 0.0);
  const double y = (side == Side::Right ? -0.5 : 0.5) * p.step_width;
  const double c = std::floor((t - t0) / T);
  const double tau = t - t0 - c * T;
  // Flat placement puts the ankle under the pelvis at mid-stance.
  auto flat_origin = [&](double cycle) {
    double mid = t0 + cycle * T + 0.5 * (p.foot_flat + p.heel_off) * Ts;
    return Vec3(p.speed * mid - 0.06, y, 0.0);
  };
  auto stance = [&](double cycle, double s) {
    FootPhase f;
    Vec3 o = flat_origin(cycle);
    if (s < p.foot_flat) {
      double u = s / p.foot_flat;
      f.toe_up = p.heel_strike_angle * (1.0 - u) * (1.0 - u);
      f.pose = pivot_pose(o, piv.heel, f.toe_up);
    } else if (s < p.heel_off) {
      f.pose = {o, Quat::Identity()};
    } else {
      double u = (s - p.heel_off) / (1.0 - p.heel_off);
      f.toe_up = -p.toe_off_angle * std::pow(u, p.heel_rise_power);
      f.pose = pivot_pose(o, piv.toe, f.toe_up);
      f.mtp = -f.toe_up;
    }
    return f;
  };
  if (tau < Ts) return stance(c, tau / Ts);
  const double u = (tau - Ts) / (T - Ts);
  FootPhase a = stance(c, 1.0);
  FootPhase b = stance(c + 1.0, 0.0);
  const double m = min_jerk(u);
  FootPhase f;
  f.toe_up = a.toe_up + (b.toe_up - a.toe_up) * m;
  Vec3 pos = a.pose.position + (b.pose.position - a.pose.position) * m;
  pos.z() += p.swing_clearance * std::sin(kPi * u);
  f.pose = {pos, pitch(f.toe_up)};
  f.mtp = p.toe_off_angle * (1.0 - m);
  return f;
}

struct PointTarget {
  int body;
  Vec3 local;
  Vec3 world;
};

// Gauss-Newton on a subset of DoFs for points fixed to bodies.
double solve_points(const SkeletonModel& model, VecX& q, const Vec3& root, const std::vector<int>& dofs,
                    const std::vector<PointTarget>& targets) {
  const int n = static_cast<int>(dofs.size());
  const int m = 3 * static_cast<int>(targets.size());
  Eigen::MatrixXd J(m, n);
  VecX r(m);
  for (int iter = 0; iter < 60; ++iter) {
    Kinematics kin = forward_kinematics(model, q, root);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto& t = targets[i];
      Vec3 p = kin.body_poses[static_cast<std::size_t>(t.body)].apply(t.local);
      r.segment<3>(3 * static_cast<Eigen::Index>(i)) = t.world - p;
      auto Jp = point_jacobian(model, kin, t.body, p);
      for (int k = 0; k < n; ++k) J.block<3, 1>(3 * static_cast<Eigen::Index>(i), k) = Jp.col(3 + dofs[static_cast<std::size_t>(k)]);
    }
    Eigen::MatrixXd A = J.transpose() * J;
    A.diagonal().array() += 1e-9;
    VecX d = A.ldlt().solve(J.transpose() * r);
    for (int k = 0; k < n; ++k) q[dofs[static_cast<std::size_t>(k)]] += d[k];
    q = clamp_to_limits(model, q);
    if (d.norm() < 1e-13) break;
  }
  Kinematics kin = forward_kinematics(model, q, root);
  double worst = 0.0;
  for (const auto& t : targets)
    worst = std::max(worst, (kin.body_poses[static_cast<std::size_t>(t.body)].apply(t.local) - t.world).norm());
  return worst;
}

std::vector<int> leg_dofs(const SkeletonModel& model, const std::string& sfx) {
  std::vector<int> out;
  for (const char* name : {"hip_flexion", "hip_adduction", "hip_rotation", "knee_flexion", "ankle_dorsiflexion",
                           "subtalar_inversion"}) {
    int d = model.find_dof(name + sfx);
    require(d >= 0, std::string("walk synthesis needs dof ") + name + sfx);
    out.push_back(d);
  }
  return out;
}

void set_dof(const SkeletonModel& model, VecX& q, const std::string& name, double value) {
  int d = model.find_dof(name);
  if (d >= 0) q[d] = std::clamp(value, model.dofs[static_cast<std::size_t>(d)].lower, model.dofs[static_cast<std::size_t>(d)].upper);
}

double leg_length(const SkeletonModel& model, Side side) {
  int foot = model.foot_body(side);
  int talus = model.bodies[static_cast<std::size_t>(foot)].parent;
  int tibia = model.bodies[static_cast<std::size_t>(talus)].parent;
  return model.bodies[static_cast<std::size_t>(talus)].offset.norm() + model.bodies[static_cast<std::size_t>(tibia)].offset.norm() +
         model.bodies[static_cast<std::size_t>(foot)].offset.norm();
}

int hip_body(const SkeletonModel& model, Side side) {
  int b = model.foot_body(side);
  for (int k = 0; k < 3; ++k) b = model.bodies[static_cast<std::size_t>(b)].parent;
  return b;
}

std::vector<PointTarget> foot_targets(const SkeletonModel& model, Side side, const Pose& mesh_pose,
                                      const FootAttachment& attach) {
  const int foot = model.foot_body(side);
  const Pose body = mesh_pose.compose(attach.mesh_in_body().inverse());
  std::vector<PointTarget> t;
  for (const Vec3& local : {Vec3(0.0, 0.0, 0.0), Vec3(0.15, 0.0, -0.06), Vec3(0.0, 0.05, 0.0)})
    t.push_back({foot, local, body.apply(local)});
  return t;
}

SynthesizedMotion finish(const SkeletonModel& model, double rate, std::vector<VecX> qs, std::vector<Vec3> roots) {
  SynthesizedMotion out;
  out.trajectory.rate = rate;
  out.trajectory.q = std::move(qs);
  out.trajectory.root = std::move(roots);
  if (out.trajectory.q.size() >= 2) out.trajectory = finite_difference_velocities(out.trajectory);
  out.keypoints.rate = rate;
  for (const auto& s : model.sites) out.keypoints.site_names.push_back(s.name);
  for (std::size_t t = 0; t < out.trajectory.q.size(); ++t)
    out.keypoints.frames.push_back(forward_sites(model, out.trajectory.q[t], out.trajectory.root[t]));
  return out;
}

}  // namespace

Pose walk_foot_pose(const WalkPattern& pattern, const FootMesh& mesh, Side side, double t) {
  return foot_phase(pattern, rocker_pivots(pattern, mesh), side, t).pose;
}

SynthesizedMotion synthesize_walk(const SkeletonModel& model, const FootMesh& right_mesh, const WalkPattern& p,
                                  const FootAttachment& attach) {
  require(p.rate > 0 && p.duration > 0, "walk pattern needs a positive rate and duration");
  require(p.stance_fraction > 0.5 && p.stance_fraction < 1.0, "stance fraction must be in (0.5, 1)");
  require(0 < p.foot_flat && p.foot_flat < p.heel_off && p.heel_off < 1.0, "rocker fractions must be increasing");
  const Pivots piv = rocker_pivots(p, right_mesh);
  const auto frames = static_cast<std::size_t>(std::floor(p.duration * p.rate + 1e-9)) + 1;
  const double T = p.stride_period;
  const Side sides[2] = {Side::Right, Side::Left};

  // Pelvis, trunk and arm angles as smooth periodic functions; phase 0 is a
  // right heel strike.
  auto upper_body = [&](double t, VecX& q) {
    const double ph = 2.0 * kPi * (t - p.first_strike) / T;
    set_dof(model, q, "pelvis_tilt", 0.05 + 0.02 * std::cos(2.0 * ph));
    set_dof(model, q, "pelvis_list", -0.04 * std::sin(ph));
    set_dof(model, q, "pelvis_rotation", 0.08 * std::cos(ph));
    set_dof(model, q, "lumbar_extension", -0.03 + 0.02 * std::cos(2.0 * ph));
    set_dof(model, q, "lumbar_rotation", -0.04 * std::cos(ph));
    set_dof(model, q, "thorax_rotation", -0.03 * std::cos(ph));
    set_dof(model, q, "neck_flexion", 0.02);
    set_dof(model, q, "shoulder_flexion_r", -0.3 * std::cos(ph));
    set_dof(model, q, "shoulder_flexion_l", 0.3 * std::cos(ph));
    set_dof(model, q, "shoulder_adduction_r", -0.12);
    set_dof(model, q, "shoulder_adduction_l", -0.12);
    set_dof(model, q, "elbow_flexion_r", 0.35 - 0.15 * std::cos(ph));
    set_dof(model, q, "elbow_flexion_l", 0.35 + 0.15 * std::cos(ph));
  };
  auto root_xy = [&](double t) {
    const double ph = 2.0 * kPi * (t - p.first_strike) / T;
    // Sway toward the stance foot, peaking at right and left mid-stance.
    return Vec3(p.speed * t, -p.pelvis_sway * std::sin(ph + 0.5), 0.0);
  };

  // Highest pelvis that keeps both legs within reach, smoothed so the bound
  // still holds (sliding minimum followed by a moving average).
  const double fine_rate = 10.0 * p.rate;
  const auto fine = static_cast<std::size_t>(std::floor(p.duration * fine_rate + 1e-9)) + 1;
  std::vector<double> limit(fine);
  for (std::size_t k = 0; k < fine; ++k) {
    const double t = static_cast<double>(k) / fine_rate;
    VecX q = VecX::Zero(model.dof_count());
    upper_body(t, q);
    Vec3 root = root_xy(t);
    Kinematics kin = forward_kinematics(model, q, root);
    double zmax = 1e9;
    for (Side s : sides) {
      Vec3 hip = kin.body_poses[static_cast<std::size_t>(hip_body(model, s))].position;
      Vec3 ankle = foot_phase(p, piv, s, t).pose.apply(attach.ankle_in_mesh);
      const double reach = p.leg_reach * leg_length(model, s);
      const double dxy2 = (hip - ankle).head<2>().squaredNorm();
      require(dxy2 < reach * reach, "walk pattern stride exceeds leg reach");
      zmax = std::min(zmax, ankle.z() - (hip.z() - root.z()) + std::sqrt(reach * reach - dxy2));
    }
    limit[k] = zmax;
  }
  const auto half = static_cast<std::ptrdiff_t>(std::lround(0.06 * fine_rate));
  auto window = [&](const std::vector<double>& x, bool take_min) {
    std::vector<double> y(x.size());
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      double acc = take_min ? 1e9 : 0.0;
      int cnt = 0;
      for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - half); j <= std::min(n - 1, i + half); ++j) {
        acc = take_min ? std::min(acc, x[static_cast<std::size_t>(j)]) : acc + x[static_cast<std::size_t>(j)];
        ++cnt;
      }
      y[static_cast<std::size_t>(i)] = take_min ? acc : acc / cnt;
    }
    return y;
  };
  const std::vector<double> pelvis_z = window(window(limit, true), false);

  std::vector<VecX> qs;
  std::vector<Vec3> roots;
  VecX q = VecX::Zero(model.dof_count());
  double worst = 0.0;
  for (std::size_t k = 0; k < frames; ++k) {
    const double t = static_cast<double>(k) / p.rate;
    upper_body(t, q);
    Vec3 root = root_xy(t);
    root.z() = pelvis_z[std::min(fine - 1, k * 10)];
    for (Side s : sides) {
      const std::string sfx = s == Side::Right ? "_r" : "_l";
      FootPhase f = foot_phase(p, piv, s, t);
      if (k == 0) set_dof(model, q, "knee_flexion" + sfx, 0.3);
      worst = std::max(worst, solve_points(model, q, root, leg_dofs(model, sfx), foot_targets(model, s, f.pose, attach)));
      set_dof(model, q, "mtp_extension" + sfx, f.mtp);
    }
    qs.push_back(q);
    roots.push_back(root);
  }
  SynthesizedMotion out = finish(model, p.rate, std::move(qs), std::move(roots));
  out.max_foot_error = worst;
  return out;
}

SynthesizedMotion synthesize_stand(const SkeletonModel& model, const StandPattern& p, const FootAttachment& attach) {
  require(p.rate > 0 && p.duration > 0, "stand pattern needs a positive rate and duration");
  const auto frames = static_cast<std::size_t>(std::floor(p.duration * p.rate + 1e-9)) + 1;
  VecX q = VecX::Zero(model.dof_count());
  Kinematics kin = forward_kinematics(model, q, Vec3::Zero());
  double root_z = 1e9;
  Pose meshes[2];
  const Side sides[2] = {Side::Right, Side::Left};
  for (int i = 0; i < 2; ++i) {
    const double y = (sides[i] == Side::Right ? -0.5 : 0.5) * p.stance_width;
    meshes[i] = {Vec3(-attach.ankle_in_mesh.x(), y, 0.0), Quat::Identity()};
    Vec3 hip = kin.body_poses[static_cast<std::size_t>(hip_body(model, sides[i]))].position;
    Vec3 ankle = meshes[i].apply(attach.ankle_in_mesh);
    const double reach = p.knee_bend * leg_length(model, sides[i]);
    root_z = std::min(root_z, ankle.z() - hip.z() + std::sqrt(reach * reach - (hip - ankle).head<2>().squaredNorm()));
  }
  const Vec3 root(0.0, 0.0, root_z);
  for (int i = 0; i < 2; ++i) {
    const std::string sfx = sides[i] == Side::Right ? "_r" : "_l";
    set_dof(model, q, "knee_flexion" + sfx, 0.3);
    solve_points(model, q, root, leg_dofs(model, sfx), foot_targets(model, sides[i], meshes[i], attach));
  }
  set_dof(model, q, "shoulder_adduction_r", -0.1);
  set_dof(model, q, "shoulder_adduction_l", -0.1);
  set_dof(model, q, "elbow_flexion_r", 0.2);
  set_dof(model, q, "elbow_flexion_l", 0.2);
  return finish(model, p.rate, std::vector<VecX>(frames, q), std::vector<Vec3>(frames, root));
}

}  // namespace footsim
