#include "gait_playback.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "text.hpp"

namespace footsim {

FootModel parse_foot_model(const std::string& s) {
  if (s == "deformable") return FootModel::Deformable;
  if (s == "rigid") return FootModel::Rigid;
  fail(ErrorKind::Config, "model must be deformable or rigid, got '" + s + "'");
}

void RewardWeights::validate() const {
  require(q >= 0 && qdot >= 0 && act >= 0 && vel >= 0 && healthy >= 0, "reward weights must be non-negative");
}

int PlaybackConfig::substeps() const { return static_cast<int>(std::lround(sim_rate / control_rate)); }

void PlaybackConfig::validate() const {
  require(control_rate > 0 && sim_rate > 0, "rates must be positive");
  const double ratio = sim_rate / control_rate;
  require(std::abs(ratio - std::round(ratio)) < 1e-9 && ratio >= 1.0,
          "simulation rate must be an integer multiple of the control rate");
  require(rigid_spheres == 6 || rigid_spheres == 4, "rigid layout must have 4 or 6 spheres");
  require(rigid_effective_mass > 0, "rigid effective mass must be positive");
  require(friction.mu >= 0 && friction.slope > 0, "friction needs mu >= 0 and a positive slope");
  require(activation_count >= 1, "activation count must be at least 1");
  weights.validate();
  solver.validate();
}

RewardBreakdown reward_step(const RewardState& s, const VecX& q_ref, const VecX& qdot_ref, const VecX& act,
                            const RewardWeights& w, const RewardKernels& k, double target_speed) {
  require(s.q.size() == q_ref.size() && s.qdot.size() == qdot_ref.size(), "reward reference has the wrong dimension");
  require(s.q.size() > 0, "reward needs joint angles");
  RewardBreakdown r;
  r.time = s.time;
  const double mse_q = (s.q - q_ref).squaredNorm() / static_cast<double>(s.q.size());
  const double mse_qd = (s.qdot - qdot_ref).squaredNorm() / static_cast<double>(s.qdot.size());
  r.r_q = std::exp(-k.q_scale * mse_q);
  r.r_qdot = std::exp(-k.qdot_scale * mse_qd);
  r.r_act = act.size() == 0 ? 0.0 : -act.squaredNorm() / static_cast<double>(act.size());
  const double dv = s.pelvis_vx - target_speed;
  r.r_vel = std::exp(-dv * dv / k.vel_width);
  const bool healthy = s.pelvis_height >= k.pelvis_min && s.pelvis_height <= k.pelvis_max && s.trunk_tilt < k.max_tilt;
  r.r_healthy = healthy ? 1.0 : 0.0;
  r.total = w.q * r.r_q + w.qdot * r.r_qdot + w.act * r.r_act + w.vel * r.r_vel + w.healthy * r.r_healthy;
  return r;
}

std::vector<RewardBreakdown> reward_terms(const std::vector<RewardState>& states, const std::vector<VecX>& q_ref,
                                          const std::vector<VecX>& qdot_ref, const std::vector<VecX>& activations,
                                          const RewardWeights& w, const RewardKernels& k, double target_speed) {
  w.validate();
  require(states.size() == q_ref.size() && states.size() == qdot_ref.size() && states.size() == activations.size(),
          "reward inputs are not time-aligned: " + std::to_string(states.size()) + " states, " +
              std::to_string(q_ref.size()) + " references, " + std::to_string(activations.size()) + " activations");
  std::vector<RewardBreakdown> out;
  out.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    out.push_back(reward_step(states[i], q_ref[i], qdot_ref[i], activations[i], w, k, target_speed));
  return out;
}

SphereLayout rigid_layout(const FootMesh& mesh, const PlaybackConfig& config) {
  return config.rigid_spheres == 4 ? four_sphere_layout(mesh, config.rigid_effective_mass)
                                   : default_sphere_layout(mesh, config.rigid_effective_mass);
}

Pose kinematic_foot_pose(const SkeletonModel& model, const Kinematics& kin, Side side, const FootAttachment& attach) {
  return kin.body_poses[static_cast<std::size_t>(model.foot_body(side))].compose(attach.mesh_in_body());
}

namespace {

Pose lifted(Pose p, double dz) {
  p.position.z() += dz;
  return p;
}

double tilt_degrees(const Pose& p) {
  double c = std::clamp(p.rotate(Vec3::UnitZ()).z(), -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

}  // namespace

PlaybackLog run_playback(const SkeletonModel& model, const JointTrajectory& traj, const FootPair& feet,
                         const PlaybackConfig& config, const PlaybackHooks& hooks) {
  config.validate();
  require(traj.frame_count() >= 2, "playback needs at least two trajectory frames");
  require(traj.qdot.size() == traj.q.size(), "playback trajectory needs joint velocities");
  require(feet.mesh[0].side == Side::Right && feet.mesh[1].side == Side::Left, "foot pair must be right then left");
  require(traj.q[0].size() == model.dof_count(), "trajectory does not match the skeleton");

  SolverParams solver = config.solver;
  solver.timestep = 1.0 / config.sim_rate;
  const double dt = solver.timestep;
  const double mass = config.body_mass > 0 ? config.body_mass : model.total_mass();
  const double duration = config.duration > 0 ? std::min(config.duration, traj.duration()) : traj.duration();
  const long steps = static_cast<long>(std::floor(duration * config.sim_rate + 1e-9));
  const int substeps = config.substeps();
  const bool deformable = config.model == FootModel::Deformable;
  const int trunk = std::max(0, model.find_body("thorax"));
  const Side sides[2] = {Side::Right, Side::Left};

  PlaybackLog log;
  log.model = config.model;
  log.sim_rate = config.sim_rate;
  log.control_rate = config.control_rate;
  log.steps_planned = steps;

  auto kin_at = [&](double t) {
    VecX q;
    Vec3 root;
    sample_trajectory(traj, t, q, root);
    return forward_kinematics(model, q, root);
  };

  std::array<SphereLayout, 2> layouts;
  std::array<FlexState, 2> flex;
  Kinematics kin0 = kin_at(0.0);
  double lowest = 1e9;
  for (int s = 0; s < 2; ++s) {
    Pose p = kinematic_foot_pose(model, kin0, sides[s], config.attach);
    if (deformable) {
      for (const auto& v : feet.mesh[s].vertices) lowest = std::min(lowest, p.apply(v).z());
    } else {
      layouts[s] = rigid_layout(feet.mesh[s], config);
      for (const auto& c : layouts[s].centers) lowest = std::min(lowest, p.apply(c).z());
    }
  }
  // Start with the lowest contact sphere just touching the ground.
  double offset = feet.mesh[0].vertex_radius - lowest;
  double offset_rate = 0.0;
  for (int s = 0; s < 2; ++s)
    if (deformable) flex[s] = rest_state(feet.mesh[s], lifted(kinematic_foot_pose(model, kin0, sides[s], config.attach), offset));

  const double h = 0.25 * dt;
  const VecX activations = VecX::Zero(config.activation_count);
  try {
    for (long n = 0; n < steps; ++n) {
      if (hooks.should_stop && hooks.should_stop(n)) {
        log.truncated = true;
        break;
      }
      if (hooks.progress && n % 500 == 0) hooks.progress(n, steps);
      const double t = static_cast<double>(n) * dt;
      Kinematics kin = kin_at(t);
      Kinematics kin_prev = kin_at(std::max(0.0, t - h));
      Kinematics kin_next = kin_at(t + h);
      const double span = t + h - std::max(0.0, t - h);

      double grf_z = 0.0;
      std::array<ContactLoad, 2> loads;
      std::array<Pose, 2> poses;
      for (int s = 0; s < 2; ++s) {
        poses[s] = lifted(kinematic_foot_pose(model, kin, sides[s], config.attach), offset);
        Twist tw = finite_difference_twist(kinematic_foot_pose(model, kin_prev, sides[s], config.attach),
                                           kinematic_foot_pose(model, kin_next, sides[s], config.attach), span);
        tw.linear.z() += offset_rate;
        if (deformable) {
          flex[s].pose = poses[s];
          flex[s].time = t;
          FlexContactResult res = flex_contacts(feet.mesh[s], flex[s], tw, solver, config.friction);
          for (const auto& r : res.records) grf_z += r.normal;
          log.contacts.insert(log.contacts.end(), res.records.begin(), res.records.end());
          loads[s] = std::move(res.load);
          log.flex[s].push_back({t, poses[s], flex[s].u, flex[s].udot});
        } else {
          auto recs = rigid_baseline_contacts(poses[s], tw, layouts[s], solver, config.friction, t, sides[s]);
          for (const auto& r : recs) grf_z += r.normal;
          log.contacts.insert(log.contacts.end(), recs.begin(), recs.end());
        }
      }

      BodyFrame frame;
      frame.time = t;
      frame.offset = offset;
      frame.offset_rate = offset_rate;
      frame.grf_z = grf_z;
      frame.segments.resize(model.bodies.size());
      for (std::size_t b = 0; b < model.bodies.size(); ++b) {
        const Body& body = model.bodies[b];
        const Pose& pose = kin.body_poses[b];
        SegmentState& seg = frame.segments[b];
        seg.com = pose.apply(body.com) + Vec3(0.0, 0.0, offset);
        Twist tw = finite_difference_twist(kin_prev.body_poses[b], kin_next.body_poses[b], span);
        Vec3 com_prev = kin_prev.body_poses[b].apply(body.com);
        Vec3 com_next = kin_next.body_poses[b].apply(body.com);
        seg.velocity = (com_next - com_prev) / span + Vec3(0.0, 0.0, offset_rate);
        seg.omega_body = pose.orientation.conjugate() * tw.angular;
      }
      frame.pelvis_height = kin.body_poses[0].position.z() + offset;
      frame.pelvis_velocity =
          (kin_next.body_poses[0].position - kin_prev.body_poses[0].position) / span + Vec3(0.0, 0.0, offset_rate);
      frame.trunk_tilt = tilt_degrees(kin.body_poses[static_cast<std::size_t>(trunk)]);

      if (n % substeps == 0) {
        RewardState rs;
        rs.time = t;
        Vec3 root;
        sample_trajectory(traj, t, rs.q, root);
        sample_velocity(traj, t, rs.qdot);
        rs.pelvis_vx = frame.pelvis_velocity.x();
        rs.pelvis_height = frame.pelvis_height;
        rs.trunk_tilt = frame.trunk_tilt;
        // Kinematic playback tracks the reference exactly.
        log.rewards.push_back(
            reward_step(rs, rs.q, rs.qdot, activations, config.weights, config.kernels, config.target_speed));
        log.reward_states.push_back(std::move(rs));
      }
      log.body.push_back(std::move(frame));

      // Vertical body DoF carries the weight not supported by the prescribed motion.
      offset_rate += dt * (grf_z / mass - solver.gravity);
      offset += dt * offset_rate;
      if (!std::isfinite(offset) || !std::isfinite(offset_rate))
        throw NumericalError(n, "non-finite body offset");

      if (deformable) {
        Kinematics kin_after = kin_at(t + dt);
        for (int s = 0; s < 2; ++s) {
          Pose next = lifted(kinematic_foot_pose(model, kin_after, sides[s], config.attach), offset);
          flex[s] = step(feet.mesh[s], flex[s], loads[s], solver, next, &log.diagnostics);
          flex[s].step = n + 1;
        }
      }
      log.steps_completed = n + 1;
    }
  } catch (const NumericalError& e) {
    log.truncated = true;
    log.failure = e.what();
    log.failed_step = e.step();
  }
  return log;
}

}  // namespace footsim
