#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "flex_dynamics.hpp"
#include "foot_mesh.hpp"
#include "gait_synth.hpp"
#include "ground_contact.hpp"
#include "retargeting.hpp"
#include "skeleton.hpp"

namespace footsim {

enum class FootModel { Deformable, Rigid };

inline const char* foot_model_name(FootModel m) { return m == FootModel::Deformable ? "deformable" : "rigid"; }
FootModel parse_foot_model(const std::string& s);

struct RewardWeights {
  double q = 50.0;
  double qdot = 0.1;
  double act = 1.0;
  double vel = 5.0;
  double healthy = 100.0;
  void validate() const;
};

struct RewardKernels {
  double q_scale = 5.0;      // r_q = exp(-q_scale * mse)
  double qdot_scale = 0.1;   // r_qdot = exp(-qdot_scale * mse)
  double vel_width = 0.25;   // r_vel = exp(-(vx - v*)^2 / vel_width)
  double pelvis_min = 0.7;   // m
  double pelvis_max = 1.1;   // m
  double max_tilt = 30.0;    // degrees
};

struct PlaybackConfig {
  double control_rate = 50.0;
  double sim_rate = 500.0;
  double target_speed = 1.25;
  FootModel model = FootModel::Deformable;
  // Vertical load carried by the feet; <= 0 uses the skeleton's total mass.
  double body_mass = 0.0;
  double duration = 0.0;  // s; <= 0 plays the whole trajectory
  FootAttachment attach;
  SolverParams solver;
  FrictionParams friction;
  double rigid_effective_mass = 1.0;
  int rigid_spheres = 6;  // 6 or 4
  RewardWeights weights;
  RewardKernels kernels;
  int activation_count = 1;

  int substeps() const;
  void validate() const;
};

// Kinematic foot frame plus the passive vertex DoFs of a deformable foot.
struct FlexFrame {
  double time = 0.0;
  Pose pose;
  std::vector<double> u;
  std::vector<double> udot;
};

struct SegmentState {
  Vec3 com = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 omega_body = Vec3::Zero();  // angular velocity in segment axes
};

struct BodyFrame {
  double time = 0.0;
  double offset = 0.0;       // vertical body offset from the prescribed motion, m
  double offset_rate = 0.0;  // m/s
  double pelvis_height = 0.0;
  Vec3 pelvis_velocity = Vec3::Zero();
  double trunk_tilt = 0.0;   // degrees from vertical
  double grf_z = 0.0;        // total vertical contact force, N
  std::vector<SegmentState> segments;
};

struct RewardState {
  double time = 0.0;
  VecX q;
  VecX qdot;
  double pelvis_vx = 0.0;
  double pelvis_height = 0.0;
  double trunk_tilt = 0.0;
};

struct RewardBreakdown {
  double time = 0.0;
  double r_q = 0.0;
  double r_qdot = 0.0;
  double r_act = 0.0;
  double r_vel = 0.0;
  double r_healthy = 0.0;
  double total = 0.0;
};

RewardBreakdown reward_step(const RewardState& state, const VecX& q_ref, const VecX& qdot_ref,
                            const VecX& activations, const RewardWeights& w, const RewardKernels& k,
                            double target_speed);
// One breakdown per state; every input sequence must have the same length.
std::vector<RewardBreakdown> reward_terms(const std::vector<RewardState>& states, const std::vector<VecX>& q_ref,
                                          const std::vector<VecX>& qdot_ref, const std::vector<VecX>& activations,
                                          const RewardWeights& w, const RewardKernels& k, double target_speed);

struct PlaybackLog {
  FootModel model = FootModel::Deformable;
  double sim_rate = 500.0;
  double control_rate = 50.0;
  std::vector<ContactRecord> contacts;
  std::array<std::vector<FlexFrame>, 2> flex;  // indexed by Side, deformable only
  std::vector<BodyFrame> body;
  std::vector<RewardState> reward_states;
  std::vector<RewardBreakdown> rewards;
  long steps_planned = 0;
  long steps_completed = 0;
  bool truncated = false;
  std::string failure;  // numerical abort message, empty on success
  long failed_step = -1;
  ForceDiagnostics diagnostics;
};

struct PlaybackHooks {
  // Polled before every step; returning true stops the run (logs are kept).
  std::function<bool(long step)> should_stop;
  std::function<void(long step, long total)> progress;
};

// Feet and their rigid layouts, right then left.
struct FootPair {
  std::array<FootMesh, 2> mesh;
};

PlaybackLog run_playback(const SkeletonModel& model, const JointTrajectory& traj, const FootPair& feet,
                         const PlaybackConfig& config, const PlaybackHooks& hooks = {});

// Rigid sphere layout the playback uses for `mesh`.
SphereLayout rigid_layout(const FootMesh& mesh, const PlaybackConfig& config);

// Kinematic world pose of a foot mesh frame (without the body offset).
Pose kinematic_foot_pose(const SkeletonModel& model, const Kinematics& kin, Side side, const FootAttachment& attach);

}  // namespace footsim
