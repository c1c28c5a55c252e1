#pragma once

#include <string>
#include <vector>

#include "skeleton.hpp"

namespace footsim {

// Named 3D marker positions sampled at a fixed rate.
struct KeypointSequence {
  double rate = 30.0;
  std::vector<std::string> site_names;
  std::vector<std::vector<Vec3>> frames;  // frames[t][k] for site_names[k]

  std::size_t frame_count() const { return frames.size(); }
};

// CSV with header "frame,site,x,y,z". Rows are grouped by frame index;
// a "# rate_hz <value>" comment sets the sample rate.
KeypointSequence parse_keypoints(const std::string& text, const std::string& source = "keypoints.csv");
KeypointSequence load_keypoints(const std::string& path);
std::string keypoints_to_csv(const KeypointSequence& seq, const std::vector<std::string>& header = {});

// Reorders keypoint columns to the skeleton's site order.
std::vector<std::vector<Vec3>> targets_in_site_order(const SkeletonModel& model, const KeypointSequence& seq);

struct SolveOptions {
  double lambda = 1.0e-4;
  double mu_initial = 1.0e-3;  // extra Levenberg damping adapted by the line search
  int max_iterations = 100;
  double step_tolerance = 1.0e-10;  // on |delta|; looser values leave linear-convergence tails
  int max_halvings = 12;
};

struct FrameSolution {
  VecX q;
  Vec3 root = Vec3::Zero();
  double objective = 0.0;          // sum |p_i - target_i|^2 + lambda |q|^2
  double max_site_residual = 0.0;  // m
  int iterations = 0;
  bool converged = false;          // false: best iterate returned with a warning
  double damping = 0.0;            // Levenberg damping at return, reused by warm starts
  std::vector<double> objective_history;  // objective after each accepted iterate, starting with the initial one
};

double ik_objective(const SkeletonModel& model, const std::vector<Vec3>& targets, const VecX& q, const Vec3& root,
                    double lambda);

// Damped Gauss-Newton on (root translation, q). The root starts at
// `root_init`, or at the pelvis target offset when not provided.
FrameSolution solve_frame(const SkeletonModel& model, const std::vector<Vec3>& targets, const VecX& q_init,
                          const Vec3& root_init, const SolveOptions& options = {});
FrameSolution solve_frame(const SkeletonModel& model, const std::vector<Vec3>& targets, const VecX& q_init,
                          const SolveOptions& options = {});

struct JointTrajectory {
  double rate = 100.0;
  std::vector<VecX> q;
  std::vector<Vec3> root;
  std::vector<VecX> qdot;  // empty until velocities are computed

  std::size_t frame_count() const { return q.size(); }
  double duration() const { return q.empty() ? 0.0 : static_cast<double>(q.size() - 1) / rate; }
};

struct TrajectorySolveStats {
  double max_site_residual = 0.0;
  int unconverged_frames = 0;
};

JointTrajectory solve_trajectory(const SkeletonModel& model, const KeypointSequence& seq,
                                 const SolveOptions& options = {}, TrajectorySolveStats* stats = nullptr);

// Central differences inside, second-order one-sided at the ends.
JointTrajectory finite_difference_velocities(const JointTrajectory& traj);
std::vector<double> finite_difference(const std::vector<double>& x, double rate);

// Second-order Butterworth low-pass, run forward then backward.
std::vector<double> zero_phase_lowpass(const std::vector<double>& x, double rate, double cutoff);
std::vector<double> linear_resample(const std::vector<double>& x, double rate, double target_rate);

// Linear interpolation to target_rate, zero-phase low-pass, then velocities.
// With `limits`, filtered angles are clamped back into the joint limits.
JointTrajectory resample_and_filter(const JointTrajectory& traj, double target_rate, double cutoff,
                                    const SkeletonModel* limits = nullptr);

// Per-segment uniform scaling: each scale pair's body is scaled by the ratio
// of the mean keypoint distance to the model's rest distance.
struct ScaleResult {
  SkeletonModel model;
  std::vector<double> factors;  // one per scale pair
};
ScaleResult scale_skeleton(const SkeletonModel& model, const KeypointSequence& seq);

// Trajectory CSV: time, root_x, root_y, root_z, one column per DoF, then
// one "<dof>_vel" column per DoF.
std::string trajectory_to_csv(const SkeletonModel& model, const JointTrajectory& traj,
                              const std::vector<std::string>& header = {});
JointTrajectory parse_trajectory(const SkeletonModel& model, const std::string& text,
                                 const std::string& source = "trajectory.csv");
JointTrajectory load_trajectory(const SkeletonModel& model, const std::string& path);

// Pose at an arbitrary time: cubic Hermite between frames (linear for the
// joints when the trajectory has no velocities). Velocities interpolate linearly.
void sample_trajectory(const JointTrajectory& traj, double time, VecX& q, Vec3& root);
void sample_velocity(const JointTrajectory& traj, double time, VecX& qdot);

}  // namespace footsim
