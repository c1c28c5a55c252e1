#pragma once

#include "foot_mesh.hpp"
#include "retargeting.hpp"
#include "skeleton.hpp"

namespace footsim {

// Placement of the foot mesh frame in the foot (calcaneus) body frame.
struct FootAttachment {
  Vec3 ankle_in_mesh = Vec3(0.06, 0.0, 0.08);  // ankle joint centre in mesh coordinates

  Pose mesh_in_body() const { return {-ankle_in_mesh, Quat::Identity()}; }
};

// Parametric level walk. Foot motion is designed in Cartesian space as a
// heel rocker, foot flat, forefoot rocker and swing; the legs follow by IK.
struct WalkPattern {
  double speed = 1.25;           // m/s
  double stride_period = 1.08;   // s, ipsilateral heel strike to heel strike
  double stance_fraction = 0.62;
  double step_width = 0.17;      // m between foot centre lines
  double swing_clearance = 0.05; // m
  double heel_strike_angle = 0.30;  // toe-up pitch at heel strike, rad
  double toe_off_angle = 0.90;      // toe-down pitch at toe-off, rad
  double heel_rise_power = 1.3;     // shape of the forefoot rocker pitch ramp
  double foot_flat = 0.12;          // fraction of stance where the heel rocker ends
  double heel_off = 0.50;           // fraction of stance where the forefoot rocker starts
  double heel_pivot = 0.03;         // mesh x of the heel rocker pivot, m
  double toe_pivot = 0.27;          // mesh x of the forefoot rocker pivot, m
  double first_strike = 0.1;        // s, first right heel strike
  double leg_reach = 0.98;          // max hip-ankle distance as a fraction of leg length
  double pelvis_sway = 0.02;        // m lateral
  double duration = 10.0;           // s
  double rate = 30.0;               // Hz
};

struct StandPattern {
  double stance_width = 0.18;  // m between foot centre lines
  double knee_bend = 0.985;    // hip-ankle distance as a fraction of leg length
  double duration = 3.0;
  double rate = 30.0;
};

struct SynthesizedMotion {
  KeypointSequence keypoints;
  JointTrajectory trajectory;  // joint angles that generated the keypoints, same rate
  double max_foot_error = 0.0; // worst leg IK miss against the designed foot motion, m
};

// World pose of one foot mesh frame at time t for the walk pattern; the
// plantar surface of `mesh` rests on z = 0 when flat.
Pose walk_foot_pose(const WalkPattern& pattern, const FootMesh& mesh, Side side, double t);

SynthesizedMotion synthesize_walk(const SkeletonModel& model, const FootMesh& right_mesh,
                                  const WalkPattern& pattern = {}, const FootAttachment& attach = {});
SynthesizedMotion synthesize_stand(const SkeletonModel& model, const StandPattern& pattern = {},
                                   const FootAttachment& attach = {});

}  // namespace footsim
