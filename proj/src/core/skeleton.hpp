#pragma once

#include <string>
#include <vector>

#include "foot_mesh.hpp"
#include "geometry.hpp"

namespace footsim {

using VecX = Eigen::VectorXd;

struct Dof {
  std::string name;
  int body = 0;
  Vec3 axis = Vec3::UnitY();  // body-local, applied in listed order
  double lower = -kPi;
  double upper = kPi;
};

struct Body {
  std::string name;
  int parent = -1;
  Vec3 offset = Vec3::Zero();  // joint origin in the parent frame at zero pose
  std::vector<int> dofs;
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  Vec3 inertia = Vec3::Zero();  // principal moments about the COM, body axes
};

struct Site {
  std::string name;
  int body = 0;
  Vec3 offset = Vec3::Zero();
};

// Segment pair used for uniform bone scaling: the distance between two
// sites sets the scale of `body` (its children, sites and COM offsets).
struct ScalePair {
  std::string site_a;
  std::string site_b;
  int body = 0;
};

// Joint tree rooted at the pelvis. Bodies are listed parents-first.
struct SkeletonModel {
  std::vector<Body> bodies;
  std::vector<Dof> dofs;
  std::vector<Site> sites;
  std::vector<ScalePair> scale_pairs;
  int right_foot = -1;
  int left_foot = -1;

  int dof_count() const { return static_cast<int>(dofs.size()); }
  int site_count() const { return static_cast<int>(sites.size()); }
  int find_body(const std::string& name) const;
  int find_site(const std::string& name) const;
  int find_dof(const std::string& name) const;
  int foot_body(Side side) const { return side == Side::Right ? right_foot : left_foot; }
  double total_mass() const;
  bool is_ancestor(int ancestor, int body) const;
  void validate() const;
};

constexpr int kDofCount = 33;
constexpr int kSiteCount = 18;

// Lower body, torso and arms: 33 rotational DoFs, 18 sites, 70 kg.
SkeletonModel default_skeleton();
std::string skeleton_to_text(const SkeletonModel& model);
SkeletonModel parse_skeleton(const std::string& text, const std::string& source = "skeleton.cfg");
SkeletonModel load_skeleton(const std::string& path);

// World poses and per-DoF joint axes for one configuration.
struct Kinematics {
  std::vector<Pose> body_poses;
  std::vector<Vec3> dof_axis;    // world axis of each DoF
  std::vector<Vec3> dof_origin;  // world point on that axis
};

Kinematics forward_kinematics(const SkeletonModel& model, const VecX& q, const Vec3& root_translation);

std::vector<Vec3> forward_sites(const SkeletonModel& model, const VecX& q, const Vec3& root_translation);

// Jacobian of a world point fixed to `body`: columns 0..2 for root
// translation, then one column per DoF.
Eigen::Matrix<double, 3, Eigen::Dynamic> point_jacobian(const SkeletonModel& model, const Kinematics& kin,
                                                        int body, const Vec3& world_point);

VecX clamp_to_limits(const SkeletonModel& model, const VecX& q);

}  // namespace footsim
