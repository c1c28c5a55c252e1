#include "skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "text.hpp"

namespace footsim {

int SkeletonModel::find_body(const std::string& name) const {
  for (std::size_t i = 0; i < bodies.size(); ++i)
    if (bodies[i].name == name) return static_cast<int>(i);
  return -1;
}

int SkeletonModel::find_site(const std::string& name) const {
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (sites[i].name == name) return static_cast<int>(i);
  return -1;
}

int SkeletonModel::find_dof(const std::string& name) const {
  for (std::size_t i = 0; i < dofs.size(); ++i)
    if (dofs[i].name == name) return static_cast<int>(i);
  return -1;
}

double SkeletonModel::total_mass() const {
  double m = 0.0;
  for (const auto& b : bodies) m += b.mass;
  return m;
}

bool SkeletonModel::is_ancestor(int ancestor, int body) const {
  for (int b = body; b >= 0; b = bodies[static_cast<std::size_t>(b)].parent)
    if (b == ancestor) return true;
  return false;
}

void SkeletonModel::validate() const {
  require(!bodies.empty(), "skeleton has no bodies");
  require(bodies[0].parent == -1, "first body must be the root");
  for (std::size_t i = 1; i < bodies.size(); ++i) {
    int p = bodies[i].parent;
    require(p >= 0 && p < static_cast<int>(i), "body '" + bodies[i].name + "' must follow its parent");
  }
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const auto& d = dofs[i];
    require(d.body >= 0 && d.body < static_cast<int>(bodies.size()), "dof '" + d.name + "' has no body");
    require(std::abs(d.axis.norm() - 1.0) < 1e-9, "dof '" + d.name + "' axis must be unit length");
    require(d.lower <= 0.0 && 0.0 <= d.upper, "dof '" + d.name + "' limits must bracket zero");
  }
  for (const auto& s : sites)
    require(s.body >= 0 && s.body < static_cast<int>(bodies.size()), "site '" + s.name + "' has no body");
  require(right_foot >= 0 && left_foot >= 0, "skeleton must name both foot bodies");
  require(dof_count() == kDofCount, "skeleton must have " + std::to_string(kDofCount) + " dofs, found " +
                                        std::to_string(dof_count()));
  require(site_count() == kSiteCount, "skeleton must have " + std::to_string(kSiteCount) + " sites, found " +
                                          std::to_string(site_count()));
}

namespace {

struct Builder {
  SkeletonModel m;

  int body(const std::string& name, const std::string& parent, Vec3 offset) {
    Body b;
    b.name = name;
    b.parent = parent.empty() ? -1 : m.find_body(parent);
    b.offset = offset;
    m.bodies.push_back(b);
    return static_cast<int>(m.bodies.size()) - 1;
  }
  void dof(const std::string& name, const std::string& body, Vec3 axis, double lo, double hi) {
    Dof d;
    d.name = name;
    d.body = m.find_body(body);
    d.axis = axis.normalized();
    d.lower = lo;
    d.upper = hi;
    m.bodies[static_cast<std::size_t>(d.body)].dofs.push_back(static_cast<int>(m.dofs.size()));
    m.dofs.push_back(d);
  }
  // Uniform rod along the segment direction for the inertia estimate.
  void mass(const std::string& body, double fraction, Vec3 com, double length) {
    Body& b = m.bodies[static_cast<std::size_t>(m.find_body(body))];
    b.mass = 70.0 * fraction;
    b.com = com;
    double transverse = b.mass * length * length / 12.0;
    double axial = 0.1 * transverse;
    b.inertia = Vec3(transverse, transverse, axial);
  }
  void site(const std::string& name, const std::string& body, Vec3 offset) {
    m.sites.push_back({name, m.find_body(body), offset});
  }
};

}  // namespace

SkeletonModel default_skeleton() {
  Builder s;
  const Vec3 X = Vec3::UnitX(), Y = Vec3::UnitY(), Z = Vec3::UnitZ();

  s.body("pelvis", "", Vec3::Zero());
  s.dof("pelvis_tilt", "pelvis", -Y, -0.5, 0.5);
  s.dof("pelvis_list", "pelvis", X, -0.4, 0.4);
  s.dof("pelvis_rotation", "pelvis", Z, -0.6, 0.6);

  for (int k = 0; k < 2; ++k) {
    const bool right = k == 0;
    const std::string sfx = right ? "_r" : "_l";
    const double sgn = right ? 1.0 : -1.0;  // mirrors medial/lateral axes
    s.body("femur" + sfx, "pelvis", Vec3(0.0, -sgn * 0.085, -0.07));
    s.dof("hip_flexion" + sfx, "femur" + sfx, -Y, -0.5, 1.6);
    s.dof("hip_adduction" + sfx, "femur" + sfx, sgn * X, -0.5, 0.4);
    s.dof("hip_rotation" + sfx, "femur" + sfx, sgn * Z, -0.6, 0.6);
    s.body("tibia" + sfx, "femur" + sfx, Vec3(0.0, 0.0, -0.44));
    s.dof("knee_flexion" + sfx, "tibia" + sfx, Y, -0.05, 2.2);
    s.body("talus" + sfx, "tibia" + sfx, Vec3(0.0, 0.0, -0.43));
    s.dof("ankle_dorsiflexion" + sfx, "talus" + sfx, -Y, -0.8, 0.5);
    s.body("calcn" + sfx, "talus" + sfx, Vec3::Zero());
    s.dof("subtalar_inversion" + sfx, "calcn" + sfx, sgn * X, -0.35, 0.35);
    s.body("toes" + sfx, "calcn" + sfx, Vec3(0.16, 0.0, -0.06));
    s.dof("mtp_extension" + sfx, "toes" + sfx, -Y, -0.5, 1.0);
  }

  s.body("abdomen", "pelvis", Vec3(-0.02, 0.0, 0.09));
  s.dof("lumbar_extension", "abdomen", Y, -0.6, 0.4);
  s.dof("lumbar_bending", "abdomen", X, -0.4, 0.4);
  s.dof("lumbar_rotation", "abdomen", Z, -0.5, 0.5);
  s.body("thorax", "abdomen", Vec3(0.0, 0.0, 0.18));
  s.dof("thorax_extension", "thorax", Y, -0.4, 0.3);
  s.dof("thorax_bending", "thorax", X, -0.3, 0.3);
  s.dof("thorax_rotation", "thorax", Z, -0.4, 0.4);
  s.body("head", "thorax", Vec3(0.0, 0.0, 0.3));
  s.dof("neck_flexion", "head", -Y, -0.6, 0.8);
  s.dof("neck_rotation", "head", Z, -1.0, 1.0);

  for (int k = 0; k < 2; ++k) {
    const bool right = k == 0;
    const std::string sfx = right ? "_r" : "_l";
    const double sgn = right ? 1.0 : -1.0;
    s.body("humerus" + sfx, "thorax", Vec3(0.0, -sgn * 0.18, 0.2));
    s.dof("shoulder_flexion" + sfx, "humerus" + sfx, -Y, -1.0, 2.0);
    s.dof("shoulder_adduction" + sfx, "humerus" + sfx, sgn * X, -1.5, 0.3);
    s.dof("shoulder_rotation" + sfx, "humerus" + sfx, sgn * Z, -1.0, 1.0);
    s.body("radius" + sfx, "humerus" + sfx, Vec3(0.0, 0.0, -0.29));
    s.dof("elbow_flexion" + sfx, "radius" + sfx, -Y, 0.0, 2.3);
  }

  // Anthropometric mass fractions of a 70 kg adult.
  s.mass("pelvis", 0.112, Vec3(0.0, 0.0, 0.0), 0.2);
  s.mass("abdomen", 0.163, Vec3(0.0, 0.0, 0.09), 0.18);
  s.mass("thorax", 0.16, Vec3(0.0, 0.0, 0.15), 0.3);
  s.mass("head", 0.069, Vec3(0.0, 0.0, 0.1), 0.2);
  for (const std::string sfx : {"_r", "_l"}) {
    s.mass("femur" + sfx, 0.142, Vec3(0.0, 0.0, -0.19), 0.44);
    s.mass("tibia" + sfx, 0.043, Vec3(0.0, 0.0, -0.18), 0.43);
    s.mass("talus" + sfx, 0.001, Vec3::Zero(), 0.05);
    s.mass("calcn" + sfx, 0.011, Vec3(0.06, 0.0, -0.04), 0.2);
    s.mass("toes" + sfx, 0.002, Vec3(0.03, 0.0, 0.0), 0.06);
    s.mass("humerus" + sfx, 0.027, Vec3(0.0, 0.0, -0.13), 0.29);
    s.mass("radius" + sfx, 0.022, Vec3(0.0, 0.0, -0.16), 0.4);
  }

  s.site("pelvis", "pelvis", Vec3::Zero());
  for (const std::string sfx : {"_r", "_l"}) {
    s.site("hip" + sfx, "femur" + sfx, Vec3::Zero());
    s.site("knee" + sfx, "tibia" + sfx, Vec3::Zero());
    s.site("ankle" + sfx, "talus" + sfx, Vec3::Zero());
    s.site("heel" + sfx, "calcn" + sfx, Vec3(-0.05, 0.0, -0.06));
    s.site("toe" + sfx, "toes" + sfx, Vec3(0.06, 0.0, 0.0));
  }
  s.site("head", "head", Vec3(0.0, 0.0, 0.1));
  for (const std::string sfx : {"_r", "_l"}) {
    s.site("shoulder" + sfx, "humerus" + sfx, Vec3::Zero());
    s.site("elbow" + sfx, "radius" + sfx, Vec3::Zero());
    s.site("wrist" + sfx, "radius" + sfx, Vec3(0.0, 0.0, -0.26));
  }

  for (const std::string sfx : {"_r", "_l"}) {
    s.m.scale_pairs.push_back({"hip" + sfx, "knee" + sfx, s.m.find_body("femur" + sfx)});
    s.m.scale_pairs.push_back({"knee" + sfx, "ankle" + sfx, s.m.find_body("tibia" + sfx)});
    s.m.scale_pairs.push_back({"heel" + sfx, "toe" + sfx, s.m.find_body("calcn" + sfx)});
    s.m.scale_pairs.push_back({"shoulder" + sfx, "elbow" + sfx, s.m.find_body("humerus" + sfx)});
    s.m.scale_pairs.push_back({"elbow" + sfx, "wrist" + sfx, s.m.find_body("radius" + sfx)});
  }

  s.m.right_foot = s.m.find_body("calcn_r");
  s.m.left_foot = s.m.find_body("calcn_l");
  s.m.validate();
  return s.m;
}

namespace {

std::string vec_text(const Vec3& v) { return text::fmt(v.x()) + " " + text::fmt(v.y()) + " " + text::fmt(v.z()); }

}  // namespace

std::string skeleton_to_text(const SkeletonModel& model) {
  std::ostringstream out;
  out << "# footsim skeleton\n";
  out << "# body <name> <parent|-> <ox> <oy> <oz>\n";
  out << "# dof <name> <body> <ax> <ay> <az> <lower> <upper>\n";
  out << "# mass <body> <kg> <cx> <cy> <cz> <ixx> <iyy> <izz>\n";
  out << "# site <name> <body> <ox> <oy> <oz>\n";
  out << "# foot <right|left> <body>\n";
  out << "# scale <site_a> <site_b> <body>\n";
  for (const auto& b : model.bodies) {
    std::string parent = b.parent < 0 ? "-" : model.bodies[static_cast<std::size_t>(b.parent)].name;
    out << "body " << b.name << " " << parent << " " << vec_text(b.offset) << "\n";
  }
  for (const auto& d : model.dofs)
    out << "dof " << d.name << " " << model.bodies[static_cast<std::size_t>(d.body)].name << " " << vec_text(d.axis)
        << " " << text::fmt(d.lower) << " " << text::fmt(d.upper) << "\n";
  for (const auto& b : model.bodies)
    out << "mass " << b.name << " " << text::fmt(b.mass) << " " << vec_text(b.com) << " " << vec_text(b.inertia)
        << "\n";
  for (const auto& s : model.sites)
    out << "site " << s.name << " " << model.bodies[static_cast<std::size_t>(s.body)].name << " "
        << vec_text(s.offset) << "\n";
  out << "foot right " << model.bodies[static_cast<std::size_t>(model.right_foot)].name << "\n";
  out << "foot left " << model.bodies[static_cast<std::size_t>(model.left_foot)].name << "\n";
  for (const auto& p : model.scale_pairs)
    out << "scale " << p.site_a << " " << p.site_b << " " << model.bodies[static_cast<std::size_t>(p.body)].name
        << "\n";
  return out.str();
}

SkeletonModel parse_skeleton(const std::string& contents, const std::string& source) {
  SkeletonModel m;
  text::LineReader reader(contents, source);
  std::string_view line;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_number();
    auto tok = text::split_ws(line);
    auto need = [&](std::size_t n) {
      if (tok.size() != n)
        throw ParseError(source, ln, "'" + std::string(tok[0]) + "' expects " + std::to_string(n - 1) + " fields");
    };
    auto num = [&](std::size_t i) { return text::parse_double(tok[i], source, ln); };
    auto vec = [&](std::size_t i) { return Vec3(num(i), num(i + 1), num(i + 2)); };
    auto body_ref = [&](std::size_t i) {
      int b = m.find_body(std::string(tok[i]));
      if (b < 0) throw ParseError(source, ln, "unknown body '" + std::string(tok[i]) + "'");
      return b;
    };
    const std::string kind(tok[0]);
    if (kind == "body") {
      need(6);
      Body b;
      b.name = std::string(tok[1]);
      if (m.find_body(b.name) >= 0) throw ParseError(source, ln, "duplicate body '" + b.name + "'");
      if (tok[2] == "-") {
        if (!m.bodies.empty()) throw ParseError(source, ln, "only the first body may be the root");
        b.parent = -1;
      } else {
        b.parent = body_ref(2);
      }
      if (m.bodies.empty() && b.parent != -1) throw ParseError(source, ln, "first body must be the root");
      b.offset = vec(3);
      m.bodies.push_back(b);
    } else if (kind == "dof") {
      need(8);
      Dof d;
      d.name = std::string(tok[1]);
      if (m.find_dof(d.name) >= 0) throw ParseError(source, ln, "duplicate dof '" + d.name + "'");
      d.body = body_ref(2);
      Vec3 axis = vec(3);
      if (!(axis.norm() > 0)) throw ParseError(source, ln, "dof axis must be non-zero");
      d.axis = axis.normalized();
      d.lower = num(6);
      d.upper = num(7);
      if (!(d.lower <= 0.0 && 0.0 <= d.upper)) throw ParseError(source, ln, "dof limits must bracket zero");
      m.bodies[static_cast<std::size_t>(d.body)].dofs.push_back(static_cast<int>(m.dofs.size()));
      m.dofs.push_back(d);
    } else if (kind == "mass") {
      need(9);
      Body& b = m.bodies[static_cast<std::size_t>(body_ref(1))];
      b.mass = num(2);
      b.com = vec(3);
      b.inertia = vec(6);
      if (b.mass < 0 || (b.inertia.array() < 0).any())
        throw ParseError(source, ln, "mass and inertia must be non-negative");
    } else if (kind == "site") {
      need(6);
      Site s{std::string(tok[1]), body_ref(2), vec(3)};
      if (m.find_site(s.name) >= 0) throw ParseError(source, ln, "duplicate site '" + s.name + "'");
      m.sites.push_back(s);
    } else if (kind == "foot") {
      need(3);
      int b = body_ref(2);
      if (tok[1] == "right") m.right_foot = b;
      else if (tok[1] == "left") m.left_foot = b;
      else throw ParseError(source, ln, "foot side must be right or left");
    } else if (kind == "scale") {
      need(4);
      m.scale_pairs.push_back({std::string(tok[1]), std::string(tok[2]), body_ref(3)});
    } else {
      throw ParseError(source, ln, "unknown record '" + kind + "'");
    }
  }
  for (const auto& p : m.scale_pairs)
    if (m.find_site(p.site_a) < 0 || m.find_site(p.site_b) < 0)
      fail(ErrorKind::Parse, source + ": scale pair names an unknown site");
  try {
    m.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Parse, source + ": " + e.what());
  }
  return m;
}

SkeletonModel load_skeleton(const std::string& path) { return parse_skeleton(text::read_file(path), path); }

Kinematics forward_kinematics(const SkeletonModel& model, const VecX& q, const Vec3& root_translation) {
  if (q.size() != model.dof_count())
    fail(ErrorKind::InvalidArgument, "q has " + std::to_string(q.size()) + " entries, skeleton has " +
                                         std::to_string(model.dof_count()));
  Kinematics kin;
  kin.body_poses.resize(model.bodies.size());
  kin.dof_axis.resize(model.dofs.size());
  kin.dof_origin.resize(model.dofs.size());
  for (std::size_t i = 0; i < model.bodies.size(); ++i) {
    const Body& b = model.bodies[i];
    Pose pose;
    if (b.parent < 0) {
      pose.position = root_translation + b.offset;
    } else {
      const Pose& parent = kin.body_poses[static_cast<std::size_t>(b.parent)];
      pose.position = parent.apply(b.offset);
      pose.orientation = parent.orientation;
    }
    for (int d : b.dofs) {
      const auto k = static_cast<std::size_t>(d);
      Vec3 axis = pose.orientation * model.dofs[k].axis;
      kin.dof_axis[k] = axis;
      kin.dof_origin[k] = pose.position;
      pose.orientation = (pose.orientation * Quat(Eigen::AngleAxisd(q[d], model.dofs[k].axis))).normalized();
    }
    kin.body_poses[i] = pose;
  }
  return kin;
}

std::vector<Vec3> forward_sites(const SkeletonModel& model, const VecX& q, const Vec3& root_translation) {
  Kinematics kin = forward_kinematics(model, q, root_translation);
  std::vector<Vec3> out;
  out.reserve(model.sites.size());
  for (const auto& s : model.sites) out.push_back(kin.body_poses[static_cast<std::size_t>(s.body)].apply(s.offset));
  return out;
}

Eigen::Matrix<double, 3, Eigen::Dynamic> point_jacobian(const SkeletonModel& model, const Kinematics& kin,
                                                        int body, const Vec3& world_point) {
  Eigen::Matrix<double, 3, Eigen::Dynamic> J = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, 3 + model.dof_count());
  J.leftCols<3>().setIdentity();
  for (int b = body; b >= 0; b = model.bodies[static_cast<std::size_t>(b)].parent) {
    for (int d : model.bodies[static_cast<std::size_t>(b)].dofs) {
      const auto k = static_cast<std::size_t>(d);
      J.col(3 + d) = kin.dof_axis[k].cross(world_point - kin.dof_origin[k]);
    }
  }
  return J;
}

VecX clamp_to_limits(const SkeletonModel& model, const VecX& q) {
  VecX out = q;
  for (int i = 0; i < model.dof_count(); ++i) {
    const auto& d = model.dofs[static_cast<std::size_t>(i)];
    out[i] = std::clamp(out[i], d.lower, d.upper);
  }
  return out;
}

}  // namespace footsim
