#include "retargeting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "error.hpp"
#include "text.hpp"

namespace footsim {

KeypointSequence parse_keypoints(const std::string& contents, const std::string& source) {
  KeypointSequence seq;
  text::LineReader reader(contents, source);
  std::string_view line;
  if (!reader.next(line)) throw ParseError(source, reader.line_number(), "empty keypoint file");
  {
    auto cols = text::split(line, ',');
    const char* expected[] = {"frame", "site", "x", "y", "z"};
    bool ok = cols.size() == 5;
    for (std::size_t i = 0; ok && i < 5; ++i) ok = text::trim(cols[i]) == expected[i];
    if (!ok) throw ParseError(source, reader.line_number(), "expected header frame,site,x,y,z");
  }
  std::map<std::string, std::size_t> site_index;
  long current = -1;
  std::vector<bool> seen;
  bool first_frame = true;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_number();
    auto cols = text::split(line, ',');
    if (cols.size() != 5)
      throw ParseError(source, ln, "expected 5 fields, found " + std::to_string(cols.size()));
    long frame = text::parse_long(text::trim(cols[0]), source, ln);
    std::string site(text::trim(cols[1]));
    Vec3 p(text::parse_double(text::trim(cols[2]), source, ln), text::parse_double(text::trim(cols[3]), source, ln),
           text::parse_double(text::trim(cols[4]), source, ln));
    if (!p.allFinite()) throw ParseError(source, ln, "non-finite keypoint");
    if (frame != current) {
      if (frame != current + 1) throw ParseError(source, ln, "frame " + std::to_string(frame) + " out of sequence");
      if (!first_frame && std::find(seen.begin(), seen.end(), false) != seen.end())
        throw ParseError(source, ln, "frame " + std::to_string(current) + " is missing sites");
      if (current >= 0) first_frame = false;
      current = frame;
      seq.frames.emplace_back(seq.site_names.size(), Vec3::Constant(std::numeric_limits<double>::quiet_NaN()));
      std::fill(seen.begin(), seen.end(), false);
    }
    auto it = site_index.find(site);
    if (it == site_index.end()) {
      if (!first_frame) throw ParseError(source, ln, "site '" + site + "' not present in frame 0");
      site_index[site] = seq.site_names.size();
      seq.site_names.push_back(site);
      seq.frames.back().push_back(p);
      seen.push_back(true);
      continue;
    }
    if (seen[it->second]) throw ParseError(source, ln, "duplicate site '" + site + "' in frame");
    seen[it->second] = true;
    seq.frames.back()[it->second] = p;
  }
  if (seq.frames.empty()) throw ParseError(source, reader.line_number(), "no keypoint rows");
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw ParseError(source, reader.line_number(), "last frame is missing sites");
  for (const auto& c : reader.comments()) {
    auto tok = text::split_ws(c);
    if (tok.size() == 2 && tok[0] == "rate_hz") seq.rate = text::parse_double(tok[1], source, 0);
  }
  if (!(seq.rate > 0)) fail(ErrorKind::Parse, source + ": rate_hz must be positive");
  return seq;
}

KeypointSequence load_keypoints(const std::string& path) { return parse_keypoints(text::read_file(path), path); }

std::string keypoints_to_csv(const KeypointSequence& seq, const std::vector<std::string>& header) {
  std::ostringstream out;
  for (const auto& h : header) out << "# " << h << "\n";
  out << "# rate_hz " << text::fmt(seq.rate) << "\n";
  out << "frame,site,x,y,z\n";
  for (std::size_t t = 0; t < seq.frames.size(); ++t)
    for (std::size_t k = 0; k < seq.site_names.size(); ++k) {
      const Vec3& p = seq.frames[t][k];
      out << t << "," << seq.site_names[k] << "," << text::fmt(p.x()) << "," << text::fmt(p.y()) << ","
          << text::fmt(p.z()) << "\n";
    }
  return out.str();
}

std::vector<std::vector<Vec3>> targets_in_site_order(const SkeletonModel& model, const KeypointSequence& seq) {
  std::vector<std::size_t> column(model.sites.size());
  for (std::size_t i = 0; i < model.sites.size(); ++i) {
    auto it = std::find(seq.site_names.begin(), seq.site_names.end(), model.sites[i].name);
    if (it == seq.site_names.end()) fail(ErrorKind::InvalidArgument, "keypoints lack site '" + model.sites[i].name + "'");
    column[i] = static_cast<std::size_t>(it - seq.site_names.begin());
  }
  if (seq.site_names.size() != model.sites.size())
    fail(ErrorKind::InvalidArgument, "keypoints have " + std::to_string(seq.site_names.size()) + " sites per frame, expected " +
                                         std::to_string(model.sites.size()));
  std::vector<std::vector<Vec3>> out(seq.frames.size());
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    out[t].resize(model.sites.size());
    for (std::size_t i = 0; i < model.sites.size(); ++i) out[t][i] = seq.frames[t][column[i]];
  }
  return out;
}

double ik_objective(const SkeletonModel& model, const std::vector<Vec3>& targets, const VecX& q, const Vec3& root,
                    double lambda) {
  auto sites = forward_sites(model, q, root);
  double f = 0.0;
  for (std::size_t i = 0; i < sites.size(); ++i) f += (sites[i] - targets[i]).squaredNorm();
  return f + lambda * q.squaredNorm();
}

namespace {

double max_residual(const SkeletonModel& model, const std::vector<Vec3>& targets, const VecX& q, const Vec3& root) {
  auto sites = forward_sites(model, q, root);
  double r = 0.0;
  for (std::size_t i = 0; i < sites.size(); ++i) r = std::max(r, (sites[i] - targets[i]).norm());
  return r;
}

}  // namespace

FrameSolution solve_frame(const SkeletonModel& model, const std::vector<Vec3>& targets, const VecX& q_init,
                          const SolveOptions& options) {
  require(q_init.size() == model.dof_count(), "q_init has the wrong dimension");
  require(targets.size() == model.sites.size(), "expected one target per site");
  for (const auto& t : targets) require(t.allFinite(), "non-finite IK target");
  // Translation that best aligns the initial pose with the targets.
  auto sites = forward_sites(model, q_init, Vec3::Zero());
  Vec3 root = Vec3::Zero();
  for (std::size_t i = 0; i < sites.size(); ++i) root += targets[i] - sites[i];
  root /= static_cast<double>(sites.size());
  return solve_frame(model, targets, q_init, root, options);
}

FrameSolution solve_frame(const SkeletonModel& model, const std::vector<Vec3>& targets, const VecX& q_init,
                          const Vec3& root_init, const SolveOptions& options) {
  require(options.lambda > 0, "lambda must be positive");
  require(q_init.size() == model.dof_count(), "q_init has the wrong dimension");
  require(targets.size() == model.sites.size(), "expected one target per site");
  for (const auto& t : targets) require(t.allFinite(), "non-finite IK target");
  require(q_init.allFinite() && root_init.allFinite(), "non-finite initial guess");
  for (int i = 0; i < model.dof_count(); ++i) {
    const auto& d = model.dofs[static_cast<std::size_t>(i)];
    require(q_init[i] >= d.lower - 1e-12 && q_init[i] <= d.upper + 1e-12, "q_init outside joint limits");
  }

  const int n = 3 + model.dof_count();
  const int m = 3 * model.site_count();
  FrameSolution sol;
  sol.q = clamp_to_limits(model, q_init);
  sol.root = root_init;
  sol.objective = ik_objective(model, targets, sol.q, sol.root, options.lambda);
  sol.objective_history.push_back(sol.objective);
  double mu = options.mu_initial;

  Eigen::MatrixXd J(m, n);
  VecX r(m);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    sol.iterations = iter + 1;
    Kinematics kin = forward_kinematics(model, sol.q, sol.root);
    for (int i = 0; i < model.site_count(); ++i) {
      const Site& s = model.sites[static_cast<std::size_t>(i)];
      Vec3 p = kin.body_poses[static_cast<std::size_t>(s.body)].apply(s.offset);
      r.segment<3>(3 * i) = targets[static_cast<std::size_t>(i)] - p;
      J.middleRows<3>(3 * i) = point_jacobian(model, kin, s.body, p);
    }
    Eigen::MatrixXd A = J.transpose() * J;
    VecX g = J.transpose() * r;
    g.tail(model.dof_count()) -= options.lambda * sol.q;
    A.diagonal().tail(model.dof_count()).array() += options.lambda;
    // DoFs held at a limit by the descent direction are frozen for this step,
    // so the clamp does not bend the step of the free coordinates.
    for (int i = 0; i < model.dof_count(); ++i) {
      const auto& d = model.dofs[static_cast<std::size_t>(i)];
      const int c = 3 + i;
      const bool at_lower = sol.q[i] <= d.lower + 1e-12 && g[c] < 0.0;
      const bool at_upper = sol.q[i] >= d.upper - 1e-12 && g[c] > 0.0;
      if (!at_lower && !at_upper) continue;
      A.row(c).setZero();
      A.col(c).setZero();
      A(c, c) = 1.0;
      g[c] = 0.0;
    }

    bool accepted = false;
    bool stalled = false;
    VecX step_taken;
    while (!accepted) {
      Eigen::MatrixXd Am = A;
      Am.diagonal().array() += mu;
      VecX delta = Am.ldlt().solve(g);
      if (!delta.allFinite()) fail(ErrorKind::Numerical, "IK step is not finite");
      double alpha = 1.0;
      for (int h = 0; h <= options.max_halvings; ++h, alpha *= 0.5) {
        VecX q_try = clamp_to_limits(model, sol.q + alpha * delta.tail(model.dof_count()));
        Vec3 root_try = sol.root + alpha * delta.head<3>();
        double f = ik_objective(model, targets, q_try, root_try, options.lambda);
        if (f <= sol.objective) {
          step_taken.resize(n);
          step_taken << root_try - sol.root, q_try - sol.q;
          sol.q = q_try;
          sol.root = root_try;
          sol.objective = f;
          accepted = true;
          mu = h == 0 ? std::max(mu / 3.0, 1e-12) : mu * 2.0;
          break;
        }
      }
      if (!accepted) {
        mu *= 10.0;
        if (mu > 1e8) {
          stalled = true;
          break;
        }
      }
    }
    if (stalled) {
      sol.converged = true;  // no descent direction left at working precision
      break;
    }
    sol.objective_history.push_back(sol.objective);
    if (step_taken.norm() < options.step_tolerance) {
      sol.converged = true;
      break;
    }
  }
  sol.damping = mu;
  sol.max_site_residual = max_residual(model, targets, sol.q, sol.root);
  return sol;
}

JointTrajectory solve_trajectory(const SkeletonModel& model, const KeypointSequence& seq,
                                 const SolveOptions& options, TrajectorySolveStats* stats) {
  auto targets = targets_in_site_order(model, seq);
  require(!targets.empty(), "keypoint sequence has no frames");
  JointTrajectory traj;
  traj.rate = seq.rate;
  TrajectorySolveStats local;
  VecX q = VecX::Zero(model.dof_count());
  FrameSolution sol = solve_frame(model, targets[0], q, options);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (t > 0) {
      SolveOptions warm = options;
      warm.mu_initial = std::min(options.mu_initial, sol.damping);
      sol = solve_frame(model, targets[t], sol.q, sol.root, warm);
    }
    traj.q.push_back(sol.q);
    traj.root.push_back(sol.root);
    local.max_site_residual = std::max(local.max_site_residual, sol.max_site_residual);
    if (!sol.converged) ++local.unconverged_frames;
  }
  if (stats) *stats = local;
  return traj;
}

std::vector<double> finite_difference(const std::vector<double>& x, double rate) {
  const std::size_t n = x.size();
  require(n >= 2, "finite differences need at least 2 frames");
  std::vector<double> v(n);
  if (n == 2) {
    v[0] = v[1] = (x[1] - x[0]) * rate;
    return v;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) v[i] = 0.5 * (x[i + 1] - x[i - 1]) * rate;
  v[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) * 0.5 * rate;
  v[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) * 0.5 * rate;
  return v;
}

JointTrajectory finite_difference_velocities(const JointTrajectory& traj) {
  const std::size_t n = traj.frame_count();
  require(n >= 2, "finite differences need at least 2 frames");
  JointTrajectory out = traj;
  const auto dofs = static_cast<std::size_t>(traj.q[0].size());
  out.qdot.assign(n, VecX::Zero(static_cast<Eigen::Index>(dofs)));
  std::vector<double> channel(n);
  for (std::size_t k = 0; k < dofs; ++k) {
    for (std::size_t t = 0; t < n; ++t) channel[t] = traj.q[t][static_cast<Eigen::Index>(k)];
    auto v = finite_difference(channel, traj.rate);
    for (std::size_t t = 0; t < n; ++t) out.qdot[t][static_cast<Eigen::Index>(k)] = v[t];
  }
  return out;
}

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;

  // Direct form II transposed with state initialized to steady output at x0.
  void run(std::vector<double>& x) const {
    if (x.empty()) return;
    double z2 = (b2 - a2) * x[0];
    double z1 = (b1 - a1) * x[0] + z2;
    for (double& s : x) {
      double in = s;
      double y = b0 * in + z1;
      z1 = b1 * in - a1 * y + z2;
      z2 = b2 * in - a2 * y;
      s = y;
    }
  }
};

Biquad butterworth2(double rate, double cutoff) {
  const double k = std::tan(kPi * cutoff / rate);
  const double norm = 1.0 / (1.0 + std::sqrt(2.0) * k + k * k);
  Biquad f;
  f.b0 = k * k * norm;
  f.b1 = 2.0 * f.b0;
  f.b2 = f.b0;
  f.a1 = 2.0 * (k * k - 1.0) * norm;
  f.a2 = (1.0 - std::sqrt(2.0) * k + k * k) * norm;
  return f;
}

}  // namespace

std::vector<double> zero_phase_lowpass(const std::vector<double>& x, double rate, double cutoff) {
  require(rate > 0, "sample rate must be positive");
  require(cutoff > 0, "cutoff must be positive");
  if (!(cutoff < 0.5 * rate))
    fail(ErrorKind::InvalidArgument, "cutoff " + text::fmt(cutoff) + " Hz is not below the Nyquist frequency " +
                                         text::fmt(0.5 * rate) + " Hz");
  const std::size_t n = x.size();
  if (n < 2) return x;
  const Biquad f = butterworth2(rate, cutoff);
  // Odd reflection about each end keeps the value and slope continuous.
  const auto want = static_cast<std::size_t>(3.0 * std::ceil(rate / cutoff));
  const std::size_t pad = std::min(n - 1, std::max<std::size_t>(9, want));
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);
  f.run(ext);
  std::reverse(ext.begin(), ext.end());
  f.run(ext);
  std::reverse(ext.begin(), ext.end());
  return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                             ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

std::vector<double> linear_resample(const std::vector<double>& x, double rate, double target_rate) {
  require(rate > 0 && target_rate > 0, "sample rates must be positive");
  require(!x.empty(), "cannot resample an empty series");
  if (x.size() == 1) return x;
  const double duration = static_cast<double>(x.size() - 1) / rate;
  const auto count = static_cast<std::size_t>(std::floor(duration * target_rate + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    double s = static_cast<double>(k) * rate / target_rate;
    auto i = static_cast<std::size_t>(std::floor(s));
    if (i >= x.size() - 1) {
      i = x.size() - 2;
    }
    double frac = s - static_cast<double>(i);
    out[k] = x[i] + frac * (x[i + 1] - x[i]);
  }
  return out;
}

JointTrajectory resample_and_filter(const JointTrajectory& traj, double target_rate, double cutoff,
                                    const SkeletonModel* limits) {
  require(target_rate > 0, "target rate must be positive");
  require(traj.frame_count() >= 1, "trajectory has no frames");
  if (!(cutoff < 0.5 * target_rate))
    fail(ErrorKind::InvalidArgument, "cutoff " + text::fmt(cutoff) + " Hz is not below the Nyquist frequency " +
                                         text::fmt(0.5 * target_rate) + " Hz");
  const std::size_t n = traj.frame_count();
  const auto dofs = static_cast<Eigen::Index>(traj.q[0].size());
  auto process = [&](auto get) {
    std::vector<double> ch(n);
    for (std::size_t t = 0; t < n; ++t) ch[t] = get(t);
    return zero_phase_lowpass(linear_resample(ch, traj.rate, target_rate), target_rate, cutoff);
  };
  JointTrajectory out;
  out.rate = target_rate;
  std::size_t count = 0;
  std::vector<std::vector<double>> qch(static_cast<std::size_t>(dofs)), rch(3);
  for (Eigen::Index k = 0; k < dofs; ++k) {
    qch[static_cast<std::size_t>(k)] = process([&](std::size_t t) { return traj.q[t][k]; });
    count = qch[static_cast<std::size_t>(k)].size();
  }
  for (int k = 0; k < 3; ++k) {
    rch[static_cast<std::size_t>(k)] = process([&](std::size_t t) { return traj.root[t][k]; });
    count = rch[static_cast<std::size_t>(k)].size();
  }
  out.q.assign(count, VecX::Zero(dofs));
  out.root.assign(count, Vec3::Zero());
  for (std::size_t t = 0; t < count; ++t) {
    for (Eigen::Index k = 0; k < dofs; ++k) out.q[t][k] = qch[static_cast<std::size_t>(k)][t];
    for (int k = 0; k < 3; ++k) out.root[t][k] = rch[static_cast<std::size_t>(k)][t];
    if (limits) out.q[t] = clamp_to_limits(*limits, out.q[t]);
  }
  if (count >= 2) return finite_difference_velocities(out);
  out.qdot.assign(count, VecX::Zero(dofs));
  return out;
}

ScaleResult scale_skeleton(const SkeletonModel& model, const KeypointSequence& seq) {
  auto targets = targets_in_site_order(model, seq);
  require(!targets.empty(), "keypoint sequence has no frames");
  ScaleResult out;
  out.model = model;
  const auto rest = forward_sites(model, VecX::Zero(model.dof_count()), Vec3::Zero());
  for (const auto& pair : model.scale_pairs) {
    const auto a = static_cast<std::size_t>(model.find_site(pair.site_a));
    const auto b = static_cast<std::size_t>(model.find_site(pair.site_b));
    double rest_len = (rest[a] - rest[b]).norm();
    require(rest_len > 1e-9, "scale pair " + pair.site_a + "-" + pair.site_b + " has zero rest length");
    double measured = 0.0;
    for (const auto& frame : targets) measured += (frame[a] - frame[b]).norm();
    measured /= static_cast<double>(targets.size());
    const double s = measured / rest_len;
    out.factors.push_back(s);
    SkeletonModel& m = out.model;
    for (auto& child : m.bodies)
      if (child.parent == pair.body) child.offset *= s;
    for (auto& site : m.sites)
      if (site.body == pair.body) site.offset *= s;
    Body& body = m.bodies[static_cast<std::size_t>(pair.body)];
    body.com *= s;
    body.inertia *= s * s;
  }
  return out;
}

std::string trajectory_to_csv(const SkeletonModel& model, const JointTrajectory& traj,
                              const std::vector<std::string>& header) {
  require(traj.qdot.size() == traj.q.size(), "trajectory velocities are missing");
  std::ostringstream out;
  for (const auto& h : header) out << "# " << h << "\n";
  out << "# rate_hz " << text::fmt(traj.rate) << "\n";
  out << "time,root_x,root_y,root_z";
  for (const auto& d : model.dofs) out << "," << d.name;
  for (const auto& d : model.dofs) out << "," << d.name << "_vel";
  out << "\n";
  for (std::size_t t = 0; t < traj.q.size(); ++t) {
    out << text::fmt(static_cast<double>(t) / traj.rate);
    for (int k = 0; k < 3; ++k) out << "," << text::fmt(traj.root[t][k]);
    for (Eigen::Index k = 0; k < traj.q[t].size(); ++k) out << "," << text::fmt(traj.q[t][k]);
    for (Eigen::Index k = 0; k < traj.qdot[t].size(); ++k) out << "," << text::fmt(traj.qdot[t][k]);
    out << "\n";
  }
  return out.str();
}

JointTrajectory parse_trajectory(const SkeletonModel& model, const std::string& contents, const std::string& source) {
  text::LineReader reader(contents, source);
  std::string_view line;
  if (!reader.next(line)) throw ParseError(source, reader.line_number(), "empty trajectory file");
  const auto dofs = static_cast<std::size_t>(model.dof_count());
  {
    auto cols = text::split(line, ',');
    std::vector<std::string> expected = {"time", "root_x", "root_y", "root_z"};
    for (const auto& d : model.dofs) expected.push_back(d.name);
    for (const auto& d : model.dofs) expected.push_back(d.name + "_vel");
    if (cols.size() != expected.size())
      throw ParseError(source, reader.line_number(), "trajectory header has " + std::to_string(cols.size()) +
                                                         " columns, expected " + std::to_string(expected.size()));
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (text::trim(cols[i]) != expected[i])
        throw ParseError(source, reader.line_number(), "column " + std::to_string(i + 1) + " should be '" +
                                                           expected[i] + "'");
  }
  JointTrajectory traj;
  std::vector<double> times;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_number();
    auto cols = text::split(line, ',');
    if (cols.size() != 4 + 2 * dofs)
      throw ParseError(source, ln, "expected " + std::to_string(4 + 2 * dofs) + " fields, found " +
                                       std::to_string(cols.size()));
    std::vector<double> v(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) v[i] = text::parse_double(text::trim(cols[i]), source, ln);
    times.push_back(v[0]);
    traj.root.emplace_back(v[1], v[2], v[3]);
    VecX q(static_cast<Eigen::Index>(dofs)), qd(static_cast<Eigen::Index>(dofs));
    for (std::size_t k = 0; k < dofs; ++k) {
      q[static_cast<Eigen::Index>(k)] = v[4 + k];
      qd[static_cast<Eigen::Index>(k)] = v[4 + dofs + k];
    }
    traj.q.push_back(q);
    traj.qdot.push_back(qd);
  }
  if (traj.q.empty()) throw ParseError(source, reader.line_number(), "no trajectory rows");
  double rate = 0.0;
  for (const auto& c : reader.comments()) {
    auto tok = text::split_ws(c);
    if (tok.size() == 2 && tok[0] == "rate_hz") rate = text::parse_double(tok[1], source, 0);
  }
  if (rate <= 0.0 && times.size() >= 2) rate = 1.0 / (times[1] - times[0]);
  if (!(rate > 0.0)) fail(ErrorKind::Parse, source + ": cannot determine the sample rate");
  for (std::size_t t = 0; t < times.size(); ++t)
    if (std::abs(times[t] - static_cast<double>(t) / rate) > 1e-6)
      fail(ErrorKind::Parse, source + ": row " + std::to_string(t) + " breaks uniform sample spacing");
  traj.rate = rate;
  return traj;
}

JointTrajectory load_trajectory(const SkeletonModel& model, const std::string& path) {
  return parse_trajectory(model, text::read_file(path), path);
}

namespace {

Vec3 root_tangent(const JointTrajectory& traj, std::size_t i) {
  const std::size_t n = traj.frame_count();
  if (n < 2) return Vec3::Zero();
  if (i == 0) return (traj.root[1] - traj.root[0]) * traj.rate;
  if (i == n - 1) return (traj.root[n - 1] - traj.root[n - 2]) * traj.rate;
  return (traj.root[i + 1] - traj.root[i - 1]) * (0.5 * traj.rate);
}

}  // namespace

void sample_trajectory(const JointTrajectory& traj, double time, VecX& q, Vec3& root) {
  require(!traj.q.empty(), "trajectory has no frames");
  const std::size_t n = traj.frame_count();
  double s = std::clamp(time * traj.rate, 0.0, static_cast<double>(n - 1));
  auto i = static_cast<std::size_t>(std::floor(s));
  if (i >= n - 1) {
    q = traj.q[n - 1];
    root = traj.root[n - 1];
    return;
  }
  // Cubic Hermite so the sampled motion has continuous velocity; tangents
  // are the stored joint velocities when present.
  const double u = s - static_cast<double>(i);
  const double h = 1.0 / traj.rate;
  const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
  const double h10 = u * (1.0 - u) * (1.0 - u);
  const double h01 = u * u * (3.0 - 2.0 * u);
  const double h11 = u * u * (u - 1.0);
  if (traj.qdot.size() == n) {
    q = h00 * traj.q[i] + h01 * traj.q[i + 1] + (h * h10) * traj.qdot[i] + (h * h11) * traj.qdot[i + 1];
  } else {
    q = traj.q[i] + u * (traj.q[i + 1] - traj.q[i]);
  }
  root = h00 * traj.root[i] + h01 * traj.root[i + 1] + (h * h10) * root_tangent(traj, i) +
         (h * h11) * root_tangent(traj, i + 1);
}

void sample_velocity(const JointTrajectory& traj, double time, VecX& qdot) {
  require(!traj.qdot.empty() && traj.qdot.size() == traj.q.size(), "trajectory has no velocities");
  const std::size_t n = traj.frame_count();
  double s = std::clamp(time * traj.rate, 0.0, static_cast<double>(n - 1));
  auto i = static_cast<std::size_t>(std::floor(s));
  if (i >= n - 1) {
    qdot = traj.qdot[n - 1];
    return;
  }
  double frac = s - static_cast<double>(i);
  qdot = traj.qdot[i] + frac * (traj.qdot[i + 1] - traj.qdot[i]);
}

}  // namespace footsim
