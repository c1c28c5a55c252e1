#include "biomech_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <set>

#include "error.hpp"
#include "text.hpp"

namespace footsim {

const char* region_name(Region r) {
  switch (r) {
    case Region::Heel: return "heel";
    case Region::Midfoot: return "midfoot";
    case Region::Forefoot: return "forefoot";
    case Region::Toes: return "toes";
  }
  return "?";
}

void RegionBounds::validate() const {
  require(0.0 < heel && heel < midfoot && midfoot < forefoot && forefoot < 1.0,
          "region bounds must satisfy 0 < heel < midfoot < forefoot < 1");
}

Region classify_region(double f, const RegionBounds& b) {
  if (f < b.heel) return Region::Heel;
  if (f < b.midfoot) return Region::Midfoot;
  if (f < b.forefoot) return Region::Forefoot;
  return Region::Toes;
}

namespace {

double length_fraction(const FootMesh& mesh, double x) {
  require(mesh.length() > 0, "mesh has zero length");
  return (x - mesh.bbox_min.x()) / mesh.length();
}

}  // namespace

std::vector<Region> vertex_regions(const FootMesh& mesh, const RegionBounds& b) {
  b.validate();
  std::vector<Region> out;
  out.reserve(mesh.vertex_count());
  for (const auto& v : mesh.vertices) out.push_back(classify_region(length_fraction(mesh, v.x()), b));
  return out;
}

std::vector<Region> edge_regions(const FootMesh& mesh, const RegionBounds& b) {
  b.validate();
  std::vector<Region> out;
  out.reserve(mesh.edges.size());
  for (const auto& e : mesh.edges) {
    const double x = 0.5 * (mesh.vertices[static_cast<std::size_t>(e.a)].x() + mesh.vertices[static_cast<std::size_t>(e.b)].x());
    out.push_back(classify_region(length_fraction(mesh, x), b));
  }
  return out;
}

std::vector<Region> sphere_regions(const FootMesh& mesh, const SphereLayout& layout, const RegionBounds& b) {
  b.validate();
  std::vector<Region> out;
  for (const auto& c : layout.centers) out.push_back(classify_region(length_fraction(mesh, c.x()), b));
  return out;
}

std::vector<double> edge_strain(const FootMesh& mesh, const std::vector<double>& u) {
  require(u.size() == mesh.vertex_count(), "flex state does not match the mesh");
  std::vector<double> out;
  out.reserve(mesh.edges.size());
  for (const auto& e : mesh.edges) {
    const auto a = static_cast<std::size_t>(e.a);
    const auto b = static_cast<std::size_t>(e.b);
    const Vec3 pa = mesh.vertices[a] + u[a] * mesh.radial_dir[a];
    const Vec3 pb = mesh.vertices[b] + u[b] * mesh.radial_dir[b];
    out.push_back((pb - pa).norm() / e.rest_length - 1.0);
  }
  return out;
}

std::vector<double> edge_strain(const FootMesh& mesh, const FlexState& state) { return edge_strain(mesh, state.u); }

namespace {

long sample_index(double time, double rate) { return std::lround(time * rate); }

Vec3 record_force(const ContactRecord& r) { return r.tangential + Vec3(0.0, 0.0, r.normal); }

// Records grouped by instant, in time order.
std::vector<std::vector<const ContactRecord*>> by_instant(const std::vector<ContactRecord>& log) {
  std::map<long long, std::vector<const ContactRecord*>> groups;
  for (const auto& r : log) groups[std::llround(r.time * 1e9)].push_back(&r);
  std::vector<std::vector<const ContactRecord*>> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) out.push_back(std::move(g));
  return out;
}

}  // namespace

GrfHeatmap grf_heatmap(const std::vector<ContactRecord>& log, double bin_width) {
  require(bin_width > 0, "heatmap bin width must be positive");
  GrfHeatmap h;
  h.bin_width = bin_width;
  if (log.empty()) return h;
  std::map<ContactPoint, std::size_t> rows;
  long max_bin = 0;
  for (const auto& r : log) {
    rows.emplace(ContactPoint{r.side, r.vertex}, 0);
    max_bin = std::max(max_bin, static_cast<long>(std::floor(r.time / bin_width + 1e-9)));
  }
  std::size_t k = 0;
  for (auto& [p, row] : rows) {
    row = k++;
    h.points.push_back(p);
  }
  h.values.assign(rows.size(), std::vector<double>(static_cast<std::size_t>(max_bin + 1), 0.0));
  for (const auto& r : log) {
    const auto bin = static_cast<std::size_t>(std::floor(r.time / bin_width + 1e-9));
    h.values[rows.at({r.side, r.vertex})][bin] += record_force(r).norm();
  }
  for (const auto& row : h.values)
    for (double v : row) h.peak_cell = std::max(h.peak_cell, v);
  for (const auto& group : by_instant(log)) {
    Vec3 total[2] = {Vec3::Zero(), Vec3::Zero()};
    for (const auto* r : group) total[static_cast<int>(r->side)] += record_force(*r);
    for (int s = 0; s < 2; ++s) {
      const double m = total[s].norm();
      h.peak_by_side[static_cast<std::size_t>(s)] = std::max(h.peak_by_side[static_cast<std::size_t>(s)], m);
      if (m > h.peak_total) {
        h.peak_total = m;
        h.peak_time = group.front()->time;
        h.peak_side = static_cast<Side>(s);
      }
    }
  }
  return h;
}

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  auto less = [](const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); };
  std::sort(pts.begin(), pts.end(), less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double signed_hull_distance(const std::vector<Vec2>& hull, const Vec2& p) {
  require(!hull.empty(), "support polygon is empty");
  if (hull.size() == 1) return -(p - hull[0]).norm();
  if (hull.size() == 2) return -segment_distance(p, hull[0], hull[1]);
  bool inside = true;
  double d = 1e300;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % hull.size()];
    if (cross(a, b, p) < 0) inside = false;
    d = std::min(d, segment_distance(p, a, b));
  }
  return inside ? d : -d;
}

ZmpResult zmp_and_margin(const std::vector<ContactRecord>& contacts, double threshold) {
  ZmpResult out;
  std::vector<Vec2> pts;
  Vec2 moment = Vec2::Zero();
  for (const auto& c : contacts) {
    if (c.normal <= 0) continue;
    ++out.active;
    out.total_normal += c.normal;
    moment += c.normal * c.position.head<2>();
    pts.emplace_back(c.position.head<2>());
  }
  if (out.total_normal <= threshold) {
    out.diagnostic = text::format("no support: total normal force %.6g N is not above %.6g N", out.total_normal, threshold);
    return out;
  }
  out.supported = true;
  out.zmp = moment / out.total_normal;
  out.margin = signed_hull_distance(convex_hull(std::move(pts)), out.zmp);
  return out;
}

std::vector<ZmpSample> zmp_trace(const std::vector<ContactRecord>& log, double threshold) {
  std::vector<ZmpSample> out;
  std::vector<ContactRecord> instant;
  for (const auto& group : by_instant(log)) {
    instant.clear();
    for (const auto* r : group) instant.push_back(*r);
    out.push_back({group.front()->time, zmp_and_margin(instant, threshold)});
  }
  return out;
}

std::vector<SegmentInertia> segment_inertias(const SkeletonModel& model) {
  std::vector<SegmentInertia> out;
  for (const auto& b : model.bodies) out.push_back({b.mass, b.inertia});
  return out;
}

namespace {

void check_inertia(const std::vector<SegmentState>& segments, const std::vector<SegmentInertia>& inertia) {
  require(segments.size() == inertia.size(),
          text::format("missing inertia entries: %zu segments but %zu mass entries", segments.size(), inertia.size()));
  for (const auto& s : inertia)
    require(std::isfinite(s.mass) && s.mass >= 0 && s.inertia.allFinite() && (s.inertia.array() >= 0).all(),
            "segment masses and inertias must be finite and non-negative");
}

}  // namespace

double kinetic_energy(const std::vector<SegmentState>& segments, const std::vector<SegmentInertia>& inertia) {
  check_inertia(segments, inertia);
  double ke = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    ke += 0.5 * inertia[i].mass * s.velocity.squaredNorm();
    ke += 0.5 * (inertia[i].inertia.array() * s.omega_body.array().square()).sum();
  }
  return ke;
}

double potential_energy(const std::vector<SegmentState>& segments, const std::vector<SegmentInertia>& inertia,
                        double datum, double gravity) {
  check_inertia(segments, inertia);
  double pe = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) pe += inertia[i].mass * gravity * (segments[i].com.z() - datum);
  return pe;
}

EnergySeries energies(const std::vector<BodyFrame>& frames, const std::vector<SegmentInertia>& inertia, double datum,
                      double gravity) {
  EnergySeries e;
  for (const auto& f : frames) {
    e.time.push_back(f.time);
    e.kinetic.push_back(kinetic_energy(f.segments, inertia));
    e.potential.push_back(potential_energy(f.segments, inertia, datum, gravity));
  }
  return e;
}

CvStats cv_stats(const std::vector<double>& x) {
  require(!x.empty(), "statistics need a non-empty series");
  CvStats s;
  for (double v : x) s.mean += v;
  s.mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(var / static_cast<double>(x.size()));
  require(s.mean != 0.0, "coefficient of variation is undefined for a zero mean");
  s.cv = s.sd / s.mean;
  return s;
}

ComSeries com_kinematics(const std::vector<BodyFrame>& frames, const std::vector<SegmentInertia>& inertia,
                         double gravity) {
  ComSeries out;
  if (frames.empty()) return out;
  double total = 0.0;
  for (const auto& s : inertia) total += s.mass;
  require(total > 0, "centre of mass needs a positive total mass");
  std::array<std::vector<double>, 3> vel;
  for (const auto& f : frames) {
    check_inertia(f.segments, inertia);
    Vec3 v = Vec3::Zero();
    for (std::size_t i = 0; i < f.segments.size(); ++i) v += inertia[i].mass * f.segments[i].velocity;
    v /= total;
    out.time.push_back(f.time);
    out.speed.push_back(v.norm());
    for (int k = 0; k < 3; ++k) vel[static_cast<std::size_t>(k)].push_back(v[k]);
  }
  if (frames.size() < 2) {
    out.accel.assign(1, 0.0);
    out.accel_with_gravity.assign(1, gravity);
    return out;
  }
  const double rate = static_cast<double>(frames.size() - 1) / (frames.back().time - frames.front().time);
  std::array<std::vector<double>, 3> acc;
  for (std::size_t k = 0; k < 3; ++k) acc[k] = finite_difference(vel[k], rate);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Vec3 a(acc[0][i], acc[1][i], acc[2][i]);
    out.accel.push_back(a.norm());
    out.accel_with_gravity.push_back((a + Vec3(0.0, 0.0, gravity)).norm());
  }
  return out;
}

void EventParams::validate() const {
  require(threshold > 0 && debounce >= 0, "event threshold must be positive and debounce non-negative");
}

RegionalSeries regional_series(const std::vector<ContactRecord>& log, Side side, const std::vector<Region>& map,
                               double rate, std::size_t samples) {
  require(rate > 0, "sample rate must be positive");
  RegionalSeries s;
  s.rate = rate;
  s.force.assign(samples, {0.0, 0.0, 0.0, 0.0});
  s.total.assign(samples, 0.0);
  for (const auto& r : log) {
    if (r.side != side) continue;
    require(r.vertex >= 0 && static_cast<std::size_t>(r.vertex) < map.size(),
            text::format("contact point %d has no region (map covers %zu points)", r.vertex, map.size()));
    const long n = sample_index(r.time, rate);
    require(n >= 0 && static_cast<std::size_t>(n) < samples, text::format("contact at t = %.6g s is outside the log", r.time));
    s.force[static_cast<std::size_t>(n)][static_cast<std::size_t>(map[static_cast<std::size_t>(r.vertex)])] += r.normal;
    s.total[static_cast<std::size_t>(n)] += r.normal;
  }
  return s;
}

std::vector<double> detect_strikes(const std::vector<double>& f, double rate, const EventParams& p) {
  p.validate();
  const long debounce = std::lround(p.debounce * rate);
  std::vector<double> out;
  // The log start counts as a long unloaded interval.
  long below = debounce;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < p.threshold) {
      ++below;
      continue;
    }
    if (i > 0 && f[i - 1] < p.threshold && below >= debounce) out.push_back(static_cast<double>(i) / rate);
    below = 0;
  }
  return out;
}

CycleSegmentation segment_cycles(const RegionalSeries& s, const EventParams& p) {
  CycleSegmentation out;
  std::vector<double> heel(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) heel[i] = s.force[i][static_cast<std::size_t>(Region::Heel)];
  out.strikes = detect_strikes(heel, s.rate, p);
  if (out.strikes.empty()) {
    out.diagnostic = text::format("no heel strike found: heel force never rose through %.6g N after %.6g s unloaded",
                         p.threshold, p.debounce);
    return out;
  }
  for (std::size_t k = 1; k < out.strikes.size(); ++k) out.cycles.push_back({out.strikes[k - 1], out.strikes[k]});
  const long debounce = std::max(1L, std::lround(p.debounce * s.rate));
  for (double t : out.strikes) {
    long last_loaded = sample_index(t, s.rate);
    long below = 0;
    for (auto j = static_cast<std::size_t>(last_loaded); j < s.size(); ++j) {
      if (s.total[j] >= p.threshold) {
        last_loaded = static_cast<long>(j);
        below = 0;
      } else if (++below >= debounce) {
        out.stances.push_back({t, static_cast<double>(last_loaded) / s.rate});
        break;
      }
    }
  }
  return out;
}

CycleSegmentation segment_cycles(const std::vector<ContactRecord>& log, Side side, const std::vector<Region>& map,
                                 double rate, std::size_t samples, const EventParams& p) {
  return segment_cycles(regional_series(log, side, map, rate, samples), p);
}

std::vector<int> stance_contact_counts(const std::vector<ContactRecord>& log, Side side,
                                       const std::vector<Stance>& stances) {
  std::vector<std::set<int>> points(stances.size());
  for (const auto& c : log) {
    if (c.side != side || !(c.normal > 0.0)) continue;
    auto it = std::upper_bound(stances.begin(), stances.end(), c.time,
                               [](double t, const Stance& st) { return t < st.start; });
    if (it == stances.begin()) continue;
    --it;
    if (c.time <= it->end + 1e-9) points[static_cast<std::size_t>(it - stances.begin())].insert(c.vertex);
  }
  std::vector<int> out;
  for (const auto& p : points) out.push_back(static_cast<int>(p.size()));
  return out;
}

ContinuityStats contact_continuity(const std::vector<ContactRecord>& log, Side side, double rate, std::size_t samples,
                                   double fraction) {
  require(rate > 0, "sample rate must be positive");
  require(fraction > 0, "continuity fraction must be positive");
  std::vector<std::vector<int>> active(samples);
  for (const auto& c : log) {
    if (c.side != side || !(c.normal > 0.0)) continue;
    const long n = std::lround(c.time * rate);
    if (n >= 0 && static_cast<std::size_t>(n) < samples) active[static_cast<std::size_t>(n)].push_back(c.vertex);
  }
  ContinuityStats out;
  for (auto& a : active) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    out.peak_active = std::max(out.peak_active, static_cast<int>(a.size()));
  }
  out.bound = fraction * out.peak_active;
  std::vector<int> diff;
  for (std::size_t n = 1; n < samples; ++n) {
    diff.clear();
    std::set_symmetric_difference(active[n - 1].begin(), active[n - 1].end(), active[n].begin(), active[n].end(),
                                  std::back_inserter(diff));
    const int d = static_cast<int>(diff.size());
    out.max_change = std::max(out.max_change, d);
    if (d > out.bound) ++out.violations;
  }
  return out;
}

RegionalCurves regional_forces(const RegionalSeries& s, const std::vector<GaitCycle>& cycles, int points) {
  require(points >= 2, "phase resampling needs at least 2 points");
  RegionalCurves out;
  out.points = points;
  const auto np = static_cast<std::size_t>(points);
  for (auto& m : out.mean) m.assign(np, 0.0);
  out.total_mean.assign(np, 0.0);
  if (s.size() == 0) return out;
  auto at = [&](double t, auto value) {
    const double x = std::clamp(t * s.rate, 0.0, static_cast<double>(s.size() - 1));
    const auto i = static_cast<std::size_t>(std::floor(x));
    if (i + 1 >= s.size()) return value(s.size() - 1);
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * value(i) + w * value(i + 1);
  };
  for (const auto& c : cycles) {
    require(c.end > c.start, "gait cycle must end after it starts");
    std::array<std::vector<double>, kRegionCount> curve;
    for (auto& v : curve) v.assign(np, 0.0);
    for (std::size_t k = 0; k < np; ++k) {
      const double t = c.start + c.duration() * static_cast<double>(k) / static_cast<double>(points - 1);
      for (std::size_t r = 0; r < kRegionCount; ++r) {
        curve[r][k] = at(t, [&](std::size_t i) { return s.force[i][r]; });
        out.mean[r][k] += curve[r][k];
      }
      out.total_mean[k] += at(t, [&](std::size_t i) { return s.total[i]; });
    }
    out.cycles.push_back(std::move(curve));
  }
  if (!cycles.empty()) {
    const double n = static_cast<double>(cycles.size());
    for (auto& m : out.mean)
      for (double& v : m) v /= n;
    for (double& v : out.total_mean) v /= n;
  }
  return out;
}

std::vector<ContactEpisode> contact_episodes(const std::vector<ContactRecord>& log, Side side, double rate,
                                             std::size_t samples, double min_gap) {
  require(rate > 0, "sample rate must be positive");
  std::vector<std::vector<int>> points(samples);
  std::vector<double> force(samples, 0.0);
  for (const auto& r : log) {
    if (r.side != side || r.normal <= 0) continue;
    const long n = sample_index(r.time, rate);
    require(n >= 0 && static_cast<std::size_t>(n) < samples, text::format("contact at t = %.6g s is outside the log", r.time));
    points[static_cast<std::size_t>(n)].push_back(r.vertex);
    force[static_cast<std::size_t>(n)] += r.normal;
  }
  const long gap = std::lround(min_gap * rate);
  std::vector<ContactEpisode> out;
  std::set<int> distinct;
  long start = -1;
  long last = -1;
  auto close = [&]() {
    ContactEpisode e;
    e.start = static_cast<double>(start) / rate;
    e.end = static_cast<double>(last) / rate;
    e.distinct_points = static_cast<int>(distinct.size());
    for (long i = start; i <= last; ++i) e.peak_force = std::max(e.peak_force, force[static_cast<std::size_t>(i)]);
    e.complete = start > 0 && static_cast<std::size_t>(last) + 1 < samples;
    out.push_back(e);
    distinct.clear();
  };
  for (std::size_t i = 0; i < samples; ++i) {
    if (points[i].empty()) continue;
    const auto n = static_cast<long>(i);
    if (start >= 0 && n - last > gap) close(), start = -1;
    if (start < 0) start = n;
    last = n;
    distinct.insert(points[i].begin(), points[i].end());
  }
  if (start >= 0) close();
  return out;
}

void AnalysisConfig::validate() const {
  regions.validate();
  events.validate();
  require(heatmap_bin > 0, "heatmap bin must be positive");
  require(zmp_threshold >= 0, "support threshold must be non-negative");
  require(late_stance > 0 && late_stance <= 1, "late-stance fraction must be in (0, 1]");
  require(phase_points >= 2, "phase resampling needs at least 2 points");
  require(continuity_fraction > 0, "continuity fraction must be positive");
}

namespace {

double mean_over(const std::vector<double>& strain, const std::vector<Region>& regions,
                 std::initializer_list<Region> keep) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t e = 0; e < strain.size(); ++e)
    if (std::find(keep.begin(), keep.end(), regions[e]) != keep.end()) {
      sum += strain[e];
      ++n;
    }
  return n ? sum / n : 0.0;
}

StrainSummary summarize_strain(const FootMesh& mesh, const std::vector<FlexFrame>& flex,
                               const CycleSegmentation& seg, double rate, const AnalysisConfig& cfg) {
  StrainSummary s;
  if (flex.empty()) return s;
  s.available = true;
  const auto regions = edge_regions(mesh, cfg.regions);
  for (const auto& f : flex)
    for (double e : edge_strain(mesh, f.u)) s.max_abs = std::max(s.max_abs, std::abs(e));
  auto frame = [&](double t) -> const FlexFrame* {
    const long n = sample_index(t, rate);
    return n >= 0 && static_cast<std::size_t>(n) < flex.size() ? &flex[static_cast<std::size_t>(n)] : nullptr;
  };
  double heel = 0.0;
  double mid = 0.0;
  for (double t : seg.strikes) {
    const FlexFrame* f = frame(t);
    if (!f) continue;
    const auto strain = edge_strain(mesh, f->u);
    heel += mean_over(strain, regions, {Region::Heel});
    mid += mean_over(strain, regions, {Region::Midfoot});
    ++s.strike_frames;
  }
  if (s.strike_frames) {
    s.heel_at_strike = heel / s.strike_frames;
    s.midfoot_at_strike = mid / s.strike_frames;
  }
  double fore = 0.0;
  for (const auto& st : seg.stances) {
    const long a = sample_index(st.end - cfg.late_stance * st.duration(), rate);
    const long b = sample_index(st.end, rate);
    for (long n = a; n <= b; ++n) {
      if (n < 0 || static_cast<std::size_t>(n) >= flex.size()) continue;
      fore += mean_over(edge_strain(mesh, flex[static_cast<std::size_t>(n)].u), regions,
                        {Region::Forefoot, Region::Toes});
      ++s.late_frames;
    }
  }
  if (s.late_frames) s.forefoot_late_stance = fore / s.late_frames;
  return s;
}

}  // namespace

AnalysisProducts analyze_playback(const SkeletonModel& model, const FootPair& feet, const PlaybackConfig& playback,
                                  const PlaybackLog& log, const AnalysisConfig& cfg) {
  cfg.validate();
  AnalysisProducts out;
  GaitReport& rep = out.report;
  rep.model = foot_model_name(log.model);
  rep.sim_rate = log.sim_rate;
  rep.steps_planned = log.steps_planned;
  rep.steps_completed = log.steps_completed;
  rep.truncated = log.truncated;
  rep.capped_forces = log.diagnostics.capped;
  const auto samples = static_cast<std::size_t>(std::max(0L, log.steps_completed));
  const double rate = log.sim_rate;

  out.heatmap = grf_heatmap(log.contacts, cfg.heatmap_bin);
  rep.peak_grf = out.heatmap.peak_total;
  rep.peak_time = out.heatmap.peak_time;
  rep.peak_side = side_name(out.heatmap.peak_side);
  rep.peak_cell = out.heatmap.peak_cell;

  for (int s = 0; s < 2; ++s) {
    const FootMesh& mesh = feet.mesh[static_cast<std::size_t>(s)];
    const Side side = static_cast<Side>(s);
    const std::vector<Region> map = log.model == FootModel::Deformable
                                        ? vertex_regions(mesh, cfg.regions)
                                        : sphere_regions(mesh, rigid_layout(mesh, playback), cfg.regions);
    FootReport& foot = rep.feet[static_cast<std::size_t>(s)];
    const RegionalSeries series = regional_series(log.contacts, side, map, rate, samples);
    foot.segmentation = segment_cycles(series, cfg.events);
    foot.regional = regional_forces(series, foot.segmentation.cycles, cfg.phase_points);
    foot.contact_counts = stance_contact_counts(log.contacts, side, foot.segmentation.stances);
    foot.continuity = contact_continuity(log.contacts, side, rate, samples, cfg.continuity_fraction);
    foot.peak_grf = out.heatmap.peak_by_side[static_cast<std::size_t>(s)];
    if (log.model == FootModel::Deformable)
      foot.strain = summarize_strain(mesh, log.flex[static_cast<std::size_t>(s)], foot.segmentation, rate, cfg);
  }

  out.zmp = zmp_trace(log.contacts, cfg.zmp_threshold);
  double margin_sum = 0.0;
  rep.zmp_min_margin = 0.0;
  for (const auto& z : out.zmp) {
    if (!z.result.supported) continue;
    if (rep.zmp_supported_frames == 0 || z.result.margin < rep.zmp_min_margin) rep.zmp_min_margin = z.result.margin;
    ++rep.zmp_supported_frames;
    if (z.result.margin >= -1e-12) ++rep.zmp_inside_frames;
    margin_sum += z.result.margin;
  }
  if (rep.zmp_supported_frames) rep.zmp_mean_margin = margin_sum / rep.zmp_supported_frames;

  if (!log.body.empty()) {
    const auto inertia = segment_inertias(model);
    out.energy = energies(log.body, inertia, cfg.datum, playback.solver.gravity);
    rep.kinetic = cv_stats(out.energy.kinetic);
    rep.potential = cv_stats(out.energy.potential);
    out.com = com_kinematics(log.body, inertia, playback.solver.gravity);
    rep.speed = cv_stats(out.com.speed);
    rep.accel = cv_stats(out.com.accel);
    rep.accel_with_gravity = cv_stats(out.com.accel_with_gravity);
  }
  if (!log.rewards.empty()) {
    for (const auto& r : log.rewards) {
      const double terms[6] = {r.r_q, r.r_qdot, r.r_act, r.r_vel, r.r_healthy, r.total};
      for (std::size_t k = 0; k < 6; ++k) rep.reward_means[k] += terms[k];
    }
    for (double& v : rep.reward_means) v /= static_cast<double>(log.rewards.size());
  }
  return out;
}

}  // namespace footsim
