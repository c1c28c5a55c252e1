#include "foot_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "error.hpp"
#include "text.hpp"

namespace footsim {

namespace {

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

double sgnpow(double v, double p) { return std::copysign(std::pow(std::abs(v), p), v); }

// Portable uniform in [0, 1) from a 64-bit engine.
double unit_real(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

enum class RingKind { Plantar, Side, Dorsal };

struct Ring {
  RingKind kind;
  double scale;   // planform scale about the centre
  double height;  // fraction between plantar and dorsal surfaces
  double phase;   // azimuthal offset, fraction of one spacing
  int count = 0;
  int first = 0;  // index of the first vertex
};

class FootShape {
 public:
  explicit FootShape(const MeshGenSpec& s) : spec_(s) {}

  // Planform outline point at azimuth theta, scaled by `scale` about the centre.
  Vec2 outline(double theta, double scale) const {
    const double exponent = 2.0 / 2.5;
    double c = sgnpow(std::cos(theta), exponent);
    double s = sgnpow(std::sin(theta), exponent);
    double x = 0.5 * spec_.length * (1.0 + c * scale);
    double xi = 0.5 * (1.0 + c);
    double t = xi < spec_.forefoot_position ? xi / spec_.forefoot_position : 1.0;
    double half_width = 0.5 * spec_.width * (spec_.heel_width + (1.0 - spec_.heel_width) * smoothstep(t));
    return {x, half_width * s * scale};
  }

  double plantar_z(double x, double y) const {
    double xi = x / spec_.length;
    double heel = std::max(0.0, (0.25 - xi) / 0.25);
    double toe = std::max(0.0, (xi - 0.7) / 0.3);
    double lateral = y / (0.5 * spec_.width);
    return spec_.height * (spec_.heel_rocker * heel * heel + spec_.toe_rocker * toe * toe +
                           0.02 * lateral * lateral);
  }

  double dorsal_z(double x) const {
    double xi = x / spec_.length;
    double fall = smoothstep((xi - spec_.ankle_position) / (1.0 - spec_.ankle_position));
    return spec_.height * (spec_.toe_height + (1.0 - spec_.toe_height) * (1.0 - fall));
  }

  Vec3 point(const Ring& r, double theta) const {
    Vec2 p = outline(theta, r.scale);
    switch (r.kind) {
      case RingKind::Plantar:
        return {p.x(), p.y(), plantar_z(p.x(), p.y())};
      case RingKind::Dorsal:
        return {p.x(), p.y(), dorsal_z(p.x())};
      case RingKind::Side: {
        double bulge = 1.0 + 0.04 * std::sin(kPi * r.height);
        Vec2 q = outline(theta, bulge);
        double zb = plantar_z(q.x(), q.y());
        return {q.x(), q.y(), zb + r.height * (dorsal_z(q.x()) - zb)};
      }
    }
    return {};
  }

  double perimeter(const Ring& r) const {
    const int n = 64;
    double total = 0.0;
    Vec3 prev = point(r, 0.0);
    for (int i = 1; i <= n; ++i) {
      Vec3 cur = point(r, 2.0 * kPi * i / n);
      total += (cur - prev).norm();
      prev = cur;
    }
    return total;
  }

 private:
  const MeshGenSpec& spec_;
};

std::vector<Ring> plan_rings(int vertex_budget, double plantar_density, const FootShape& shape) {
  int n_rings = static_cast<int>(std::lround(0.8 * std::sqrt(static_cast<double>(vertex_budget + 2))));
  n_rings = std::clamp(n_rings, 1, std::max(1, vertex_budget / 3));

  std::vector<Ring> rings;
  if (n_rings == 1) {
    rings.push_back({RingKind::Side, 1.0, 0.5, 0.0});
  } else if (n_rings == 2) {
    rings.push_back({RingKind::Plantar, 1.0, 0.0, 0.0});
    rings.push_back({RingKind::Dorsal, 1.0, 1.0, 0.0});
  } else {
    int k_dorsal = std::max(1, static_cast<int>(std::lround(0.30 * n_rings)));
    int k_plantar = std::max(1, static_cast<int>(std::lround(0.42 * n_rings)));
    int k_side = n_rings - k_dorsal - k_plantar;
    if (k_side < 1) {
      k_side = 1;
      k_plantar = std::max(1, n_rings - k_dorsal - k_side);
      k_dorsal = n_rings - k_plantar - k_side;
    }
    for (int k = 1; k <= k_plantar; ++k)
      rings.push_back({RingKind::Plantar, static_cast<double>(k) / k_plantar, 0.0, 0.0});
    for (int k = 1; k <= k_side; ++k)
      rings.push_back({RingKind::Side, 1.0, static_cast<double>(k) / (k_side + 1), 0.0});
    for (int k = 1; k <= k_dorsal; ++k)
      rings.push_back({RingKind::Dorsal, 1.0 - static_cast<double>(k - 1) / k_dorsal, 1.0, 0.0});
  }

  // Largest-remainder apportionment of the budget, at least 3 per ring.
  std::vector<double> weight(rings.size());
  for (std::size_t i = 0; i < rings.size(); ++i) {
    double w = shape.perimeter(rings[i]);
    if (rings[i].kind == RingKind::Plantar) w *= plantar_density;
    weight[i] = std::max(w, 1e-12);
  }
  double wsum = std::accumulate(weight.begin(), weight.end(), 0.0);
  int assigned = 0;
  std::vector<double> remainder(rings.size());
  for (std::size_t i = 0; i < rings.size(); ++i) {
    double share = vertex_budget * weight[i] / wsum;
    rings[i].count = std::max(3, static_cast<int>(std::floor(share)));
    remainder[i] = share - std::floor(share);
    assigned += rings[i].count;
  }
  std::vector<std::size_t> order(rings.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  std::size_t cursor = 0;
  while (assigned < vertex_budget) {
    rings[order[cursor % order.size()]].count += 1;
    ++assigned;
    ++cursor;
  }
  while (assigned > vertex_budget) {
    auto it = std::max_element(rings.begin(), rings.end(),
                               [](const Ring& a, const Ring& b) { return a.count < b.count; });
    it->count -= 1;
    --assigned;
  }
  return rings;
}

Vec3 triangle_normal(const FootMesh& m, const std::array<int, 3>& t) {
  return (m.vertices[t[1]] - m.vertices[t[0]]).cross(m.vertices[t[2]] - m.vertices[t[0]]);
}

void zip_rings(const Ring& lower, const Ring& upper, std::vector<std::array<int, 3>>& tris) {
  auto angle = [](const Ring& r, int i) { return (i + r.phase) / r.count; };
  int i = 0;
  int j = 0;
  while (i < lower.count || j < upper.count) {
    bool advance_lower;
    if (i == lower.count) {
      advance_lower = false;
    } else if (j == upper.count) {
      advance_lower = true;
    } else {
      advance_lower = angle(lower, i + 1) <= angle(upper, j + 1);
    }
    int a0 = lower.first + i % lower.count;
    int b0 = upper.first + j % upper.count;
    if (advance_lower) {
      int a1 = lower.first + (i + 1) % lower.count;
      tris.push_back({a0, a1, b0});
      ++i;
    } else {
      int b1 = upper.first + (j + 1) % upper.count;
      tris.push_back({a0, b1, b0});
      ++j;
    }
  }
}

void finalize(FootMesh& m, const MeshGenSpec& spec) {
  // Exact fit to the declared box.
  Vec3 lo = m.vertices.front();
  Vec3 hi = m.vertices.front();
  for (const auto& v : m.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  m.bbox_min = Vec3(0.0, -0.5 * spec.width, 0.0);
  m.bbox_max = Vec3(spec.length, 0.5 * spec.width, spec.height);
  Vec3 extent = hi - lo;
  for (auto& v : m.vertices) {
    for (int k = 0; k < 3; ++k) {
      double t = extent[k] > 0 ? (v[k] - lo[k]) / extent[k] : 0.5;
      v[k] = m.bbox_min[k] + t * (m.bbox_max[k] - m.bbox_min[k]);
    }
  }
  m.edges = build_edges(m.vertices, m.triangles);
  double z_pin = m.bbox_min.z() + (1.0 - spec.pinned_fraction) * spec.height;
  m.pinned.assign(m.vertices.size(), false);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) m.pinned[i] = m.vertices[i].z() >= z_pin - 1e-12;
  m.vertex_radius = spec.vertex_radius;
  m.vertex_mass = spec.vertex_mass;
  m.side = Side::Right;
  m.radial_dir.assign(m.vertices.size(), Vec3::Zero());
}

}  // namespace

Side parse_side(const std::string& s) {
  if (s == "right") return Side::Right;
  if (s == "left") return Side::Left;
  fail(ErrorKind::InvalidArgument, "unknown foot side '" + s + "'");
}

std::size_t FootMesh::pinned_count() const {
  return static_cast<std::size_t>(std::count(pinned.begin(), pinned.end(), true));
}

std::vector<Edge> build_edges(const std::vector<Vec3>& vertices,
                              const std::vector<std::array<int, 3>>& triangles) {
  std::set<std::pair<int, int>> keys;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k];
      int b = t[(k + 1) % 3];
      keys.insert({std::min(a, b), std::max(a, b)});
    }
  }
  std::vector<Edge> edges;
  edges.reserve(keys.size());
  for (const auto& [a, b] : keys) edges.push_back({a, b, (vertices[b] - vertices[a]).norm()});
  return edges;
}

FootMesh generate_foot_mesh(const MeshGenSpec& spec) {
  if (!(spec.length > 0 && spec.width > 0 && spec.height > 0))
    fail(ErrorKind::InvalidArgument, "mesh dimensions must be positive");
  if (spec.target_vertices < 4)
    fail(ErrorKind::InvalidArgument,
         "infeasible mesh: a closed triangulated surface needs at least 4 vertices, got " +
             std::to_string(spec.target_vertices));
  // A closed genus-0 triangulation has exactly 2V - 4 faces.
  const int faces = 2 * spec.target_vertices - 4;
  if (spec.target_triangles <= 0 ||
      std::abs(faces - spec.target_triangles) > 0.05 * spec.target_triangles + 1e-9) {
    fail(ErrorKind::InvalidArgument,
         "infeasible mesh: " + std::to_string(spec.target_vertices) + " vertices give " +
             std::to_string(faces) + " triangles on a closed surface, target " +
             std::to_string(spec.target_triangles) + " is outside 5%");
  }
  if (!(spec.pinned_fraction > 0 && spec.pinned_fraction < 1))
    fail(ErrorKind::InvalidArgument, "pinned_fraction must be in (0, 1)");

  FootShape shape(spec);
  std::mt19937_64 rng(spec.seed);
  FootMesh m;

  if (spec.target_vertices == 4) {
    Ring base{RingKind::Plantar, 1.0, 0.0, unit_real(rng), 3, 0};
    for (int i = 0; i < 3; ++i) m.vertices.push_back(shape.point(base, 2.0 * kPi * (i + base.phase) / 3));
    m.vertices.push_back({0.5 * spec.length, 0.0, shape.dorsal_z(0.5 * spec.length)});
    m.triangles = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {2, 0, 3}};
    finalize(m, spec);
    return assign_radial_directions(m, pinned_centroid(m));
  }

  std::vector<Ring> rings = plan_rings(spec.target_vertices - 2, spec.plantar_density, shape);
  const Vec2 centre(0.5 * spec.length, 0.0);
  m.vertices.push_back({centre.x(), centre.y(), shape.plantar_z(centre.x(), centre.y())});
  for (auto& r : rings) {
    r.phase = unit_real(rng);
    r.first = static_cast<int>(m.vertices.size());
    for (int i = 0; i < r.count; ++i)
      m.vertices.push_back(shape.point(r, 2.0 * kPi * (i + r.phase) / r.count));
  }
  const int top = static_cast<int>(m.vertices.size());
  m.vertices.push_back({centre.x(), centre.y(), shape.dorsal_z(centre.x())});

  const Ring& first = rings.front();
  for (int i = 0; i < first.count; ++i)
    m.triangles.push_back({0, first.first + (i + 1) % first.count, first.first + i});
  for (std::size_t k = 0; k + 1 < rings.size(); ++k) zip_rings(rings[k], rings[k + 1], m.triangles);
  const Ring& last = rings.back();
  for (int i = 0; i < last.count; ++i)
    m.triangles.push_back({last.first + i, last.first + (i + 1) % last.count, top});

  finalize(m, spec);
  FootMesh out = spec.radial_mode == RadialMode::SurfaceNormal
                     ? assign_normal_directions(m)
                     : assign_radial_directions(m, pinned_centroid(m));
  validate_mesh(out);
  return out;
}

Vec3 pinned_centroid(const FootMesh& mesh) {
  Vec3 sum = Vec3::Zero();
  std::size_t n = 0;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (!mesh.pinned[i]) continue;
    sum += mesh.vertices[i];
    ++n;
  }
  require(n > 0, "mesh has no pinned vertices");
  return sum / static_cast<double>(n);
}

FootMesh assign_radial_directions(const FootMesh& mesh, const Vec3& origin) {
  const double slack = 1e-12;
  for (int k = 0; k < 3; ++k) {
    if (origin[k] < mesh.bbox_min[k] - slack || origin[k] > mesh.bbox_max[k] + slack)
      fail(ErrorKind::InvalidArgument, "radial origin lies outside the mesh bounding box");
  }
  FootMesh out = mesh;
  out.radial_dir.assign(mesh.vertices.size(), Vec3::Zero());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (mesh.pinned[i]) continue;
    Vec3 d = mesh.vertices[i] - origin;
    double n = d.norm();
    if (n < 1e-12)
      fail(ErrorKind::InvalidArgument,
           "vertex " + std::to_string(i) + " coincides with the radial origin");
    out.radial_dir[i] = d / n;
  }
  return out;
}

FootMesh assign_normal_directions(const FootMesh& mesh) {
  FootMesh out = mesh;
  std::vector<Vec3> acc(mesh.vertices.size(), Vec3::Zero());
  for (const auto& t : mesh.triangles) {
    Vec3 n = triangle_normal(mesh, t);
    for (int v : t) acc[static_cast<std::size_t>(v)] += n;
  }
  out.radial_dir.assign(mesh.vertices.size(), Vec3::Zero());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (mesh.pinned[i]) continue;
    double n = acc[i].norm();
    if (n < 1e-15) fail(ErrorKind::InvalidArgument, "vertex " + std::to_string(i) + " has no normal");
    out.radial_dir[i] = acc[i] / n;
  }
  return out;
}

FootMesh mirror_foot(const FootMesh& mesh) {
  FootMesh out = mesh;
  for (auto& v : out.vertices) v.y() = -v.y();
  for (auto& d : out.radial_dir) d.y() = -d.y();
  for (auto& t : out.triangles) std::swap(t[1], t[2]);
  out.bbox_min.y() = -mesh.bbox_max.y();
  out.bbox_max.y() = -mesh.bbox_min.y();
  out.side = mesh.side == Side::Right ? Side::Left : Side::Right;
  // Rest lengths are kept from the source; reflection is an isometry.
  return out;
}

void validate_mesh(const FootMesh& m) {
  const std::size_t n = m.vertices.size();
  require(n >= 4, "mesh needs at least 4 vertices");
  require(m.pinned.size() == n && m.radial_dir.size() == n, "per-vertex attributes size mismatch");
  require(m.pinned_count() > 0, "mesh has no pinned vertices");
  std::set<std::pair<int, int>> in_triangles;
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 3; ++k) {
      require(t[k] >= 0 && static_cast<std::size_t>(t[k]) < n, "triangle index out of range");
      int a = t[k];
      int b = t[(k + 1) % 3];
      require(a != b, "degenerate triangle");
      in_triangles.insert({std::min(a, b), std::max(a, b)});
    }
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& e : m.edges) {
    require(e.rest_length > 0, "edge " + std::to_string(e.a) + "-" + std::to_string(e.b) + " has zero rest length");
    require(seen.insert({e.a, e.b}).second, "duplicate edge");
    require(in_triangles.count({e.a, e.b}) == 1, "edge not used by any triangle");
  }
  require(seen.size() == in_triangles.size(), "triangle edge missing from edge list");
  for (std::size_t i = 0; i < n; ++i) {
    if (m.pinned[i]) continue;
    require(std::abs(m.radial_dir[i].norm() - 1.0) <= 1e-9,
            "radial direction of vertex " + std::to_string(i) + " is not unit length");
  }
  const double slack = 1e-9;
  for (const auto& v : m.vertices) {
    require((v.array() >= m.bbox_min.array() - slack).all() && (v.array() <= m.bbox_max.array() + slack).all(),
            "vertex outside the declared bounding box");
  }
}

std::string mesh_to_obj(const FootMesh& m, const std::vector<std::string>& header) {
  std::string s;
  for (const auto& h : header) s += "# " + h + "\n";
  s += "# side " + std::string(side_name(m.side)) + "\n";
  s += "# vertex_radius " + text::fmt(m.vertex_radius) + "\n";
  s += "# vertex_mass " + text::fmt(m.vertex_mass) + "\n";
  s += "# bbox_min " + text::fmt(m.bbox_min.x()) + " " + text::fmt(m.bbox_min.y()) + " " + text::fmt(m.bbox_min.z()) + "\n";
  s += "# bbox_max " + text::fmt(m.bbox_max.x()) + " " + text::fmt(m.bbox_max.y()) + " " + text::fmt(m.bbox_max.z()) + "\n";
  for (const auto& v : m.vertices)
    s += "v " + text::fmt(v.x()) + " " + text::fmt(v.y()) + " " + text::fmt(v.z()) + "\n";
  for (const auto& t : m.triangles)
    s += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " + std::to_string(t[2] + 1) + "\n";
  return s;
}

std::string mesh_to_attributes(const FootMesh& m, const std::vector<std::string>& header) {
  std::string s;
  for (const auto& h : header) s += "# " + h + "\n";
  s += "vertex_index,pinned,rdx,rdy,rdz\n";
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const Vec3& d = m.radial_dir[i];
    s += std::to_string(i) + "," + (m.pinned[i] ? "1" : "0") + "," + text::fmt(d.x()) + "," +
         text::fmt(d.y()) + "," + text::fmt(d.z()) + "\n";
  }
  return s;
}

FootMesh parse_mesh(const std::string& obj_text, const std::string& attr_text,
                    const std::string& obj_source, const std::string& attr_source) {
  FootMesh m;
  bool have_bbox = false;
  {
    text::LineReader reader(obj_text, obj_source);
    std::string_view line;
    while (reader.next(line)) {
      auto tok = text::split_ws(line);
      const std::size_t ln = reader.line_number();
      if (tok[0] == "v") {
        if (tok.size() != 4) throw ParseError(obj_source, ln, "vertex record needs 3 coordinates");
        m.vertices.emplace_back(text::parse_double(tok[1], obj_source, ln),
                                text::parse_double(tok[2], obj_source, ln),
                                text::parse_double(tok[3], obj_source, ln));
      } else if (tok[0] == "f") {
        if (tok.size() != 4) throw ParseError(obj_source, ln, "non-triangular face");
        std::array<int, 3> t{};
        for (int k = 0; k < 3; ++k) {
          auto idx_text = tok[static_cast<std::size_t>(k) + 1];
          idx_text = idx_text.substr(0, idx_text.find('/'));
          long idx = text::parse_long(idx_text, obj_source, ln);
          if (idx < 1 || static_cast<std::size_t>(idx) > m.vertices.size())
            throw ParseError(obj_source, ln, "face index " + std::to_string(idx) + " out of range");
          t[static_cast<std::size_t>(k)] = static_cast<int>(idx - 1);
        }
        m.triangles.push_back(t);
      } else if (tok[0] == "o" || tok[0] == "g" || tok[0] == "s" || tok[0] == "vn" || tok[0] == "vt") {
        continue;
      } else {
        throw ParseError(obj_source, ln, "unsupported record '" + std::string(tok[0]) + "'");
      }
    }
    for (const auto& c : reader.comments()) {
      auto tok = text::split_ws(c);
      if (tok.size() == 2 && tok[0] == "side") m.side = parse_side(std::string(tok[1]));
      if (tok.size() == 2 && tok[0] == "vertex_radius") m.vertex_radius = text::parse_double(tok[1], obj_source, 0);
      if (tok.size() == 2 && tok[0] == "vertex_mass") m.vertex_mass = text::parse_double(tok[1], obj_source, 0);
      if (tok.size() == 4 && (tok[0] == "bbox_min" || tok[0] == "bbox_max")) {
        Vec3 v(text::parse_double(tok[1], obj_source, 0), text::parse_double(tok[2], obj_source, 0),
               text::parse_double(tok[3], obj_source, 0));
        (tok[0] == "bbox_min" ? m.bbox_min : m.bbox_max) = v;
        have_bbox = true;
      }
    }
  }
  if (m.vertices.size() < 4) throw ParseError(obj_source, 0, "mesh needs at least 4 vertices");
  if (!have_bbox) {
    m.bbox_min = m.bbox_max = m.vertices.front();
    for (const auto& v : m.vertices) {
      m.bbox_min = m.bbox_min.cwiseMin(v);
      m.bbox_max = m.bbox_max.cwiseMax(v);
    }
  }

  m.pinned.assign(m.vertices.size(), false);
  m.radial_dir.assign(m.vertices.size(), Vec3::Zero());
  std::vector<bool> seen(m.vertices.size(), false);
  {
    text::LineReader reader(attr_text, attr_source);
    std::string_view line;
    bool header = true;
    while (reader.next(line)) {
      const std::size_t ln = reader.line_number();
      if (header) {
        header = false;
        if (line.rfind("vertex_index", 0) == 0) continue;
      }
      auto cols = text::split(line, ',');
      if (cols.size() != 5) throw ParseError(attr_source, ln, "expected 5 columns");
      long idx = text::parse_long(cols[0], attr_source, ln);
      if (idx < 0 || static_cast<std::size_t>(idx) >= m.vertices.size())
        throw ParseError(attr_source, ln, "vertex index " + std::to_string(idx) + " out of range");
      auto i = static_cast<std::size_t>(idx);
      if (seen[i]) throw ParseError(attr_source, ln, "duplicate vertex index " + std::to_string(idx));
      seen[i] = true;
      long pin = text::parse_long(cols[1], attr_source, ln);
      if (pin != 0 && pin != 1) throw ParseError(attr_source, ln, "pinned flag must be 0 or 1");
      m.pinned[i] = pin == 1;
      m.radial_dir[i] = Vec3(text::parse_double(cols[2], attr_source, ln),
                             text::parse_double(cols[3], attr_source, ln),
                             text::parse_double(cols[4], attr_source, ln));
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ParseError(attr_source, 0, "no attributes for vertex " + std::to_string(i));
  }
  m.edges = build_edges(m.vertices, m.triangles);
  validate_mesh(m);
  return m;
}

void save_mesh(const FootMesh& mesh, const std::string& obj_path, const std::string& attr_path,
               const std::vector<std::string>& header) {
  text::write_file(obj_path, mesh_to_obj(mesh, header));
  text::write_file(attr_path, mesh_to_attributes(mesh, header));
}

FootMesh load_mesh(const std::string& obj_path, const std::string& attr_path) {
  return parse_mesh(text::read_file(obj_path), text::read_file(attr_path), obj_path, attr_path);
}

}  // namespace footsim
