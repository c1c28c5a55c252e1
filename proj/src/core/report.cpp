#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <json.hpp>

#include "error.hpp"
#include "text.hpp"

namespace footsim {

namespace {

using Json = nlohmann::ordered_json;

Json stats_json(const CvStats& s) { return {{"mean", s.mean}, {"sd", s.sd}, {"cv", s.cv}}; }

Json counts_json(const std::vector<int>& counts) {
  Json j;
  j["per_stance"] = counts;
  if (counts.empty()) {
    j["min"] = 0;
    j["max"] = 0;
    j["mean"] = 0.0;
  } else {
    j["min"] = *std::min_element(counts.begin(), counts.end());
    j["max"] = *std::max_element(counts.begin(), counts.end());
    double sum = 0.0;
    for (int c : counts) sum += c;
    j["mean"] = sum / static_cast<double>(counts.size());
  }
  return j;
}

// Phase (percent) of the maximum of a curve sampled on 0..100 inclusive.
double peak_phase(const std::vector<double>& curve) {
  if (curve.size() < 2) return 0.0;
  auto it = std::max_element(curve.begin(), curve.end());
  return 100.0 * static_cast<double>(it - curve.begin()) / static_cast<double>(curve.size() - 1);
}

Json foot_json(const FootReport& f) {
  Json j;
  j["peak_grf_n"] = f.peak_grf;
  j["contact_points"] = counts_json(f.contact_counts);
  j["contact_continuity"] = {{"peak_active", f.continuity.peak_active},
                             {"max_change", f.continuity.max_change},
                             {"bound", f.continuity.bound},
                             {"violations", f.continuity.violations}};
  const auto& seg = f.segmentation;
  j["heel_strikes_s"] = seg.strikes;
  Json cycles = Json::array();
  for (const auto& c : seg.cycles) cycles.push_back({{"start", c.start}, {"end", c.end}, {"duration", c.duration()}});
  j["cycles"] = cycles;
  Json stances = Json::array();
  for (const auto& s : seg.stances) stances.push_back({{"start", s.start}, {"end", s.end}, {"duration", s.duration()}});
  j["stances"] = stances;
  j["segmentation_diagnostic"] = seg.diagnostic;
  Json reg;
  reg["cycles_averaged"] = f.regional.cycles.size();
  reg["points"] = f.regional.points;
  for (int r = 0; r < kRegionCount; ++r) reg[region_name(static_cast<Region>(r))] = f.regional.mean[static_cast<std::size_t>(r)];
  reg["total"] = f.regional.total_mean;
  reg["heel_peak_phase_pct"] = peak_phase(f.regional.mean[0]);
  reg["forefoot_peak_phase_pct"] = peak_phase(f.regional.mean[2]);
  j["regional_force_n"] = reg;
  Json st;
  st["available"] = f.strain.available;
  st["max_abs"] = f.strain.max_abs;
  st["heel_mean_at_strike"] = f.strain.heel_at_strike;
  st["midfoot_mean_at_strike"] = f.strain.midfoot_at_strike;
  st["forefoot_toes_mean_late_stance"] = f.strain.forefoot_late_stance;
  st["strike_frames"] = f.strain.strike_frames;
  st["late_stance_frames"] = f.strain.late_frames;
  j["strain"] = st;
  return j;
}

void add(std::string& out, double v) {
  out += ',';
  out += text::fmt(v);
}

std::string csv_head(const std::string& hash, const std::string& columns) {
  return "# config_hash " + hash + "\n" + columns + "\n";
}

// Five-stop perceptual ramp from dark blue to yellow.
std::string ramp(double t) {
  static const double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  int c[3];
  for (int k = 0; k < 3; ++k) c[k] = static_cast<int>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
  return text::format("#%02x%02x%02x", c[0], c[1], c[2]);
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

void write_text(const std::filesystem::path& p, const std::string& s) { text::write_file(p.string(), s); }

}  // namespace

std::string report_to_json(const GaitReport& r, const ReportContext& ctx) {
  Json j;
  j["config_hash"] = ctx.config_hash;
  j["log_config_hash"] = ctx.log_config_hash;
  j["log_dir"] = ctx.log_dir;
  j["model"] = r.model;
  j["run"] = {{"sim_rate_hz", r.sim_rate},
              {"steps_planned", r.steps_planned},
              {"steps_completed", r.steps_completed},
              {"truncated", r.truncated},
              {"capped_forces", r.capped_forces}};
  j["peak_grf"] = {{"value_n", r.peak_grf}, {"time_s", r.peak_time}, {"side", r.peak_side}, {"peak_cell_n", r.peak_cell}};
  j["feet"] = {{"right", foot_json(r.feet[0])}, {"left", foot_json(r.feet[1])}};
  const double inside = r.zmp_supported_frames ? static_cast<double>(r.zmp_inside_frames) / r.zmp_supported_frames : 0.0;
  j["zmp"] = {{"supported_frames", r.zmp_supported_frames},
              {"inside_frames", r.zmp_inside_frames},
              {"inside_fraction", inside},
              {"min_margin_m", r.zmp_min_margin},
              {"mean_margin_m", r.zmp_mean_margin}};
  j["energy_j"] = {{"kinetic", stats_json(r.kinetic)}, {"potential", stats_json(r.potential)}};
  j["com"] = {{"speed_m_s", stats_json(r.speed)},
              {"accel_m_s2", stats_json(r.accel)},
              {"accel_with_gravity_m_s2", stats_json(r.accel_with_gravity)}};
  j["reward_means"] = {{"r_q", r.reward_means[0]},   {"r_qdot", r.reward_means[1]}, {"r_act", r.reward_means[2]},
                       {"r_vel", r.reward_means[3]}, {"r_healthy", r.reward_means[4]}, {"total", r.reward_means[5]}};
  return j.dump(2) + "\n";
}

std::string strain_series_csv(const FootMesh& mesh, const std::vector<FlexFrame>& flex, const RegionBounds& bounds,
                              const std::string& hash) {
  std::string out = csv_head(hash, "time,heel,midfoot,forefoot,toes,max_abs");
  const auto regions = edge_regions(mesh, bounds);
  for (const auto& f : flex) {
    const auto strain = edge_strain(mesh, f.u);
    double sum[kRegionCount] = {};
    int n[kRegionCount] = {};
    double max_abs = 0.0;
    for (std::size_t e = 0; e < strain.size(); ++e) {
      sum[static_cast<int>(regions[e])] += strain[e];
      ++n[static_cast<int>(regions[e])];
      max_abs = std::max(max_abs, std::abs(strain[e]));
    }
    out += text::fmt(f.time);
    for (int r = 0; r < kRegionCount; ++r) add(out, n[r] ? sum[r] / n[r] : 0.0);
    add(out, max_abs);
    out += '\n';
  }
  return out;
}

std::string edge_strain_csv(const FootMesh& mesh, const std::vector<FlexFrame>& flex, std::size_t stride,
                            const std::string& hash) {
  std::string cols = "time";
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) cols += ",e_" + std::to_string(e);
  std::string out = csv_head(hash, cols);
  stride = std::max<std::size_t>(1, stride);
  for (std::size_t k = 0; k < flex.size(); k += stride) {
    out += text::fmt(flex[k].time);
    for (double e : edge_strain(mesh, flex[k].u)) add(out, e);
    out += '\n';
  }
  return out;
}

std::string heatmap_csv(const GrfHeatmap& map, const std::string& hash) {
  std::string out = csv_head(hash, "side,vertex,bin,time,force");
  for (std::size_t r = 0; r < map.points.size(); ++r)
    for (std::size_t b = 0; b < map.bins(); ++b) {
      const double v = map.values[r][b];
      if (v == 0.0) continue;
      out += side_name(map.points[r].side);
      out += ',' + std::to_string(map.points[r].vertex) + ',' + std::to_string(b);
      add(out, static_cast<double>(b) * map.bin_width);
      add(out, v);
      out += '\n';
    }
  return out;
}

std::string zmp_csv(const std::vector<ZmpSample>& zmp, const std::string& hash) {
  std::string out = csv_head(hash, "time,supported,zmp_x,zmp_y,margin,total_normal,active");
  for (const auto& z : zmp) {
    out += text::fmt(z.time);
    out += z.result.supported ? ",1" : ",0";
    add(out, z.result.zmp.x());
    add(out, z.result.zmp.y());
    add(out, z.result.margin);
    add(out, z.result.total_normal);
    out += ',' + std::to_string(z.result.active) + '\n';
  }
  return out;
}

std::string energy_csv(const EnergySeries& e, const ComSeries& com, const std::string& hash) {
  std::string out = csv_head(hash, "time,kinetic,potential,com_speed,com_accel,com_accel_with_gravity");
  const std::size_t n = std::min(e.time.size(), com.time.size());
  for (std::size_t k = 0; k < n; ++k) {
    out += text::fmt(e.time[k]);
    add(out, e.kinetic[k]);
    add(out, e.potential[k]);
    add(out, com.speed[k]);
    add(out, com.accel[k]);
    add(out, com.accel_with_gravity[k]);
    out += '\n';
  }
  return out;
}

std::string regional_csv(const RegionalCurves& c, const std::string& hash) {
  std::string out = csv_head(hash, "phase,heel,midfoot,forefoot,toes,total");
  const std::size_t n = c.total_mean.size();
  for (std::size_t k = 0; k < n; ++k) {
    out += text::fmt(n > 1 ? 100.0 * static_cast<double>(k) / static_cast<double>(n - 1) : 0.0);
    for (int r = 0; r < kRegionCount; ++r) add(out, c.mean[static_cast<std::size_t>(r)][k]);
    add(out, c.total_mean[k]);
    out += '\n';
  }
  return out;
}

std::string heatmap_svg(const GrfHeatmap& map, const std::string& title, const std::string& hash) {
  constexpr std::size_t kMaxColumns = 250;
  const std::size_t bins = map.bins();
  const std::size_t group = std::max<std::size_t>(1, (bins + kMaxColumns - 1) / kMaxColumns);
  const std::size_t cols = bins ? (bins + group - 1) / group : 0;
  const std::size_t rows = map.points.size();
  std::vector<std::vector<double>> cells(rows, std::vector<double>(cols, 0.0));
  double peak = 0.0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t b = 0; b < bins; ++b) {
      cells[r][b / group] += map.values[r][b];
      peak = std::max(peak, cells[r][b / group]);
    }
  const double cw = 3.0;
  const double ch = rows > 150 ? 1.5 : 4.0;
  const double left = 60.0;
  const double top = 40.0;
  const double w = left + cw * static_cast<double>(cols) + 20.0;
  const double h = top + ch * static_cast<double>(rows) + 50.0;
  std::string out = text::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n<!-- config_hash %s -->\n<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n",
      w, h, hash.c_str());
  out += text::format("<text x=\"%.0f\" y=\"20\" font-size=\"14\">%s</text>\n", left, esc(title).c_str());
  out += text::format("<text x=\"%.0f\" y=\"34\">peak cell %.1f N (bin %.3g s x %zu)</text>\n", left, peak,
                      map.bin_width, group);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (cells[r][c] <= 0.0) continue;
      out += text::format("<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"%s\"/>\n",
                          left + cw * static_cast<double>(c), top + ch * static_cast<double>(r), cw, ch,
                          ramp(peak > 0 ? cells[r][c] / peak : 0.0).c_str());
    }
  const double duration = static_cast<double>(bins) * map.bin_width;
  out += text::format("<text x=\"%.0f\" y=\"%.0f\">time 0 to %.2f s</text>\n", left, h - 20, duration);
  out += text::format("<text x=\"10\" y=\"%.0f\" transform=\"rotate(-90 10 %.0f)\">contact points</text>\n",
                      top + 60, top + 60);
  out += "</svg>\n";
  return out;
}

std::string regional_svg(const std::vector<CurveSet>& sets, const std::string& hash) {
  const double pw = 320.0;
  const double ph = 200.0;
  const double left = 60.0;
  const double top = 40.0;
  const double gap = 80.0;
  double ymax = 1.0;
  for (const auto& s : sets)
    for (int r : {0, 2})
      for (double v : s.curves->mean[static_cast<std::size_t>(r)]) ymax = std::max(ymax, v);
  ymax *= 1.05;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  const double w = left + 2 * pw + gap + 30;
  const double h = top + ph + 70 + 16.0 * static_cast<double>(sets.size());
  std::string out = text::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n<!-- config_hash %s -->\n<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n",
      w, h, hash.c_str());
  const char* titles[] = {"heel normal force (N)", "forefoot normal force (N)"};
  const int regions[] = {0, 2};
  for (int p = 0; p < 2; ++p) {
    const double x0 = left + p * (pw + gap);
    out += text::format("<text x=\"%.0f\" y=\"%.0f\" font-size=\"13\">%s</text>\n", x0, top - 12, titles[p]);
    out += text::format("<rect x=\"%.0f\" y=\"%.0f\" width=\"%.0f\" height=\"%.0f\" fill=\"none\" stroke=\"#444\"/>\n",
                        x0, top, pw, ph);
    out += text::format("<text x=\"%.0f\" y=\"%.0f\">0</text><text x=\"%.0f\" y=\"%.0f\">100 %% cycle</text>\n", x0,
                        top + ph + 14, x0 + pw - 60, top + ph + 14);
    out += text::format("<text x=\"%.0f\" y=\"%.0f\" text-anchor=\"end\">%.0f</text>\n", x0 - 4, top + 10, ymax);
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const auto& curve = sets[s].curves->mean[static_cast<std::size_t>(regions[p])];
      if (curve.size() < 2) continue;
      std::string pts;
      for (std::size_t k = 0; k < curve.size(); ++k) {
        const double x = x0 + pw * static_cast<double>(k) / static_cast<double>(curve.size() - 1);
        const double y = top + ph * (1.0 - curve[k] / ymax);
        pts += text::format("%.1f,%.1f ", x, y);
      }
      out += text::format("<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" points=\"%s\"/>\n",
                          colors[s % 4], pts.c_str());
    }
  }
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const double y = top + ph + 36 + 16.0 * static_cast<double>(s);
    out += text::format("<line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"%s\" stroke-width=\"2\"/>", left,
                        y - 4, left + 20, y - 4, colors[s % 4]);
    out += text::format("<text x=\"%.0f\" y=\"%.0f\">%s</text>\n", left + 26, y, esc(sets[s].label).c_str());
  }
  out += "</svg>\n";
  return out;
}

void write_analysis(const std::string& dir, const AnalysisProducts& p, const FootPair& feet, const PlaybackLog& log,
                    const AnalysisConfig& cfg, const ReportContext& ctx, bool svg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir + ": " + ec.message());
  const fs::path base(dir);
  const std::string& hash = ctx.config_hash;
  write_text(base / "report.json", report_to_json(p.report, ctx));
  write_text(base / "heatmap.csv", heatmap_csv(p.heatmap, hash));
  write_text(base / "zmp.csv", zmp_csv(p.zmp, hash));
  write_text(base / "energy.csv", energy_csv(p.energy, p.com, hash));
  for (Side s : {Side::Right, Side::Left}) {
    const auto i = static_cast<std::size_t>(s);
    const std::string tag = side_name(s);
    write_text(base / ("regional_" + tag + ".csv"), regional_csv(p.report.feet[i].regional, hash));
    if (log.model == FootModel::Deformable && !log.flex[i].empty()) {
      write_text(base / ("strain_" + tag + ".csv"), strain_series_csv(feet.mesh[i], log.flex[i], cfg.regions, hash));
      const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(log.sim_rate / log.control_rate)));
      write_text(base / ("strain_edges_" + tag + ".csv"), edge_strain_csv(feet.mesh[i], log.flex[i], stride, hash));
    }
  }
  if (svg) {
    write_text(base / "heatmap.svg", heatmap_svg(p.heatmap, p.report.model + " foot GRF magnitude", hash));
    write_text(base / "regional.svg",
               regional_svg({{p.report.model + " right", &p.report.feet[0].regional},
                             {p.report.model + " left", &p.report.feet[1].regional}},
                            hash));
  }
}

std::string compare_to_json(const GaitReport& d, const GaitReport& r, const std::string& hash) {
  auto mean_counts = [](const GaitReport& g) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& f : g.feet)
      for (int c : f.contact_counts) {
        sum += c;
        ++n;
      }
    return n ? sum / static_cast<double>(n) : 0.0;
  };
  auto max_counts = [](const GaitReport& g) {
    int m = 0;
    for (const auto& f : g.feet)
      for (int c : f.contact_counts) m = std::max(m, c);
    return m;
  };
  auto min_counts = [](const GaitReport& g) {
    int m = -1;
    for (const auto& f : g.feet)
      for (int c : f.contact_counts) m = m < 0 ? c : std::min(m, c);
    return std::max(m, 0);
  };
  auto model = [&](const GaitReport& g) {
    Json j;
    j["peak_grf_n"] = g.peak_grf;
    j["contact_points_mean"] = mean_counts(g);
    j["contact_points_min"] = min_counts(g);
    j["contact_points_max"] = max_counts(g);
    j["speed_cv"] = g.speed.cv;
    j["accel_cv"] = g.accel.cv;
    j["accel_with_gravity_cv"] = g.accel_with_gravity.cv;
    j["kinetic_energy_j"] = stats_json(g.kinetic);
    j["potential_energy_j"] = stats_json(g.potential);
    j["heel_peak_phase_pct"] = peak_phase(g.feet[0].regional.mean[0]);
    j["heel_peak_force_n"] = g.feet[0].regional.mean[0].empty()
                                 ? 0.0
                                 : *std::max_element(g.feet[0].regional.mean[0].begin(), g.feet[0].regional.mean[0].end());
    j["zmp_inside_fraction"] =
        g.zmp_supported_frames ? static_cast<double>(g.zmp_inside_frames) / g.zmp_supported_frames : 0.0;
    j["reward_mean"] = g.reward_means[5];
    j["config_hash"] = g.config_hash;
    j["truncated"] = g.truncated;
    return j;
  };
  Json j;
  j["config_hash"] = hash;
  j["deformable"] = model(d);
  j["rigid"] = model(r);
  auto reduction = [](double a, double b) { return b != 0.0 ? (b - a) / b : 0.0; };
  j["relative"] = {{"peak_grf_reduction", reduction(d.peak_grf, r.peak_grf)},
                   {"speed_cv_reduction", reduction(d.speed.cv, r.speed.cv)},
                   {"accel_cv_reduction", reduction(d.accel.cv, r.accel.cv)},
                   {"accel_with_gravity_cv_reduction", reduction(d.accel_with_gravity.cv, r.accel_with_gravity.cv)}};
  return j.dump(2) + "\n";
}

}  // namespace footsim
