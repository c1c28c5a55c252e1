#pragma once

#include <array>
#include <string>
#include <vector>

#include "gait_playback.hpp"

namespace footsim {

// Plantar regions along the foot length, heel first.
enum class Region { Heel = 0, Midfoot = 1, Forefoot = 2, Toes = 3 };
constexpr int kRegionCount = 4;
const char* region_name(Region r);

struct RegionBounds {
  double heel = 0.30;      // rear fraction of foot length
  double midfoot = 0.60;
  double forefoot = 0.85;  // toes are the rest
  void validate() const;
};

Region classify_region(double length_fraction, const RegionBounds& bounds);
std::vector<Region> vertex_regions(const FootMesh& mesh, const RegionBounds& bounds);
std::vector<Region> edge_regions(const FootMesh& mesh, const RegionBounds& bounds);  // by rest midpoint
std::vector<Region> sphere_regions(const FootMesh& mesh, const SphereLayout& layout, const RegionBounds& bounds);

// Per-edge strain L/L0 - 1 (positive = stretching).
std::vector<double> edge_strain(const FootMesh& mesh, const std::vector<double>& u);
std::vector<double> edge_strain(const FootMesh& mesh, const FlexState& state);

struct ContactPoint {
  Side side = Side::Right;
  int vertex = 0;
  auto operator<=>(const ContactPoint&) const = default;
};

// Force magnitude per contact point per time bin.
struct GrfHeatmap {
  double bin_width = 0.01;
  std::vector<ContactPoint> points;          // rows, sorted
  std::vector<std::vector<double>> values;   // values[row][bin]: summed |F| of the records in the bin
  double peak_cell = 0.0;
  // Largest magnitude of one foot's total contact force at a single sample.
  double peak_total = 0.0;
  double peak_time = 0.0;
  Side peak_side = Side::Right;
  std::array<double, 2> peak_by_side{};  // indexed by Side

  std::size_t bins() const { return values.empty() ? 0 : values.front().size(); }
};
GrfHeatmap grf_heatmap(const std::vector<ContactRecord>& log, double bin_width);

// Counter-clockwise hull without collinear points; one or two points for
// degenerate input.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);
// Distance to the hull boundary, positive inside and negative outside.
double signed_hull_distance(const std::vector<Vec2>& hull, const Vec2& p);

struct ZmpResult {
  bool supported = false;
  Vec2 zmp = Vec2::Zero();
  double margin = 0.0;
  double total_normal = 0.0;
  int active = 0;
  std::string diagnostic;  // set when unsupported
};
// Contacts of one instant (both feet).
ZmpResult zmp_and_margin(const std::vector<ContactRecord>& contacts, double threshold = 20.0);

struct ZmpSample {
  double time = 0.0;
  ZmpResult result;
};
std::vector<ZmpSample> zmp_trace(const std::vector<ContactRecord>& log, double threshold = 20.0);

struct SegmentInertia {
  double mass = 0.0;
  Vec3 inertia = Vec3::Zero();  // principal moments in segment axes
};
std::vector<SegmentInertia> segment_inertias(const SkeletonModel& model);

double kinetic_energy(const std::vector<SegmentState>& segments, const std::vector<SegmentInertia>& inertia);
double potential_energy(const std::vector<SegmentState>& segments, const std::vector<SegmentInertia>& inertia,
                        double datum, double gravity);

struct EnergySeries {
  std::vector<double> time;
  std::vector<double> kinetic;
  std::vector<double> potential;
};
EnergySeries energies(const std::vector<BodyFrame>& frames, const std::vector<SegmentInertia>& inertia,
                      double datum = 0.0, double gravity = 9.81);

struct CvStats {
  double mean = 0.0;
  double sd = 0.0;  // population
  double cv = 0.0;
};
CvStats cv_stats(const std::vector<double>& series);

// Whole-body centre of mass speed and acceleration magnitudes. The
// gravity-inclusive series is |a + g z|, what a body-worn accelerometer reads.
struct ComSeries {
  std::vector<double> time;
  std::vector<double> speed;
  std::vector<double> accel;
  std::vector<double> accel_with_gravity;
};
ComSeries com_kinematics(const std::vector<BodyFrame>& frames, const std::vector<SegmentInertia>& inertia,
                         double gravity = 9.81);

struct EventParams {
  double threshold = 20.0;  // N
  double debounce = 0.05;   // s
  void validate() const;
};

// Vertical contact force per region of one foot on the uniform sample grid.
struct RegionalSeries {
  double rate = 500.0;
  std::vector<std::array<double, kRegionCount>> force;
  std::vector<double> total;

  std::size_t size() const { return total.size(); }
};
RegionalSeries regional_series(const std::vector<ContactRecord>& log, Side side, const std::vector<Region>& region_map,
                               double rate, std::size_t samples);

// Rising crossings of `threshold` preceded by at least `debounce` below it.
std::vector<double> detect_strikes(const std::vector<double>& force, double rate, const EventParams& params);

struct GaitCycle {
  double start = 0.0;
  double end = 0.0;
  double duration() const { return end - start; }
  double phase(double t) const { return 100.0 * (t - start) / (end - start); }
};

// Heel strike to the last sample before total foot force stays below the
// threshold for the debounce time.
struct Stance {
  double start = 0.0;
  double end = 0.0;
  double duration() const { return end - start; }
};

struct CycleSegmentation {
  std::vector<double> strikes;
  std::vector<GaitCycle> cycles;
  std::vector<Stance> stances;
  std::string diagnostic;  // set when no strike is found
};
CycleSegmentation segment_cycles(const RegionalSeries& series, const EventParams& params);
CycleSegmentation segment_cycles(const std::vector<ContactRecord>& log, Side side,
                                 const std::vector<Region>& region_map, double rate, std::size_t samples,
                                 const EventParams& params = {});

// Distinct contact points of one foot with positive normal force during
// each stance, strike to stance end inclusive.
std::vector<int> stance_contact_counts(const std::vector<ContactRecord>& log, Side side,
                                       const std::vector<Stance>& stances);

// Step-to-step change of one foot's active contact set. The bound is
// `fraction` of the foot's peak active-set size, so touch-down and lift-off
// of a few points count as smooth while whole-set flicker does not.
struct ContinuityStats {
  int peak_active = 0;
  int max_change = 0;  // largest symmetric difference between consecutive steps
  double bound = 0.0;
  int violations = 0;  // steps whose change exceeds the bound
};
ContinuityStats contact_continuity(const std::vector<ContactRecord>& log, Side side, double rate, std::size_t samples,
                                   double fraction = 0.25);

// Per-region force resampled to `points` phase samples over each cycle.
struct RegionalCurves {
  std::vector<std::array<std::vector<double>, kRegionCount>> cycles;
  std::array<std::vector<double>, kRegionCount> mean;  // across cycles
  std::vector<double> total_mean;
  int points = 101;
};
RegionalCurves regional_forces(const RegionalSeries& series, const std::vector<GaitCycle>& cycles, int points = 101);

// Maximal runs of samples with any contact on one foot; gaps shorter than
// `min_gap` are bridged. Complete episodes do not touch the log ends.
struct ContactEpisode {
  double start = 0.0;
  double end = 0.0;
  int distinct_points = 0;
  double peak_force = 0.0;
  bool complete = false;
};
std::vector<ContactEpisode> contact_episodes(const std::vector<ContactRecord>& log, Side side, double rate,
                                             std::size_t samples, double min_gap = 0.05);

struct AnalysisConfig {
  RegionBounds regions;
  EventParams events;
  double heatmap_bin = 0.01;     // s
  double zmp_threshold = 20.0;   // N
  double datum = 0.0;            // m, potential energy reference height
  double late_stance = 0.10;     // fraction of stance at its end
  int phase_points = 101;
  double continuity_fraction = 0.25;  // of the peak active set
  void validate() const;
};

struct StrainSummary {
  bool available = false;
  double max_abs = 0.0;
  // Mean over detected heel strikes of the mean heel-region strain.
  double heel_at_strike = 0.0;
  double midfoot_at_strike = 0.0;
  // Mean over the last part of each stance of the mean forefoot and toe strain.
  double forefoot_late_stance = 0.0;
  int strike_frames = 0;
  int late_frames = 0;
};

struct FootReport {
  CycleSegmentation segmentation;
  std::vector<int> contact_counts;  // distinct points per detected stance
  ContinuityStats continuity;
  RegionalCurves regional;
  StrainSummary strain;
  double peak_grf = 0.0;
};

struct GaitReport {
  std::string model;
  std::string config_hash;
  double sim_rate = 500.0;
  long steps_planned = 0;
  long steps_completed = 0;
  bool truncated = false;
  double peak_grf = 0.0;  // heatmap peak_total
  double peak_time = 0.0;
  std::string peak_side;
  double peak_cell = 0.0;
  std::array<FootReport, 2> feet;
  int zmp_supported_frames = 0;
  int zmp_inside_frames = 0;
  double zmp_min_margin = 0.0;
  double zmp_mean_margin = 0.0;
  CvStats kinetic;
  CvStats potential;
  CvStats speed;
  CvStats accel;
  CvStats accel_with_gravity;
  std::array<double, 6> reward_means{};  // r_q, r_qdot, r_act, r_vel, r_healthy, total
  long capped_forces = 0;
};

// Series the report summarises, kept for CSV and figure output.
struct AnalysisProducts {
  GaitReport report;
  GrfHeatmap heatmap;
  std::vector<ZmpSample> zmp;
  EnergySeries energy;
  ComSeries com;
};

AnalysisProducts analyze_playback(const SkeletonModel& model, const FootPair& feet, const PlaybackConfig& playback,
                                  const PlaybackLog& log, const AnalysisConfig& config = {});

}  // namespace footsim
