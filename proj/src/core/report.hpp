#pragma once

#include <string>
#include <vector>

#include "biomech_analysis.hpp"

namespace footsim {

struct ReportContext {
  std::string config_hash;      // configuration used by the analysis
  std::string log_config_hash;  // configuration recorded by the simulation
  std::string log_dir;
};

// GaitReport as pretty-printed JSON; every metric field is present.
std::string report_to_json(const GaitReport& report, const ReportContext& ctx);

// Per-region mean strain of one foot at every logged frame:
// time,heel,midfoot,forefoot,toes,max_abs
std::string strain_series_csv(const FootMesh& mesh, const std::vector<FlexFrame>& flex, const RegionBounds& bounds,
                              const std::string& config_hash);
// Per-edge strain every `stride` frames: time,e_0..e_{m-1}
std::string edge_strain_csv(const FootMesh& mesh, const std::vector<FlexFrame>& flex, std::size_t stride,
                            const std::string& config_hash);

std::string heatmap_csv(const GrfHeatmap& map, const std::string& config_hash);  // side,vertex,bin,time,force
std::string zmp_csv(const std::vector<ZmpSample>& zmp, const std::string& config_hash);
std::string energy_csv(const EnergySeries& e, const ComSeries& com, const std::string& config_hash);
// phase,heel,midfoot,forefoot,toes,total for one foot
std::string regional_csv(const RegionalCurves& curves, const std::string& config_hash);

std::string heatmap_svg(const GrfHeatmap& map, const std::string& title, const std::string& config_hash);
// Heel and forefoot mean curves of one or more models against % cycle.
struct CurveSet {
  std::string label;
  const RegionalCurves* curves = nullptr;
};
std::string regional_svg(const std::vector<CurveSet>& sets, const std::string& config_hash);

// Writes report.json and series CSVs (plus SVGs when asked) into `dir`.
void write_analysis(const std::string& dir, const AnalysisProducts& products, const FootPair& feet,
                    const PlaybackLog& log, const AnalysisConfig& cfg, const ReportContext& ctx, bool svg);

// Side-by-side summary of a deformable and a rigid report.
std::string compare_to_json(const GaitReport& deformable, const GaitReport& rigid, const std::string& config_hash);

}  // namespace footsim
