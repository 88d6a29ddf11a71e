#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stressmodel/estimators.hpp"
#include "stressmodel/normality.hpp"
#include "stressmodel/portfolio.hpp"
#include "stressmodel/riskmodel.hpp"
#include "stressmodel/series.hpp"
#include "stressmodel/simulate.hpp"

namespace stressmodel {

// Interchange formats. JSON objects use a fixed field order so identical
// inputs serialize byte-identically; CSV layouts are flat one-row-per-bucket
// (or -cell) tables.

std::string table_to_json(const EstimateTable& table);
EstimateTable table_from_json(const std::string& text);  // normalizes probability mass

std::string table_to_csv(const EstimateTable& table);
EstimateTable table_from_csv(const std::string& text);

std::string grid_to_json(const Grid2D& grid);
Grid2D grid_from_json(const std::string& text);

std::string grid_to_csv(const Grid2D& grid);

std::string risk_report_to_json(const RiskReport& report);
RiskReport risk_report_from_json(const std::string& text);

// Labeled series CSV: date,return,kappa[,kappa2][,volume] (header present;
// optional columns appear when any observation carries them).
std::string labeled_series_to_csv(const LabeledSeries& series);

std::string rescaled_series_to_csv(const RescaledSeries& series);

// Per-set normality results: set_index,n,kappa_min,kappa_max,W,p.
std::string normality_results_to_csv(const std::vector<SampleSet>& sets,
                                     const std::vector<NormalityResult>& results);

std::string frontier_to_csv(const Frontier& frontier);
std::string regressions_to_csv(const std::vector<RegressionResult>& results);

// Simulation configs. A JSON config names its functional forms:
//   {"type": "constant", "value": v}
//   {"type": "linear", "intercept": a, "slope": b}
//   {"type": "step", "edges": [...], "values": [...]}
//   {"type": "hinge", "base": a, "threshold": t, "slope": b}
// Joint rho additionally supports
//   {"type": "threshold_s", "threshold": t, "below": r0, "above": r1}.
struct SimConfigFile {
    bool joint = false;
    SimConfig single;      // valid when !joint
    JointSimConfig pair;   // valid when joint
};

SimConfigFile sim_config_from_json(const std::string& text);

// Convenience wrappers: read/parse or serialize/write with atomic rename.
EstimateTable load_table(const std::string& path);  // .json or .csv by extension
void save_text(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

// FNV-1a 64-bit content digest used in run manifests.
std::uint64_t fnv1a64(const std::string& bytes);
std::string file_digest(const std::string& path);

}  // namespace stressmodel
