#pragma once

#include "cxrisk/cam.hpp"
#include "cxrisk/region.hpp"

namespace cxrisk {

struct RegionalRiskEntry {
  std::string name;
  double activation_sum = 0.0;      // raw CAM mass inside the box
  double intensity_fraction = 0.0;  // share of total CAM mass, in [0,1]
  double regional_risk = 0.0;       // fraction * global risk
  int rank = 0;                     // 1 = highest regional risk
};

// Entries sorted by regional risk descending; ranks are a permutation of
// 1..29. Ties keep the configured region order.
struct RegionalRiskReport {
  double global_risk = 0.0;
  std::vector<RegionalRiskEntry> entries;
};

// Sum of map values over pixels whose centers fall inside the box
// (half-open membership: x1 <= center < x2), box coords normalized.
double region_activation_sum(const ActivationMap& am, const RegionBox& box);

std::vector<double> region_activation_sums(const ActivationMap& am, const RegionSet& rs);

// Per-region share of the total map mass; all zero when the map is empty.
// Overlapping boxes may make the shares sum above 1; that is visible in the
// report, not an error.
std::vector<double> regional_intensities(const ActivationMap& am, const RegionSet& rs);

RegionalRiskReport regional_risk_scores(const std::vector<std::string>& names,
                                        const std::vector<double>& activation_sums,
                                        const std::vector<double>& fractions,
                                        double global_risk);

// Convenience composition of the three steps above.
RegionalRiskReport regional_report(const ActivationMap& am, const RegionSet& rs, double global_risk);

std::vector<RegionalRiskEntry> top_k(const RegionalRiskReport& report, int k);

}  // namespace cxrisk
