#include "cxrisk/regional.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cxrisk {

namespace {

// first pixel index whose center is >= edge, for centers (i + 0.5) / n
std::int64_t first_center_at_or_after(double edge, std::uint32_t n) {
  return static_cast<std::int64_t>(std::ceil(edge * static_cast<double>(n) - 0.5));
}

}  // namespace

double region_activation_sum(const ActivationMap& am, const RegionBox& box) {
  if (am.height < 1 || am.width < 1)
    throw std::invalid_argument("region_activation_sum: empty activation map");
  const std::int64_t j_lo = std::max<std::int64_t>(0, first_center_at_or_after(box.x1, am.width));
  const std::int64_t j_hi = std::min<std::int64_t>(am.width, first_center_at_or_after(box.x2, am.width));
  const std::int64_t i_lo = std::max<std::int64_t>(0, first_center_at_or_after(box.y1, am.height));
  const std::int64_t i_hi = std::min<std::int64_t>(am.height, first_center_at_or_after(box.y2, am.height));
  double sum = 0.0;
  for (std::int64_t i = i_lo; i < i_hi; ++i)
    for (std::int64_t j = j_lo; j < j_hi; ++j)
      sum += am.at(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  return sum;
}

std::vector<double> region_activation_sums(const ActivationMap& am, const RegionSet& rs) {
  std::vector<double> sums;
  sums.reserve(rs.boxes.size());
  for (const auto& b : rs.boxes) sums.push_back(region_activation_sum(am, b));
  return sums;
}

std::vector<double> regional_intensities(const ActivationMap& am, const RegionSet& rs) {
  std::vector<double> fractions = region_activation_sums(am, rs);
  double total = 0.0;
  for (double v : am.values) total += v;
  if (total > 0.0) {
    for (double& f : fractions) f /= total;
  } else {
    std::fill(fractions.begin(), fractions.end(), 0.0);
  }
  return fractions;
}

RegionalRiskReport regional_risk_scores(const std::vector<std::string>& names,
                                        const std::vector<double>& activation_sums,
                                        const std::vector<double>& fractions,
                                        double global_risk) {
  if (names.size() != fractions.size() || names.size() != activation_sums.size())
    throw std::invalid_argument("regional_risk_scores: input length mismatch");
  if (!(global_risk > 0.0 && global_risk < 1.0))
    throw std::invalid_argument("regional_risk_scores: global risk must be inside (0,1)");

  RegionalRiskReport report;
  report.global_risk = global_risk;
  report.entries.resize(names.size());
  for (std::size_t k = 0; k < names.size(); ++k) {
    RegionalRiskEntry& e = report.entries[k];
    e.name = names[k];
    e.activation_sum = activation_sums[k];
    e.intensity_fraction = fractions[k];
    e.regional_risk = fractions[k] * global_risk;
  }
  // stable sort keeps configured region order on ties
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const RegionalRiskEntry& a, const RegionalRiskEntry& b) {
                     return a.regional_risk > b.regional_risk;
                   });
  for (std::size_t k = 0; k < report.entries.size(); ++k)
    report.entries[k].rank = static_cast<int>(k) + 1;
  return report;
}

RegionalRiskReport regional_report(const ActivationMap& am, const RegionSet& rs, double global_risk) {
  std::vector<std::string> names;
  names.reserve(rs.boxes.size());
  for (const auto& b : rs.boxes) names.push_back(b.name);
  return regional_risk_scores(names, region_activation_sums(am, rs),
                              regional_intensities(am, rs), global_risk);
}

std::vector<RegionalRiskEntry> top_k(const RegionalRiskReport& report, int k) {
  if (k < 1 || k > static_cast<int>(report.entries.size()))
    throw std::out_of_range("top_k: k out of range");
  return {report.entries.begin(), report.entries.begin() + k};
}

}  // namespace cxrisk
