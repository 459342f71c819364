#pragma once

#include "cxrisk/survival.hpp"

namespace cxrisk {

// Product-limit estimate over the distinct event times of a cohort.
struct KMCurve {
  std::vector<double> times;     // ascending distinct event times
  std::vector<double> survival;  // S(t_k); non-increasing, S before the first event is 1
  std::vector<int> at_risk;      // subjects at risk just before t_k
  std::vector<int> events;       // deaths at t_k
};

struct LogRankResult {
  double chi_square = 0.0;
  double p_value = 1.0;
};

enum class RiskGroup { low = 0, high = 1 };

// Concordance over pairs (i, j) with event_i and t_i < t_j; risk ties count
// one half. Throws when no comparable pair exists.
double c_index(const std::vector<double>& risks, const std::vector<SurvivalRecord>& records);

// Cumulative/dynamic AUC at a horizon: cases are events with t <= horizon,
// controls are subjects with t > horizon; subjects censored at or before the
// horizon are excluded. Unweighted rank statistic, ties one half.
double time_dependent_auc(const std::vector<double>& risks,
                          const std::vector<SurvivalRecord>& records,
                          double horizon);

KMCurve km_curve(const std::vector<SurvivalRecord>& records);

// Two-group log-rank test; chi-square with one degree of freedom.
LogRankResult log_rank(const std::vector<SurvivalRecord>& group_a,
                       const std::vector<SurvivalRecord>& group_b);

// risk > median -> high, otherwise low; even cohorts use the midpoint of the
// two central order statistics.
std::vector<RiskGroup> stratify_by_median(const std::vector<double>& risks);

// Upper-tail chi-square probability via the regularized incomplete gamma
// function (relative accuracy ~1e-14).
double chi_square_sf(double x, double dof);

}  // namespace cxrisk
