#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "cxrisk/rng.hpp"
#include "cxrisk/survival.hpp"

namespace testutil {

// Brute-force oracles, kept deliberately naive and separate from the library
// implementations they check.

// Eq-by-eq negative log partial likelihood: direct double loop over events
// and their risk sets.
inline double cox_loss_bruteforce(const std::vector<double>& risks,
                                  const std::vector<cxrisk::SurvivalRecord>& recs,
                                  bool inclusive) {
  int n_events = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (!recs[i].event) continue;
    ++n_events;
    double denom = 0.0;
    for (std::size_t j = 0; j < recs.size(); ++j) {
      const bool member = inclusive ? recs[j].time_days >= recs[i].time_days
                                    : (recs[j].time_days > recs[i].time_days || j == i);
      if (member) denom += std::exp(risks[j]);
    }
    total += risks[i] - std::log(denom);
  }
  return -total / n_events;
}

// O(N^2) pair enumeration concordance.
inline double c_index_bruteforce(const std::vector<double>& risks,
                                 const std::vector<cxrisk::SurvivalRecord>& recs) {
  double num = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (!recs[i].event) continue;
    for (std::size_t j = 0; j < recs.size(); ++j) {
      if (recs[i].time_days >= recs[j].time_days) continue;
      ++pairs;
      if (risks[i] > risks[j]) num += 1.0;
      else if (risks[i] == risks[j]) num += 0.5;
    }
  }
  return num / static_cast<double>(pairs);
}

// Pairwise binary ROC-AUC with tie credit.
inline double roc_auc_bruteforce(const std::vector<double>& scores,
                                 const std::vector<bool>& positive) {
  double num = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) num += 1.0;
      else if (scores[i] == scores[j]) num += 0.5;
    }
  }
  return num / static_cast<double>(pairs);
}

// Relative mismatch with a floor on the denominator: coordinates smaller than
// the floor are held to an absolute tolerance instead, which keeps central
// differences meaningful near zero (their roundoff floor is ~1e-11 here).
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b,
                                 double floor = 1e-4) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double denom = std::max({std::fabs(a[k]), std::fabs(b[k]), floor});
    worst = std::max(worst, std::fabs(a[k] - b[k]) / denom);
  }
  return worst;
}

// Random censored cohort for property tests.
inline std::pair<std::vector<double>, std::vector<cxrisk::SurvivalRecord>> random_cohort(
    cxrisk::Rng& rng, int n, double censor_prob) {
  std::vector<double> risks(static_cast<std::size_t>(n));
  std::vector<cxrisk::SurvivalRecord> recs(static_cast<std::size_t>(n));
  bool any_event = false;
  for (int i = 0; i < n; ++i) {
    risks[static_cast<std::size_t>(i)] = rng.uniform(-2.0, 2.0);
    recs[static_cast<std::size_t>(i)].subject_id = "r" + std::to_string(i);
    recs[static_cast<std::size_t>(i)].time_days = rng.uniform(0.1, 10.0);
    recs[static_cast<std::size_t>(i)].event = rng.uniform() >= censor_prob;
    any_event = any_event || recs[static_cast<std::size_t>(i)].event;
  }
  if (!any_event) recs[0].event = true;
  return {risks, recs};
}

// Scratch directory that cleans up after itself.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    dir_ = std::filesystem::temp_directory_path() /
           ("cxrisk_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() { std::filesystem::remove_all(dir_); }
  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace testutil
