#pragma once

#include "cxrisk/region.hpp"
#include "cxrisk/survival.hpp"

namespace cxrisk {

struct SynthConfig {
  int n_subjects = 100;
  std::uint32_t channels = 4;
  std::uint32_t height = 32;
  std::uint32_t width = 32;
  int lesion_region_index = -1;  // -1 = drawn per subject
  int lesion_channel = 0;
  std::vector<double> true_weights;  // one per channel; empty = all zero
  double baseline_hazard = 0.05;
  double censor_rate = 0.0;       // in [0, 1)
  double layout_jitter = 0.01;
  double background_std = 0.2;
  int undetected_per_case = 0;    // detector drop-out simulation
  std::uint64_t seed = 0;
};

struct SynthSubject {
  std::string subject_id;
  FeatureMap features;
  RegionSet regions;
  SurvivalRecord record;
  double true_eta = 0.0;  // linear predictor behind the sampled event time
  int lesion_region = 0;
};

struct Cohort {
  std::vector<SynthSubject> subjects;
  std::vector<std::string> warnings;
};

// The fixed 29-box arrangement: clavicle and costophrenic bands above and
// below five vertical columns (outer/inner lung fields and mediastinum).
// Boxes partition the unit square exactly, shared edges bit-identical.
LayoutCoords template_layout();

// Template perturbed by a shared shift/scale plus per-corner noise.
std::vector<LayoutCoords> gen_layouts(int n, double jitter, std::uint64_t seed,
                                      std::vector<std::string>* warnings = nullptr);

// Full cohort: jittered layout, background-noise feature map with a Gaussian
// lesion bump in the chosen region, proportional-hazards event times and
// independent exponential censoring tuned to the requested rate. Subject i is
// generated from the derived stream (seed, i), so output is order-independent.
Cohort gen_cohort(const SynthConfig& cfg, const std::vector<std::string>& region_names);

}  // namespace cxrisk
