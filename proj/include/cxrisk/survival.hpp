#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cxrisk {

// Thrown by the partial-likelihood routines when a cohort has no observed
// events; the loss is undefined in that case.
struct NoEventsError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SurvivalRecord {
  std::string subject_id;
  double time_days = 0.0;  // days from diagnosis to death or censoring; > 0
  bool event = false;      // true = death observed, false = censored
};

// Pooled activation tensor from a frozen encoder; channel-major storage,
// row-major within a channel.
struct FeatureMap {
  std::uint32_t channels = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<float> values;

  FeatureMap() = default;
  FeatureMap(std::uint32_t c, std::uint32_t h, std::uint32_t w)
      : channels(c), height(h), width(w),
        values(static_cast<std::size_t>(c) * h * w, 0.0f) {}

  std::size_t index(std::uint32_t c, std::uint32_t i, std::uint32_t j) const {
    return (static_cast<std::size_t>(c) * height + i) * width + j;
  }
  float at(std::uint32_t c, std::uint32_t i, std::uint32_t j) const { return values[index(c, i, j)]; }
  float& at(std::uint32_t c, std::uint32_t i, std::uint32_t j) { return values[index(c, i, j)]; }
};

void validate(const FeatureMap& fm);
void validate(const std::vector<SurvivalRecord>& records);

// Weights and bias of the sigmoid risk predictor applied to pooled features.
struct RiskHead {
  std::vector<double> weights;
  double bias = 0.0;
};

struct TrainConfig {
  double learning_rate = 1e-5;
  double weight_decay = 5e-4;
  double beta1 = 0.9;    // first-moment decay
  double beta2 = 0.999;  // second-moment decay
  double epsilon = 1e-8;
  int max_epochs = 200;
  std::uint64_t seed = 0;
  bool risk_set_inclusive = true;
};

struct FitResult {
  RiskHead head;    // parameters of the lowest-loss epoch
  int best_epoch = 0;  // 0 = initialization
  std::vector<double> loss_trace;      // entry e = training loss after e update epochs
  std::vector<double> val_loss_trace;  // parallel validation trace; empty when no validation set
  std::vector<std::string> warnings;
};

// Per-channel spatial mean of the feature map.
std::vector<double> avg_pool(const FeatureMap& fm);

// Numerically stable logistic; result clamped strictly inside (0, 1).
double sigmoid(double z);

double predict_risk(const RiskHead& head, const std::vector<double>& pooled);

// Negative log Cox partial likelihood averaged over events. The risk set of
// an event at time t is {j : t_j >= t} when inclusive_risk_set is true
// (Breslow, the default) and {j : t_j > t} plus the event subject itself
// otherwise. Inner sums are max-shifted so |risk| <= 700 cannot overflow.
double cox_loss(const std::vector<double>& risks,
                const std::vector<SurvivalRecord>& records,
                bool inclusive_risk_set = true);

// Closed-form derivative of cox_loss with respect to each risk entry.
std::vector<double> cox_loss_gradient(const std::vector<double>& risks,
                                      const std::vector<SurvivalRecord>& records,
                                      bool inclusive_risk_set = true);

// Full-batch fit of a sigmoid risk head by adaptive-moment steps with
// decoupled weight decay. Deterministic given the config. The returned head
// carries the parameters of the epoch with the lowest selection loss
// (validation loss when a validation set is supplied, training loss
// otherwise; ties go to the earliest epoch).
FitResult fit(const std::vector<std::vector<double>>& pooled_features,
              const std::vector<SurvivalRecord>& records,
              const TrainConfig& cfg);

FitResult fit(const std::vector<std::vector<double>>& train_features,
              const std::vector<SurvivalRecord>& train_records,
              const std::vector<std::vector<double>>& val_features,
              const std::vector<SurvivalRecord>& val_records,
              const TrainConfig& cfg);

}  // namespace cxrisk
