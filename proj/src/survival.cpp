#include "cxrisk/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cxrisk {

void validate(const FeatureMap& fm) {
  if (fm.channels < 1 || fm.height < 1 || fm.width < 1)
    throw std::invalid_argument("feature map: dimensions must be >= 1");
  const std::size_t expect = static_cast<std::size_t>(fm.channels) * fm.height * fm.width;
  if (fm.values.size() != expect)
    throw std::invalid_argument("feature map: value count does not match dimensions");
  for (float v : fm.values)
    if (!std::isfinite(v)) throw std::invalid_argument("feature map: non-finite value");
}

void validate(const std::vector<SurvivalRecord>& records) {
  if (records.empty()) throw std::invalid_argument("survival records: empty");
  for (const auto& r : records) {
    if (!std::isfinite(r.time_days) || r.time_days <= 0.0)
      throw std::invalid_argument("survival record '" + r.subject_id +
                                  "': time_days must be finite and > 0");
  }
}

std::vector<double> avg_pool(const FeatureMap& fm) {
  validate(fm);
  std::vector<double> pooled(fm.channels, 0.0);
  const std::size_t plane = static_cast<std::size_t>(fm.height) * fm.width;
  for (std::uint32_t c = 0; c < fm.channels; ++c) {
    double sum = 0.0;
    const float* p = fm.values.data() + static_cast<std::size_t>(c) * plane;
    for (std::size_t k = 0; k < plane; ++k) sum += p[k];
    pooled[c] = sum / static_cast<double>(plane);
  }
  return pooled;
}

double sigmoid(double z) {
  double s;
  if (z >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    s = e / (1.0 + e);
  }
  // keep the result strictly inside (0, 1) even for saturating inputs
  if (s >= 1.0) s = std::nextafter(1.0, 0.0);
  if (s <= 0.0) s = std::numeric_limits<double>::min();
  return s;
}

double predict_risk(const RiskHead& head, const std::vector<double>& pooled) {
  if (head.weights.size() != pooled.size())
    throw std::invalid_argument("predict_risk: weight/feature dimension mismatch");
  double z = head.bias;
  for (std::size_t c = 0; c < pooled.size(); ++c) z += head.weights[c] * pooled[c];
  return sigmoid(z);
}

namespace {

struct CoxWork {
  std::size_t n_events = 0;
  double shift = 0.0;                // max risk, subtracted before exponentiation
  std::vector<double> exp_shifted;   // e^(risk - shift)
  std::vector<std::size_t> order;    // subject indices sorted by time ascending
  std::vector<double> denom;         // per-subject risk-set denominator (events only)
};

CoxWork prepare(const std::vector<double>& risks,
                const std::vector<SurvivalRecord>& records,
                bool inclusive) {
  if (risks.size() != records.size())
    throw std::invalid_argument("cox: risks/records length mismatch");
  validate(records);
  for (double r : risks)
    if (!std::isfinite(r)) throw std::invalid_argument("cox: non-finite risk");

  CoxWork w;
  const std::size_t n = risks.size();
  for (const auto& r : records) w.n_events += r.event ? 1 : 0;
  if (w.n_events == 0) throw NoEventsError("cox: no observable events");

  w.shift = *std::max_element(risks.begin(), risks.end());
  w.exp_shifted.resize(n);
  for (std::size_t i = 0; i < n; ++i) w.exp_shifted[i] = std::exp(risks[i] - w.shift);

  w.order.resize(n);
  std::iota(w.order.begin(), w.order.end(), std::size_t{0});
  std::sort(w.order.begin(), w.order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].time_days < records[b].time_days;
  });

  // one descending sweep over time groups fills the event denominators
  w.denom.assign(n, 0.0);
  double running = 0.0;
  std::size_t g_end = n;  // exclusive end of the current group within order
  while (g_end > 0) {
    std::size_t g_begin = g_end;
    const double t = records[w.order[g_end - 1]].time_days;
    while (g_begin > 0 && records[w.order[g_begin - 1]].time_days == t) --g_begin;
    if (inclusive) {
      for (std::size_t k = g_begin; k < g_end; ++k) running += w.exp_shifted[w.order[k]];
      for (std::size_t k = g_begin; k < g_end; ++k) {
        const std::size_t i = w.order[k];
        if (records[i].event) w.denom[i] = running;
      }
    } else {
      // strict sets: same-time subjects are excluded, the event itself is kept
      for (std::size_t k = g_begin; k < g_end; ++k) {
        const std::size_t i = w.order[k];
        if (records[i].event) w.denom[i] = running + w.exp_shifted[i];
      }
      for (std::size_t k = g_begin; k < g_end; ++k) running += w.exp_shifted[w.order[k]];
    }
    g_end = g_begin;
  }
  return w;
}

}  // namespace

double cox_loss(const std::vector<double>& risks,
                const std::vector<SurvivalRecord>& records,
                bool inclusive_risk_set) {
  const CoxWork w = prepare(risks, records, inclusive_risk_set);
  double sum = 0.0;
  for (std::size_t i = 0; i < risks.size(); ++i) {
    if (!records[i].event) continue;
    sum += (risks[i] - w.shift) - std::log(w.denom[i]);
  }
  return -sum / static_cast<double>(w.n_events);
}

std::vector<double> cox_loss_gradient(const std::vector<double>& risks,
                                      const std::vector<SurvivalRecord>& records,
                                      bool inclusive_risk_set) {
  const CoxWork w = prepare(risks, records, inclusive_risk_set);
  const std::size_t n = risks.size();
  const double inv_ne = 1.0 / static_cast<double>(w.n_events);
  std::vector<double> grad(n, 0.0);

  // ascending sweep accumulating sum of 1/denom over events whose risk set
  // contains the current subject
  double acc = 0.0;
  std::size_t g_begin = 0;
  while (g_begin < n) {
    std::size_t g_end = g_begin;
    const double t = records[w.order[g_begin]].time_days;
    while (g_end < n && records[w.order[g_end]].time_days == t) ++g_end;
    if (inclusive_risk_set) {
      for (std::size_t k = g_begin; k < g_end; ++k) {
        const std::size_t i = w.order[k];
        if (records[i].event) acc += 1.0 / w.denom[i];
      }
      for (std::size_t k = g_begin; k < g_end; ++k) {
        const std::size_t i = w.order[k];
        const double indicator = records[i].event ? 1.0 : 0.0;
        grad[i] = -inv_ne * (indicator - w.exp_shifted[i] * acc);
      }
    } else {
      for (std::size_t k = g_begin; k < g_end; ++k) {
        const std::size_t i = w.order[k];
        double membership = w.exp_shifted[i] * acc;
        if (records[i].event) membership += w.exp_shifted[i] / w.denom[i];
        const double indicator = records[i].event ? 1.0 : 0.0;
        grad[i] = -inv_ne * (indicator - membership);
      }
      for (std::size_t k = g_begin; k < g_end; ++k) {
        const std::size_t i = w.order[k];
        if (records[i].event) acc += 1.0 / w.denom[i];
      }
    }
    g_begin = g_end;
  }
  return grad;
}

namespace {

struct AdamState {
  std::vector<double> m, v;
  long t = 0;
};

void adamw_step(std::vector<double>& params, const std::vector<double>& grad,
                AdamState& st, const TrainConfig& cfg) {
  ++st.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    params[k] -= cfg.learning_rate * cfg.weight_decay * params[k];
    st.m[k] = cfg.beta1 * st.m[k] + (1.0 - cfg.beta1) * grad[k];
    st.v[k] = cfg.beta2 * st.v[k] + (1.0 - cfg.beta2) * grad[k] * grad[k];
    const double mhat = st.m[k] / bc1;
    const double vhat = st.v[k] / bc2;
    params[k] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

double head_loss(const std::vector<double>& params,
                 const std::vector<std::vector<double>>& feats,
                 const std::vector<SurvivalRecord>& recs, bool inclusive) {
  const std::size_t d = params.size() - 1;
  std::vector<double> risks(feats.size());
  for (std::size_t i = 0; i < feats.size(); ++i) {
    double z = params[d];
    for (std::size_t c = 0; c < d; ++c) z += params[c] * feats[i][c];
    risks[i] = sigmoid(z);
  }
  return cox_loss(risks, recs, inclusive);
}

}  // namespace

FitResult fit(const std::vector<std::vector<double>>& train_features,
              const std::vector<SurvivalRecord>& train_records,
              const std::vector<std::vector<double>>& val_features,
              const std::vector<SurvivalRecord>& val_records,
              const TrainConfig& cfg) {
  const std::size_t n = train_features.size();
  if (n < 2) throw std::invalid_argument("fit: need at least two subjects");
  if (train_records.size() != n) throw std::invalid_argument("fit: features/records length mismatch");
  if (val_features.size() != val_records.size())
    throw std::invalid_argument("fit: validation features/records length mismatch");
  if (!(cfg.learning_rate >= 0.0) || cfg.max_epochs < 0)
    throw std::invalid_argument("fit: bad training config");
  const std::size_t d = train_features[0].size();
  for (const auto& f : train_features)
    if (f.size() != d) throw std::invalid_argument("fit: inconsistent feature dimension");
  for (const auto& f : val_features)
    if (f.size() != d) throw std::invalid_argument("fit: inconsistent validation feature dimension");

  FitResult result;
  result.warnings = {};

  bool separable = false;
  for (std::size_t i = 1; i < n && !separable; ++i)
    separable = train_features[i] != train_features[0];
  if (!separable)
    result.warnings.push_back("non-separable: all training feature vectors are identical");

  const bool use_val = !val_features.empty();
  std::vector<double> params(d + 1, 0.0);  // weights then bias; zero start
  AdamState st;
  st.m.assign(d + 1, 0.0);
  st.v.assign(d + 1, 0.0);

  auto record_epoch = [&](const std::vector<double>& p) {
    result.loss_trace.push_back(head_loss(p, train_features, train_records, cfg.risk_set_inclusive));
    if (use_val)
      result.val_loss_trace.push_back(head_loss(p, val_features, val_records, cfg.risk_set_inclusive));
  };

  record_epoch(params);
  std::vector<double> best_params = params;
  double best_loss = use_val ? result.val_loss_trace[0] : result.loss_trace[0];
  result.best_epoch = 0;

  std::vector<double> risks(n), grad_params(d + 1);
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
      double zi = params[d];
      for (std::size_t c = 0; c < d; ++c) zi += params[c] * train_features[i][c];
      z[i] = zi;
      risks[i] = sigmoid(zi);
    }
    const std::vector<double> dloss = cox_loss_gradient(risks, train_records, cfg.risk_set_inclusive);
    std::fill(grad_params.begin(), grad_params.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double chain = dloss[i] * risks[i] * (1.0 - risks[i]);
      for (std::size_t c = 0; c < d; ++c) grad_params[c] += chain * train_features[i][c];
      grad_params[d] += chain;
    }
    adamw_step(params, grad_params, st, cfg);
    record_epoch(params);

    const double selection = use_val ? result.val_loss_trace.back() : result.loss_trace.back();
    if (selection < best_loss) {
      best_loss = selection;
      best_params = params;
      result.best_epoch = epoch;
    }
  }

  result.head.weights.assign(best_params.begin(), best_params.begin() + static_cast<std::ptrdiff_t>(d));
  result.head.bias = best_params[d];
  return result;
}

FitResult fit(const std::vector<std::vector<double>>& pooled_features,
              const std::vector<SurvivalRecord>& records,
              const TrainConfig& cfg) {
  return fit(pooled_features, records, {}, {}, cfg);
}

}  // namespace cxrisk
