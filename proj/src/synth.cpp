#include "cxrisk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cxrisk/rng.hpp"

namespace cxrisk {

LayoutCoords template_layout() {
  constexpr double kBandTop = 0.12;
  constexpr double kBandBottom = 0.88;
  const double xs[6] = {0.0, 0.19, 0.38, 0.62, 0.81, 1.0};
  const int rows[5] = {5, 4, 5, 4, 5};

  LayoutCoords coords;
  coords.reserve(kLayoutDim);
  auto push = [&](double x1, double y1, double x2, double y2) {
    coords.insert(coords.end(), {x1, y1, x2, y2});
  };

  push(xs[0], 0.0, xs[2], kBandTop);
  push(xs[2], 0.0, xs[3], kBandTop);
  push(xs[3], 0.0, xs[5], kBandTop);
  for (int col = 0; col < 5; ++col) {
    const int nr = rows[col];
    for (int r = 0; r < nr; ++r) {
      // shared edges are computed from identical expressions so adjacent
      // boxes agree bit-for-bit and the tiling stays exact
      const double y1 = r == 0 ? kBandTop : kBandTop + (kBandBottom - kBandTop) * r / nr;
      const double y2 = r == nr - 1 ? kBandBottom : kBandTop + (kBandBottom - kBandTop) * (r + 1) / nr;
      push(xs[col], y1, xs[col + 1], y2);
    }
  }
  push(xs[0], kBandBottom, xs[2], 1.0);
  push(xs[2], kBandBottom, xs[3], 1.0);
  push(xs[3], kBandBottom, xs[5], 1.0);
  return coords;
}

namespace {

constexpr double kMinBoxSide = 1e-3;

LayoutCoords jitter_layout(const LayoutCoords& tpl, double jitter, Rng& rng) {
  const double dx = rng.uniform(-jitter, jitter);
  const double dy = rng.uniform(-jitter, jitter);
  const double scale = rng.uniform(1.0 - jitter, 1.0 + jitter);
  LayoutCoords out(tpl.size());
  for (int k = 0; k < kRegionCount; ++k) {
    double c[4];
    for (int i = 0; i < 4; ++i) {
      const double v = tpl[static_cast<std::size_t>(4 * k + i)];
      const double shift = (i % 2 == 0) ? dx : dy;
      c[i] = 0.5 + scale * (v - 0.5) + shift + rng.uniform(-jitter / 2.0, jitter / 2.0);
    }
    double x1 = std::clamp(c[0], 0.0, 1.0), y1 = std::clamp(c[1], 0.0, 1.0);
    double x2 = std::clamp(c[2], 0.0, 1.0), y2 = std::clamp(c[3], 0.0, 1.0);
    if (x1 > x2) std::swap(x1, x2);
    if (y1 > y2) std::swap(y1, y2);
    if (x2 - x1 < kMinBoxSide) {
      if (x1 + kMinBoxSide <= 1.0) x2 = x1 + kMinBoxSide; else x1 = x2 - kMinBoxSide;
    }
    if (y2 - y1 < kMinBoxSide) {
      if (y1 + kMinBoxSide <= 1.0) y2 = y1 + kMinBoxSide; else y1 = y2 - kMinBoxSide;
    }
    out[static_cast<std::size_t>(4 * k) + 0] = x1;
    out[static_cast<std::size_t>(4 * k) + 1] = y1;
    out[static_cast<std::size_t>(4 * k) + 2] = x2;
    out[static_cast<std::size_t>(4 * k) + 3] = y2;
  }
  return out;
}

}  // namespace

std::vector<LayoutCoords> gen_layouts(int n, double jitter, std::uint64_t seed,
                                      std::vector<std::string>* warnings) {
  if (n < 0) throw std::invalid_argument("gen_layouts: n must be >= 0");
  if (!(jitter >= 0.0)) throw std::invalid_argument("gen_layouts: jitter must be >= 0");
  // smallest template box side is 0.12; beyond half of that the clamping
  // starts to dominate the geometry
  if (jitter > 0.06 && warnings)
    warnings->push_back("gen_layouts: jitter exceeds 0.06, boxes are clamped to stay valid");

  const LayoutCoords tpl = template_layout();
  std::vector<LayoutCoords> layouts;
  layouts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    layouts.push_back(jitter == 0.0 ? tpl : jitter_layout(tpl, jitter, rng));
  }
  return layouts;
}

namespace {

void add_lesion_blob(FeatureMap& fm, int channel, double box_x1, double box_y1,
                     double box_x2, double box_y2, double amplitude) {
  const double w = fm.width, h = fm.height;
  const double cx = 0.5 * (box_x1 + box_x2) * w - 0.5;
  const double cy = 0.5 * (box_y1 + box_y2) * h - 0.5;
  const double sx = std::max(0.5, (box_x2 - box_x1) * w / 4.0);
  const double sy = std::max(0.5, (box_y2 - box_y1) * h / 4.0);
  const auto i_lo = static_cast<std::int64_t>(std::floor(cy - 3.0 * sy));
  const auto i_hi = static_cast<std::int64_t>(std::ceil(cy + 3.0 * sy));
  const auto j_lo = static_cast<std::int64_t>(std::floor(cx - 3.0 * sx));
  const auto j_hi = static_cast<std::int64_t>(std::ceil(cx + 3.0 * sx));
  for (std::int64_t i = std::max<std::int64_t>(0, i_lo); i <= std::min<std::int64_t>(fm.height - 1, i_hi); ++i) {
    for (std::int64_t j = std::max<std::int64_t>(0, j_lo); j <= std::min<std::int64_t>(fm.width - 1, j_hi); ++j) {
      const double di = (static_cast<double>(i) - cy) / sy;
      const double dj = (static_cast<double>(j) - cx) / sx;
      const double r2 = di * di + dj * dj;
      if (r2 > 9.0) continue;  // truncate at three sigma
      auto& v = fm.at(static_cast<std::uint32_t>(channel), static_cast<std::uint32_t>(i),
                      static_cast<std::uint32_t>(j));
      v = static_cast<float>(static_cast<double>(v) + amplitude * std::exp(-0.5 * r2));
    }
  }
}

// exponential censoring rate mu with mean censoring probability ~= target;
// P(censor | lambda) = mu / (mu + lambda), increasing in mu, so bisect.
double tune_censor_rate(const std::vector<double>& lambdas, double target) {
  auto mean_censored = [&](double mu) {
    double acc = 0.0;
    for (double l : lambdas) acc += mu / (mu + l);
    return acc / static_cast<double>(lambdas.size());
  };
  double lo = 1e-300, hi = 1.0;
  while (mean_censored(hi) < target && hi < 1e280) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mean_censored(mid) < target) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Cohort gen_cohort(const SynthConfig& cfg, const std::vector<std::string>& region_names) {
  validate_region_names(region_names);
  if (cfg.n_subjects < 1) throw std::invalid_argument("gen_cohort: empty cohort");
  if (cfg.channels < 1 || cfg.height < 1 || cfg.width < 1)
    throw std::invalid_argument("gen_cohort: feature dimensions must be >= 1");
  if (!cfg.true_weights.empty() && cfg.true_weights.size() != cfg.channels)
    throw std::invalid_argument("gen_cohort: true_weights must have one entry per channel");
  if (!(cfg.baseline_hazard > 0.0)) throw std::invalid_argument("gen_cohort: baseline hazard must be > 0");
  if (!(cfg.censor_rate >= 0.0 && cfg.censor_rate < 1.0))
    throw std::invalid_argument("gen_cohort: censor rate must be in [0, 1)");
  if (cfg.lesion_region_index >= kRegionCount)
    throw std::invalid_argument("gen_cohort: lesion region index out of range");
  if (cfg.lesion_channel < 0 || cfg.lesion_channel >= static_cast<int>(cfg.channels))
    throw std::invalid_argument("gen_cohort: lesion channel out of range");
  if (cfg.undetected_per_case < 0 || cfg.undetected_per_case > kRegionCount)
    throw std::invalid_argument("gen_cohort: undetected_per_case out of range");

  std::vector<double> weights = cfg.true_weights;
  if (weights.empty()) weights.assign(cfg.channels, 0.0);

  Cohort cohort;
  if (cfg.layout_jitter > 0.06)
    cohort.warnings.push_back("gen_cohort: layout jitter exceeds 0.06, boxes are clamped");

  const LayoutCoords tpl = template_layout();
  std::vector<double> event_u(static_cast<std::size_t>(cfg.n_subjects));
  std::vector<double> censor_u(static_cast<std::size_t>(cfg.n_subjects));
  std::vector<double> etas(static_cast<std::size_t>(cfg.n_subjects));

  for (int s = 0; s < cfg.n_subjects; ++s) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(s));
    SynthSubject subject;
    char idbuf[16];
    std::snprintf(idbuf, sizeof idbuf, "s%05d", s + 1);
    subject.subject_id = idbuf;

    const LayoutCoords layout =
        cfg.layout_jitter == 0.0 ? tpl : jitter_layout(tpl, cfg.layout_jitter, rng);
    subject.lesion_region = cfg.lesion_region_index >= 0
                                ? cfg.lesion_region_index
                                : static_cast<int>(rng.uniform_int(0, kRegionCount - 1));

    subject.features = FeatureMap(cfg.channels, cfg.height, cfg.width);
    for (float& v : subject.features.values)
      v = static_cast<float>(std::fabs(rng.normal()) * cfg.background_std);
    const double amplitude = 5.0 * cfg.background_std * rng.uniform(0.5, 1.5);
    const auto lr = static_cast<std::size_t>(subject.lesion_region);
    add_lesion_blob(subject.features, cfg.lesion_channel, layout[4 * lr + 0], layout[4 * lr + 1],
                    layout[4 * lr + 2], layout[4 * lr + 3], amplitude);

    const std::vector<double> pooled = avg_pool(subject.features);
    double eta = 0.0;
    for (std::size_t c = 0; c < pooled.size(); ++c) eta += weights[c] * pooled[c];
    etas[static_cast<std::size_t>(s)] = eta;
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    event_u[static_cast<std::size_t>(s)] = u;
    censor_u[static_cast<std::size_t>(s)] = rng.uniform();

    subject.regions = region_set_from_coords(layout, region_names);
    for (auto& box : subject.regions.boxes) box.score = 0.5 + 0.5 * rng.uniform();
    if (cfg.undetected_per_case > 0) {
      for (int k : rng.sample_without_replacement(kRegionCount, cfg.undetected_per_case)) {
        RegionBox& b = subject.regions.boxes[static_cast<std::size_t>(k)];
        b.detected = false;
        b.score.reset();
        b.x1 = b.y1 = b.x2 = b.y2 = 0.0;
      }
    }
    cohort.subjects.push_back(std::move(subject));
  }

  // center the linear predictor on the cohort mean; the constant folds into
  // the baseline hazard and keeps sampled times in a workable range
  double eta_mean = 0.0;
  for (double e : etas) eta_mean += e;
  eta_mean /= static_cast<double>(cfg.n_subjects);

  std::vector<double> event_times(static_cast<std::size_t>(cfg.n_subjects));
  std::vector<double> lambdas(static_cast<std::size_t>(cfg.n_subjects));
  for (int s = 0; s < cfg.n_subjects; ++s) {
    const double eta = etas[static_cast<std::size_t>(s)] - eta_mean;
    cohort.subjects[static_cast<std::size_t>(s)].true_eta = eta;
    lambdas[static_cast<std::size_t>(s)] = cfg.baseline_hazard * std::exp(eta);
    event_times[static_cast<std::size_t>(s)] =
        -std::log1p(-event_u[static_cast<std::size_t>(s)]) / lambdas[static_cast<std::size_t>(s)];
  }

  if (cfg.censor_rate > 0.0) {
    const double mu = tune_censor_rate(lambdas, cfg.censor_rate);
    for (int s = 0; s < cfg.n_subjects; ++s) {
      double u = censor_u[static_cast<std::size_t>(s)];
      if (u <= 0.0) u = 0.5;  // degenerate draw; any fixed value keeps determinism
      const double censor_time = -std::log1p(-u) / mu;
      SynthSubject& subject = cohort.subjects[static_cast<std::size_t>(s)];
      const double t = event_times[static_cast<std::size_t>(s)];
      subject.record.event = t <= censor_time;
      subject.record.time_days = std::min(t, censor_time);
    }
  } else {
    for (int s = 0; s < cfg.n_subjects; ++s) {
      SynthSubject& subject = cohort.subjects[static_cast<std::size_t>(s)];
      subject.record.event = true;
      subject.record.time_days = event_times[static_cast<std::size_t>(s)];
    }
  }
  for (auto& subject : cohort.subjects) subject.record.subject_id = subject.subject_id;
  return cohort;
}

}  // namespace cxrisk
