#include "cxrisk/cam.hpp"

#include <algorithm>
#include <cmath>

namespace cxrisk {

GradientVolume head_feature_gradient(const RiskHead& head, const FeatureMap& fm) {
  validate(fm);
  if (head.weights.size() != fm.channels)
    throw std::invalid_argument("head_feature_gradient: channel mismatch");

  const std::vector<double> pooled = avg_pool(fm);
  const double risk = predict_risk(head, pooled);
  const double dsig = risk * (1.0 - risk);
  const std::size_t plane = static_cast<std::size_t>(fm.height) * fm.width;

  GradientVolume g;
  g.channels = fm.channels;
  g.height = fm.height;
  g.width = fm.width;
  g.values.resize(fm.values.size());
  for (std::uint32_t c = 0; c < fm.channels; ++c) {
    const double v = dsig * head.weights[c] / static_cast<double>(plane);
    std::fill_n(g.values.begin() + static_cast<std::ptrdiff_t>(c * plane), plane, v);
  }
  return g;
}

ChannelWeights channel_weights(const GradientVolume& grads, double normalizer) {
  if (!(normalizer > 0.0)) throw std::invalid_argument("channel_weights: normalizer must be > 0");
  ChannelWeights cw;
  cw.normalizer = normalizer;
  cw.alpha.resize(grads.channels);
  const std::size_t plane = static_cast<std::size_t>(grads.height) * grads.width;
  for (std::uint32_t c = 0; c < grads.channels; ++c) {
    double sum = 0.0;
    const double* p = grads.values.data() + static_cast<std::size_t>(c) * plane;
    for (std::size_t k = 0; k < plane; ++k) sum += p[k];
    cw.alpha[c] = sum / normalizer;
  }
  return cw;
}

ActivationMap risk_cam(const FeatureMap& fm, const RiskHead& head) {
  const GradientVolume grads = head_feature_gradient(head, fm);
  const std::size_t plane = static_cast<std::size_t>(fm.height) * fm.width;
  const ChannelWeights cw = channel_weights(grads, static_cast<double>(plane));

  ActivationMap cam(fm.height, fm.width);
  for (std::uint32_t c = 0; c < fm.channels; ++c) {
    const double a = cw.alpha[c];
    const float* f = fm.values.data() + static_cast<std::size_t>(c) * plane;
    for (std::size_t k = 0; k < plane; ++k) cam.values[k] += a * static_cast<double>(f[k]);
  }
  for (double& v : cam.values) v = std::max(0.0, v);
  return cam;
}

ActivationMap upsample_bilinear(const ActivationMap& am, std::uint32_t out_h, std::uint32_t out_w) {
  if (am.height < 1 || am.width < 1 || am.values.size() != static_cast<std::size_t>(am.height) * am.width)
    throw std::invalid_argument("upsample_bilinear: malformed activation map");
  if (out_h < 1 || out_w < 1) throw std::invalid_argument("upsample_bilinear: output dims must be >= 1");

  ActivationMap out(out_h, out_w);
  const double sy = out_h > 1 ? static_cast<double>(am.height - 1) / (out_h - 1) : 0.0;
  const double sx = out_w > 1 ? static_cast<double>(am.width - 1) / (out_w - 1) : 0.0;
  for (std::uint32_t i = 0; i < out_h; ++i) {
    const double y = sy * i;
    const auto y0 = static_cast<std::uint32_t>(y);
    const std::uint32_t y1 = std::min(y0 + 1, am.height - 1);
    const double fy = y - y0;
    for (std::uint32_t j = 0; j < out_w; ++j) {
      const double x = sx * j;
      const auto x0 = static_cast<std::uint32_t>(x);
      const std::uint32_t x1 = std::min(x0 + 1, am.width - 1);
      const double fx = x - x0;
      out.at(i, j) = (1.0 - fy) * ((1.0 - fx) * am.at(y0, x0) + fx * am.at(y0, x1)) +
                     fy * ((1.0 - fx) * am.at(y1, x0) + fx * am.at(y1, x1));
    }
  }
  return out;
}

ActivationMap normalize_unit_range(const ActivationMap& am) {
  ActivationMap out = am;
  if (am.values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(am.values.begin(), am.values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi > lo) {
    for (double& v : out.values) v = (v - lo) / (hi - lo);
  } else {
    std::fill(out.values.begin(), out.values.end(), 0.0);
  }
  return out;
}

}  // namespace cxrisk
