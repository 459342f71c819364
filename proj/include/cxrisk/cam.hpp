#pragma once

#include "cxrisk/survival.hpp"

namespace cxrisk {

// Post-ReLU risk activation map at feature-grid or image resolution.
struct ActivationMap {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<double> values;  // row-major, all >= 0

  ActivationMap() = default;
  ActivationMap(std::uint32_t h, std::uint32_t w)
      : height(h), width(w), values(static_cast<std::size_t>(h) * w, 0.0) {}

  double at(std::uint32_t i, std::uint32_t j) const { return values[static_cast<std::size_t>(i) * width + j]; }
  double& at(std::uint32_t i, std::uint32_t j) { return values[static_cast<std::size_t>(i) * width + j]; }
};

struct ChannelWeights {
  std::vector<double> alpha;
  double normalizer = 0.0;  // Z
};

// dRisk/dFeature per element; for the pooled sigmoid head this is constant
// within each channel but kept at full C x H x W shape.
struct GradientVolume {
  std::uint32_t channels = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<double> values;

  double at(std::uint32_t c, std::uint32_t i, std::uint32_t j) const {
    return values[(static_cast<std::size_t>(c) * height + i) * width + j];
  }
};

// Closed-form gradient of the sigmoid risk output with respect to every
// feature-map element: sigma'(z) * w_c / (H*W).
GradientVolume head_feature_gradient(const RiskHead& head, const FeatureMap& fm);

// Channel importance: alpha_c = (1/Z) * sum over space of the gradient.
ChannelWeights channel_weights(const GradientVolume& grads, double normalizer);

// ReLU of the channel-weighted feature sum, with Z = H*W.
ActivationMap risk_cam(const FeatureMap& fm, const RiskHead& head);

// Corner-aligned bilinear resampling; preserves non-negativity.
ActivationMap upsample_bilinear(const ActivationMap& am, std::uint32_t out_h, std::uint32_t out_w);

// Min-max rescale to [0,1] for visual export; constant maps become zero.
ActivationMap normalize_unit_range(const ActivationMap& am);

}  // namespace cxrisk
