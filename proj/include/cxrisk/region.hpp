#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cxrisk {

inline constexpr int kRegionCount = 29;
inline constexpr int kLayoutDim = kRegionCount * 4;              // 116 coordinates
inline constexpr int kCompleterInputDim = kLayoutDim + kRegionCount;  // coords + mask bits

// x1,y1,x2,y2 per region in that order, normalized to the unit square.
using LayoutCoords = std::vector<double>;

struct RegionBox {
  std::string name;
  double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;  // normalized to image size
  bool detected = false;
  std::optional<double> score;  // present iff detected
};

// Exactly one box per configured region name.
struct RegionSet {
  std::vector<RegionBox> boxes;
};

struct Proposal {
  double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;
  std::vector<double> scores;  // one per region class, in [0,1]
};

struct ProposalSet {
  std::vector<Proposal> proposals;
};

// Three-layer perceptron that regresses all 116 box coordinates from the
// visible coordinates plus a mask-bit vector (1 = region missing).
struct CompleterNet {
  std::uint32_t input_dim = kCompleterInputDim;
  std::uint32_t hidden_dim = 0;
  std::uint32_t output_dim = kLayoutDim;
  std::vector<double> w1, b1;  // hidden x input
  std::vector<double> w2, b2;  // hidden x hidden
  std::vector<double> w3, b3;  // output x hidden
};

struct CompleterConfig {
  int batch_size = 2000;
  double learning_rate = 1e-3;
  double mask_fraction_low = 0.1;
  double mask_fraction_high = 0.5;
  int epochs = 30;
  int hidden_dim = 256;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct CompleterFitResult {
  CompleterNet net;
  std::vector<double> loss_trace;  // mean masked MSE per epoch
};

struct CompletionResult {
  RegionSet set;
  std::vector<std::string> warnings;
};

void validate_region_names(const std::vector<std::string>& names);
void validate(const RegionSet& rs);

LayoutCoords region_set_coords(const RegionSet& rs);
RegionSet region_set_from_coords(const LayoutCoords& coords, const std::vector<std::string>& names);

// Claims each proposal for its argmax class; a region is detected iff it
// claims at least one proposal and takes the highest-scoring claimed box
// (ties broken by lowest proposal index).
RegionSet select_regions(const ProposalSet& ps, const std::vector<std::string>& names);

// Forward pass; coordinates of masked regions are zeroed before the network
// sees them, mirroring training.
std::vector<double> completer_forward(const CompleterNet& net, const LayoutCoords& coords,
                                      const std::vector<std::uint8_t>& mask);

// Masked-MSE loss and parameter gradients for one batch; the backprop core
// behind completer_train, exposed for direct gradient checks.
struct CompleterGradients {
  double loss = 0.0;
  std::vector<double> w1, b1, w2, b2, w3, b3;
};
CompleterGradients completer_masked_mse_gradients(
    const CompleterNet& net, const std::vector<LayoutCoords>& batch,
    const std::vector<std::vector<int>>& masked_regions);

// Random-masking regression training (Adam, manual backprop); deterministic
// for a given config.
CompleterFitResult completer_train(const std::vector<LayoutCoords>& layouts,
                                   const CompleterConfig& cfg);

// Fills undetected boxes from the net; detected boxes pass through untouched.
CompletionResult complete(const RegionSet& rs, const CompleterNet& net);

}  // namespace cxrisk
