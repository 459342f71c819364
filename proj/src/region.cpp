#include "cxrisk/region.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "cxrisk/rng.hpp"

namespace cxrisk {

void validate_region_names(const std::vector<std::string>& names) {
  if (static_cast<int>(names.size()) != kRegionCount)
    throw std::invalid_argument("region names: expected exactly 29 entries");
  std::set<std::string> unique(names.begin(), names.end());
  if (unique.size() != names.size())
    throw std::invalid_argument("region names: duplicates present");
  for (const auto& n : names)
    if (n.empty()) throw std::invalid_argument("region names: empty name");
}

void validate(const RegionSet& rs) {
  if (static_cast<int>(rs.boxes.size()) != kRegionCount)
    throw std::invalid_argument("region set: expected exactly 29 boxes");
  std::set<std::string> seen;
  for (const auto& b : rs.boxes) {
    if (!seen.insert(b.name).second)
      throw std::invalid_argument("region set: duplicate region '" + b.name + "'");
    for (double v : {b.x1, b.y1, b.x2, b.y2})
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw std::invalid_argument("region set: coordinate outside [0,1] for '" + b.name + "'");
    if (b.detected) {
      if (!(b.x1 < b.x2 && b.y1 < b.y2))
        throw std::invalid_argument("region set: degenerate detected box '" + b.name + "'");
      if (!b.score || !(*b.score >= 0.0 && *b.score <= 1.0))
        throw std::invalid_argument("region set: detected box '" + b.name + "' needs a score in [0,1]");
    } else if (b.score) {
      throw std::invalid_argument("region set: undetected box '" + b.name + "' must not carry a score");
    }
  }
}

LayoutCoords region_set_coords(const RegionSet& rs) {
  LayoutCoords coords(kLayoutDim, 0.0);
  for (int k = 0; k < kRegionCount; ++k) {
    const RegionBox& b = rs.boxes[static_cast<std::size_t>(k)];
    coords[static_cast<std::size_t>(4 * k) + 0] = b.x1;
    coords[static_cast<std::size_t>(4 * k) + 1] = b.y1;
    coords[static_cast<std::size_t>(4 * k) + 2] = b.x2;
    coords[static_cast<std::size_t>(4 * k) + 3] = b.y2;
  }
  return coords;
}

RegionSet region_set_from_coords(const LayoutCoords& coords, const std::vector<std::string>& names) {
  validate_region_names(names);
  if (static_cast<int>(coords.size()) != kLayoutDim)
    throw std::invalid_argument("layout: expected 116 coordinates");
  RegionSet rs;
  rs.boxes.resize(kRegionCount);
  for (int k = 0; k < kRegionCount; ++k) {
    RegionBox& b = rs.boxes[static_cast<std::size_t>(k)];
    b.name = names[static_cast<std::size_t>(k)];
    b.x1 = coords[static_cast<std::size_t>(4 * k) + 0];
    b.y1 = coords[static_cast<std::size_t>(4 * k) + 1];
    b.x2 = coords[static_cast<std::size_t>(4 * k) + 2];
    b.y2 = coords[static_cast<std::size_t>(4 * k) + 3];
    b.detected = true;
    b.score = 1.0;
  }
  return rs;
}

RegionSet select_regions(const ProposalSet& ps, const std::vector<std::string>& names) {
  validate_region_names(names);
  for (const auto& p : ps.proposals) {
    if (static_cast<int>(p.scores.size()) != kRegionCount)
      throw std::invalid_argument("proposal: score vector must have 29 entries");
    for (double s : p.scores)
      if (!std::isfinite(s) || s < 0.0 || s > 1.0)
        throw std::invalid_argument("proposal: score outside [0,1]");
    for (double v : {p.x1, p.y1, p.x2, p.y2})
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw std::invalid_argument("proposal: coordinate outside [0,1]");
    if (!(p.x1 < p.x2 && p.y1 < p.y2))
      throw std::invalid_argument("proposal: degenerate box");
  }

  std::vector<int> winner(kRegionCount, -1);  // proposal index claimed per class
  for (std::size_t pi = 0; pi < ps.proposals.size(); ++pi) {
    const auto& scores = ps.proposals[pi].scores;
    // first maximum wins the argmax, keeping ties deterministic
    int cls = 0;
    for (int c = 1; c < kRegionCount; ++c)
      if (scores[static_cast<std::size_t>(c)] > scores[static_cast<std::size_t>(cls)]) cls = c;
    const int cur = winner[static_cast<std::size_t>(cls)];
    if (cur < 0 || scores[static_cast<std::size_t>(cls)] >
                       ps.proposals[static_cast<std::size_t>(cur)].scores[static_cast<std::size_t>(cls)])
      winner[static_cast<std::size_t>(cls)] = static_cast<int>(pi);
  }

  RegionSet rs;
  rs.boxes.resize(kRegionCount);
  for (int k = 0; k < kRegionCount; ++k) {
    RegionBox& b = rs.boxes[static_cast<std::size_t>(k)];
    b.name = names[static_cast<std::size_t>(k)];
    const int pi = winner[static_cast<std::size_t>(k)];
    if (pi >= 0) {
      const Proposal& p = ps.proposals[static_cast<std::size_t>(pi)];
      b.x1 = p.x1;
      b.y1 = p.y1;
      b.x2 = p.x2;
      b.y2 = p.y2;
      b.detected = true;
      b.score = p.scores[static_cast<std::size_t>(k)];
    } else {
      b.detected = false;  // placeholder coords stay (0,0,0,0)
    }
  }
  return rs;
}

namespace {

void check_net(const CompleterNet& net) {
  const std::size_t in = net.input_dim, hid = net.hidden_dim, out = net.output_dim;
  if (in != kCompleterInputDim || out != kLayoutDim || hid < 1)
    throw std::invalid_argument("completer net: unexpected layer dimensions");
  if (net.w1.size() != hid * in || net.b1.size() != hid || net.w2.size() != hid * hid ||
      net.b2.size() != hid || net.w3.size() != out * hid || net.b3.size() != out)
    throw std::invalid_argument("completer net: parameter shapes do not chain");
  for (const auto* vec : {&net.w1, &net.b1, &net.w2, &net.b2, &net.w3, &net.b3})
    for (double v : *vec)
      if (!std::isfinite(v)) throw std::invalid_argument("completer net: non-finite parameter");
}

struct ForwardPass {
  std::vector<double> x, pre1, h1, pre2, h2, out;
};

void forward_into(const CompleterNet& net, const LayoutCoords& coords,
                  const std::vector<std::uint8_t>& mask, ForwardPass& fp) {
  const std::size_t in = net.input_dim, hid = net.hidden_dim, out = net.output_dim;
  fp.x.assign(in, 0.0);
  for (int k = 0; k < kRegionCount; ++k) {
    if (mask[static_cast<std::size_t>(k)]) {
      fp.x[static_cast<std::size_t>(kLayoutDim + k)] = 1.0;
    } else {
      for (int c = 0; c < 4; ++c)
        fp.x[static_cast<std::size_t>(4 * k + c)] = coords[static_cast<std::size_t>(4 * k + c)];
    }
  }
  fp.pre1.assign(hid, 0.0);
  for (std::size_t r = 0; r < hid; ++r) {
    double acc = net.b1[r];
    const double* wrow = net.w1.data() + r * in;
    for (std::size_t c = 0; c < in; ++c) acc += wrow[c] * fp.x[c];
    fp.pre1[r] = acc;
  }
  fp.h1.resize(hid);
  for (std::size_t r = 0; r < hid; ++r) fp.h1[r] = std::max(0.0, fp.pre1[r]);

  fp.pre2.assign(hid, 0.0);
  for (std::size_t r = 0; r < hid; ++r) {
    double acc = net.b2[r];
    const double* wrow = net.w2.data() + r * hid;
    for (std::size_t c = 0; c < hid; ++c) acc += wrow[c] * fp.h1[c];
    fp.pre2[r] = acc;
  }
  fp.h2.resize(hid);
  for (std::size_t r = 0; r < hid; ++r) fp.h2[r] = std::max(0.0, fp.pre2[r]);

  fp.out.assign(out, 0.0);
  for (std::size_t r = 0; r < out; ++r) {
    double acc = net.b3[r];
    const double* wrow = net.w3.data() + r * hid;
    for (std::size_t c = 0; c < hid; ++c) acc += wrow[c] * fp.h2[c];
    fp.out[r] = acc;
  }
}

}  // namespace

std::vector<double> completer_forward(const CompleterNet& net, const LayoutCoords& coords,
                                      const std::vector<std::uint8_t>& mask) {
  check_net(net);
  if (static_cast<int>(coords.size()) != kLayoutDim)
    throw std::invalid_argument("completer_forward: expected 116 coordinates");
  if (static_cast<int>(mask.size()) != kRegionCount)
    throw std::invalid_argument("completer_forward: expected 29 mask bits");
  ForwardPass fp;
  forward_into(net, coords, mask, fp);
  return fp.out;
}

CompleterGradients completer_masked_mse_gradients(
    const CompleterNet& net, const std::vector<LayoutCoords>& batch,
    const std::vector<std::vector<int>>& masked_regions) {
  check_net(net);
  if (batch.empty() || batch.size() != masked_regions.size())
    throw std::invalid_argument("completer gradients: batch/mask size mismatch");

  const std::size_t in = net.input_dim, hid = net.hidden_dim, out = net.output_dim;
  CompleterGradients g;
  g.w1.assign(hid * in, 0.0);
  g.b1.assign(hid, 0.0);
  g.w2.assign(hid * hid, 0.0);
  g.b2.assign(hid, 0.0);
  g.w3.assign(out * hid, 0.0);
  g.b3.assign(out, 0.0);

  std::size_t masked_coord_count = 0;
  for (const auto& regs : masked_regions) masked_coord_count += regs.size() * 4;
  if (masked_coord_count == 0)
    throw std::invalid_argument("completer gradients: nothing masked");
  const double inv_m = 1.0 / static_cast<double>(masked_coord_count);

  ForwardPass fp;
  std::vector<std::uint8_t> mask(kRegionCount, 0);
  std::vector<double> dout(out), dh2(hid), dh1(hid);
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const LayoutCoords& target = batch[s];
    if (static_cast<int>(target.size()) != kLayoutDim)
      throw std::invalid_argument("completer gradients: layout must have 116 coordinates");
    std::fill(mask.begin(), mask.end(), std::uint8_t{0});
    for (int r : masked_regions[s]) {
      if (r < 0 || r >= kRegionCount)
        throw std::invalid_argument("completer gradients: masked region index out of range");
      mask[static_cast<std::size_t>(r)] = 1;
    }
    forward_into(net, target, mask, fp);

    std::fill(dout.begin(), dout.end(), 0.0);
    for (int r : masked_regions[s]) {
      for (int c = 0; c < 4; ++c) {
        const auto j = static_cast<std::size_t>(4 * r + c);
        const double diff = fp.out[j] - target[j];
        g.loss += diff * diff * inv_m;
        dout[j] = 2.0 * diff * inv_m;
      }
    }

    for (std::size_t r = 0; r < out; ++r) {
      const double dv = dout[r];
      if (dv == 0.0) continue;
      g.b3[r] += dv;
      double* wrow = g.w3.data() + r * hid;
      for (std::size_t c = 0; c < hid; ++c) wrow[c] += dv * fp.h2[c];
    }
    std::fill(dh2.begin(), dh2.end(), 0.0);
    for (std::size_t r = 0; r < out; ++r) {
      const double dv = dout[r];
      if (dv == 0.0) continue;
      const double* wrow = net.w3.data() + r * hid;
      for (std::size_t c = 0; c < hid; ++c) dh2[c] += dv * wrow[c];
    }
    for (std::size_t r = 0; r < hid; ++r)
      if (fp.pre2[r] <= 0.0) dh2[r] = 0.0;

    for (std::size_t r = 0; r < hid; ++r) {
      const double dv = dh2[r];
      if (dv == 0.0) continue;
      g.b2[r] += dv;
      double* wrow = g.w2.data() + r * hid;
      for (std::size_t c = 0; c < hid; ++c) wrow[c] += dv * fp.h1[c];
    }
    std::fill(dh1.begin(), dh1.end(), 0.0);
    for (std::size_t r = 0; r < hid; ++r) {
      const double dv = dh2[r];
      if (dv == 0.0) continue;
      const double* wrow = net.w2.data() + r * hid;
      for (std::size_t c = 0; c < hid; ++c) dh1[c] += dv * wrow[c];
    }
    for (std::size_t r = 0; r < hid; ++r)
      if (fp.pre1[r] <= 0.0) dh1[r] = 0.0;

    for (std::size_t r = 0; r < hid; ++r) {
      const double dv = dh1[r];
      if (dv == 0.0) continue;
      g.b1[r] += dv;
      double* wrow = g.w1.data() + r * in;
      for (std::size_t c = 0; c < in; ++c) wrow[c] += dv * fp.x[c];
    }
  }
  return g;
}

namespace {

void glorot_fill(std::vector<double>& w, std::size_t fan_out, std::size_t fan_in, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  w.resize(fan_out * fan_in);
  for (double& v : w) v = rng.uniform(-limit, limit);
}

struct Adam {
  std::vector<double> m, v;
  explicit Adam(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
  void step(std::vector<double>& p, const std::vector<double>& g, long t, const CompleterConfig& cfg) {
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
      p[k] -= cfg.learning_rate * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + cfg.epsilon);
    }
  }
};

}  // namespace

CompleterFitResult completer_train(const std::vector<LayoutCoords>& layouts,
                                   const CompleterConfig& cfg) {
  if (layouts.empty()) throw std::invalid_argument("completer_train: no layouts");
  for (const auto& l : layouts) {
    if (static_cast<int>(l.size()) != kLayoutDim)
      throw std::invalid_argument("completer_train: layout must have 116 coordinates");
    for (double v : l)
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw std::invalid_argument("completer_train: coordinate outside [0,1]");
  }
  if (cfg.batch_size < 1 || cfg.epochs < 0 || cfg.hidden_dim < 1 || !(cfg.learning_rate > 0.0))
    throw std::invalid_argument("completer_train: bad config");
  if (!(cfg.mask_fraction_low > 0.0 && cfg.mask_fraction_low <= cfg.mask_fraction_high &&
        cfg.mask_fraction_high < 1.0))
    throw std::invalid_argument("completer_train: mask fraction range must satisfy 0 < low <= high < 1");

  Rng rng(cfg.seed);
  CompleterFitResult result;
  CompleterNet& net = result.net;
  net.hidden_dim = static_cast<std::uint32_t>(cfg.hidden_dim);
  const std::size_t in = net.input_dim, hid = net.hidden_dim, out = net.output_dim;
  glorot_fill(net.w1, hid, in, rng);
  net.b1.assign(hid, 0.0);
  glorot_fill(net.w2, hid, hid, rng);
  net.b2.assign(hid, 0.0);
  glorot_fill(net.w3, out, hid, rng);
  net.b3.assign(out, 0.0);

  Adam opt_w1(net.w1.size()), opt_b1(hid), opt_w2(net.w2.size()), opt_b2(hid),
      opt_w3(net.w3.size()), opt_b3(out);
  long t = 0;

  std::vector<std::size_t> order(layouts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    int steps = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const double frac = rng.uniform(cfg.mask_fraction_low, cfg.mask_fraction_high);
      const int k = std::clamp(static_cast<int>(std::lround(frac * kRegionCount)), 1, kRegionCount - 1);

      std::vector<LayoutCoords> batch;
      std::vector<std::vector<int>> masks;
      batch.reserve(stop - start);
      masks.reserve(stop - start);
      for (std::size_t s = start; s < stop; ++s) {
        batch.push_back(layouts[order[s]]);
        masks.push_back(rng.sample_without_replacement(kRegionCount, k));
      }

      CompleterGradients g = completer_masked_mse_gradients(net, batch, masks);
      ++t;
      opt_w1.step(net.w1, g.w1, t, cfg);
      opt_b1.step(net.b1, g.b1, t, cfg);
      opt_w2.step(net.w2, g.w2, t, cfg);
      opt_b2.step(net.b2, g.b2, t, cfg);
      opt_w3.step(net.w3, g.w3, t, cfg);
      opt_b3.step(net.b3, g.b3, t, cfg);
      epoch_loss += g.loss;
      ++steps;
    }
    result.loss_trace.push_back(steps > 0 ? epoch_loss / steps : 0.0);
  }
  return result;
}

CompletionResult complete(const RegionSet& rs, const CompleterNet& net) {
  validate(rs);
  check_net(net);
  CompletionResult result;
  result.set = rs;

  std::vector<std::uint8_t> mask(kRegionCount, 0);
  int missing = 0;
  for (int k = 0; k < kRegionCount; ++k) {
    if (!rs.boxes[static_cast<std::size_t>(k)].detected) {
      mask[static_cast<std::size_t>(k)] = 1;
      ++missing;
    }
  }
  if (missing == 0) return result;  // untouched pass-through
  if (missing == kRegionCount)
    result.warnings.push_back("low confidence: no detected regions; completing from an all-zero input");

  const std::vector<double> predicted = completer_forward(net, region_set_coords(rs), mask);
  constexpr double kMinSide = 1e-6;
  for (int k = 0; k < kRegionCount; ++k) {
    if (!mask[static_cast<std::size_t>(k)]) continue;
    RegionBox& b = result.set.boxes[static_cast<std::size_t>(k)];
    double x1 = std::clamp(predicted[static_cast<std::size_t>(4 * k) + 0], 0.0, 1.0);
    double y1 = std::clamp(predicted[static_cast<std::size_t>(4 * k) + 1], 0.0, 1.0);
    double x2 = std::clamp(predicted[static_cast<std::size_t>(4 * k) + 2], 0.0, 1.0);
    double y2 = std::clamp(predicted[static_cast<std::size_t>(4 * k) + 3], 0.0, 1.0);
    if (x1 > x2) std::swap(x1, x2);
    if (y1 > y2) std::swap(y1, y2);
    if (x2 - x1 < kMinSide) {
      if (x1 + kMinSide <= 1.0) x2 = x1 + kMinSide; else x1 = x2 - kMinSide;
    }
    if (y2 - y1 < kMinSide) {
      if (y1 + kMinSide <= 1.0) y2 = y1 + kMinSide; else y1 = y2 - kMinSide;
    }
    b.x1 = x1; b.y1 = y1; b.x2 = x2; b.y2 = y2;
    b.detected = false;
    b.score.reset();
  }
  return result;
}

}  // namespace cxrisk
