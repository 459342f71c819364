#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace cxrisk {

// Central-difference gradient of a scalar function of a vector. Kept apart
// from every analytic gradient in this library so tests can use it as an
// independent oracle.
inline std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& fn,
    std::vector<double> x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_difference_gradient: step must be > 0");
  std::vector<double> grad(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double saved = x[k];
    x[k] = saved + step;
    const double hi = fn(x);
    x[k] = saved - step;
    const double lo = fn(x);
    x[k] = saved;
    grad[k] = (hi - lo) / (2.0 * step);
  }
  return grad;
}

}  // namespace cxrisk
