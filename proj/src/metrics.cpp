#include "cxrisk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cxrisk {

namespace {

// Fenwick tree over compressed risk ranks; counts and nothing else.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t rank) {
    for (std::size_t i = rank + 1; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  // count of inserted ranks strictly below `rank`
  long prefix(std::size_t rank) const {
    long s = 0;
    for (std::size_t i = rank; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }
  long total() const { return prefix(tree_.size() - 1); }

 private:
  std::vector<long> tree_;
};

std::vector<std::size_t> rank_compress(const std::vector<double>& values,
                                       std::vector<double>& sorted_unique) {
  sorted_unique = values;
  std::sort(sorted_unique.begin(), sorted_unique.end());
  sorted_unique.erase(std::unique(sorted_unique.begin(), sorted_unique.end()), sorted_unique.end());
  std::vector<std::size_t> ranks(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    ranks[i] = static_cast<std::size_t>(
        std::lower_bound(sorted_unique.begin(), sorted_unique.end(), values[i]) -
        sorted_unique.begin());
  }
  return ranks;
}

void check_risks(const std::vector<double>& risks, const std::vector<SurvivalRecord>& records) {
  if (risks.size() != records.size())
    throw std::invalid_argument("metrics: risks/records length mismatch");
  validate(records);
  for (double r : risks)
    if (!std::isfinite(r)) throw std::invalid_argument("metrics: non-finite risk");
}

}  // namespace

double c_index(const std::vector<double>& risks, const std::vector<SurvivalRecord>& records) {
  check_risks(risks, records);
  const std::size_t n = risks.size();
  if (n < 2) throw std::invalid_argument("c_index: need at least two subjects");

  std::vector<double> unique_risks;
  const std::vector<std::size_t> rrank = rank_compress(risks, unique_risks);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].time_days < records[b].time_days;
  });

  // sweep times descending: the tree holds subjects with strictly later times
  Fenwick tree(unique_risks.size());
  double numerator = 0.0;
  long pairs = 0;
  std::size_t g_end = n;
  while (g_end > 0) {
    std::size_t g_begin = g_end;
    const double t = records[order[g_end - 1]].time_days;
    while (g_begin > 0 && records[order[g_begin - 1]].time_days == t) --g_begin;
    const long later = tree.total();
    for (std::size_t k = g_begin; k < g_end; ++k) {
      const std::size_t i = order[k];
      if (!records[i].event) continue;
      const long below = tree.prefix(rrank[i]);              // later subjects with lower risk
      const long at_or_below = tree.prefix(rrank[i] + 1);
      numerator += static_cast<double>(below) + 0.5 * static_cast<double>(at_or_below - below);
      pairs += later;
    }
    for (std::size_t k = g_begin; k < g_end; ++k) tree.add(rrank[order[k]]);
    g_end = g_begin;
  }
  if (pairs == 0) throw std::invalid_argument("c_index: no comparable pairs");
  return numerator / static_cast<double>(pairs);
}

double time_dependent_auc(const std::vector<double>& risks,
                          const std::vector<SurvivalRecord>& records,
                          double horizon) {
  check_risks(risks, records);
  if (!(std::isfinite(horizon) && horizon > 0.0))
    throw std::invalid_argument("time_dependent_auc: horizon must be finite and > 0");

  struct Item {
    double risk;
    bool is_case;
  };
  std::vector<Item> items;
  std::size_t n_case = 0, n_ctrl = 0;
  for (std::size_t i = 0; i < risks.size(); ++i) {
    const bool is_case = records[i].event && records[i].time_days <= horizon;
    const bool is_ctrl = records[i].time_days > horizon;
    if (!is_case && !is_ctrl) continue;  // censored at or before the horizon
    items.push_back({risks[i], is_case});
    (is_case ? n_case : n_ctrl) += 1;
  }
  if (n_case == 0) throw std::invalid_argument("time_dependent_auc: no cases at horizon");
  if (n_ctrl == 0) throw std::invalid_argument("time_dependent_auc: no controls at horizon");

  // midrank Mann-Whitney form
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.risk < b.risk; });
  double case_rank_sum = 0.0;
  std::size_t k = 0;
  while (k < items.size()) {
    std::size_t j = k;
    while (j < items.size() && items[j].risk == items[k].risk) ++j;
    const double midrank = 0.5 * static_cast<double>(k + 1 + j);  // ranks are 1-based
    for (std::size_t m = k; m < j; ++m)
      if (items[m].is_case) case_rank_sum += midrank;
    k = j;
  }
  const double nc = static_cast<double>(n_case);
  return (case_rank_sum - nc * (nc + 1.0) / 2.0) / (nc * static_cast<double>(n_ctrl));
}

KMCurve km_curve(const std::vector<SurvivalRecord>& records) {
  validate(records);
  const std::size_t n = records.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].time_days < records[b].time_days;
  });

  KMCurve curve;
  double surv = 1.0;
  std::size_t k = 0;
  while (k < n) {
    std::size_t j = k;
    const double t = records[order[k]].time_days;
    int deaths = 0;
    while (j < n && records[order[j]].time_days == t) {
      deaths += records[order[j]].event ? 1 : 0;
      ++j;
    }
    if (deaths > 0) {
      const int at_risk = static_cast<int>(n - k);
      surv *= 1.0 - static_cast<double>(deaths) / static_cast<double>(at_risk);
      curve.times.push_back(t);
      curve.survival.push_back(surv);
      curve.at_risk.push_back(at_risk);
      curve.events.push_back(deaths);
    }
    k = j;
  }
  return curve;
}

LogRankResult log_rank(const std::vector<SurvivalRecord>& group_a,
                       const std::vector<SurvivalRecord>& group_b) {
  if (group_a.empty() || group_b.empty())
    throw std::invalid_argument("log_rank: both groups must be non-empty");
  validate(group_a);
  validate(group_b);

  struct Pooled {
    double time;
    bool event;
    bool in_a;
  };
  std::vector<Pooled> all;
  all.reserve(group_a.size() + group_b.size());
  for (const auto& r : group_a) all.push_back({r.time_days, r.event, true});
  for (const auto& r : group_b) all.push_back({r.time_days, r.event, false});
  std::sort(all.begin(), all.end(), [](const Pooled& x, const Pooled& y) { return x.time < y.time; });

  double observed_a = 0.0, expected_a = 0.0, variance = 0.0;
  std::size_t na = group_a.size(), nb = group_b.size();
  std::size_t k = 0;
  while (k < all.size()) {
    std::size_t j = k;
    const double t = all[k].time;
    int d = 0, da = 0;
    std::size_t leave_a = 0, leave_b = 0;
    while (j < all.size() && all[j].time == t) {
      d += all[j].event ? 1 : 0;
      da += (all[j].event && all[j].in_a) ? 1 : 0;
      (all[j].in_a ? leave_a : leave_b) += 1;
      ++j;
    }
    if (d > 0) {
      const double n1 = static_cast<double>(na), n2 = static_cast<double>(nb);
      const double nn = n1 + n2, dd = static_cast<double>(d);
      observed_a += da;
      expected_a += dd * n1 / nn;
      if (nn > 1.0) variance += dd * (n1 / nn) * (n2 / nn) * (nn - dd) / (nn - 1.0);
    }
    na -= leave_a;
    nb -= leave_b;
    k = j;
  }

  if (!(variance > 0.0)) throw std::invalid_argument("log_rank: zero variance (no usable events)");
  LogRankResult res;
  const double diff = observed_a - expected_a;
  res.chi_square = diff * diff / variance;
  res.p_value = chi_square_sf(res.chi_square, 1.0);
  return res;
}

std::vector<RiskGroup> stratify_by_median(const std::vector<double>& risks) {
  if (risks.size() < 2) throw std::invalid_argument("stratify_by_median: need at least two risks");
  for (double r : risks)
    if (!std::isfinite(r)) throw std::invalid_argument("stratify_by_median: non-finite risk");
  std::vector<double> sorted = risks;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  std::vector<RiskGroup> groups(n);
  for (std::size_t i = 0; i < n; ++i)
    groups[i] = risks[i] > median ? RiskGroup::high : RiskGroup::low;
  return groups;
}

namespace {

// regularized incomplete gamma: series for P(a,x), continued fraction for Q(a,x)
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < 1000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k < 1000; ++k) {
    const double an = -static_cast<double>(k) * (static_cast<double>(k) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_square_sf(double x, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("chi_square_sf: dof must be > 0");
  if (!(x >= 0.0)) throw std::invalid_argument("chi_square_sf: x must be >= 0");
  const double a = 0.5 * dof;
  const double xx = 0.5 * x;
  if (xx == 0.0) return 1.0;
  if (xx < a + 1.0) return 1.0 - gamma_p_series(a, xx);
  return gamma_q_contfrac(a, xx);
}

}  // namespace cxrisk
