#include "eqppo/harness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/distributions/normal.hpp>

namespace eqppo::harness {

MannKendallResult mann_kendall(std::span<const double> x) {
  MannKendallResult r;
  const std::size_t n = x.size();
  if (n < 3) return r;
  std::vector<double> slopes;
  slopes.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = x[j] - x[i];
      r.s += (d > 0) - (d < 0);
      slopes.push_back(d / static_cast<double>(j - i));
    }
  }
  std::map<double, long long> ties;
  for (double v : x) ++ties[v];
  const double nn = static_cast<double>(n);
  double var = nn * (nn - 1) * (2 * nn + 5);
  for (const auto& [v, t] : ties) {
    const double tt = static_cast<double>(t);
    var -= tt * (tt - 1) * (2 * tt + 5);
  }
  r.variance = var / 18.0;
  if (r.variance > 0) {
    if (r.s > 0) r.z = (static_cast<double>(r.s) - 1) / std::sqrt(r.variance);
    if (r.s < 0) r.z = (static_cast<double>(r.s) + 1) / std::sqrt(r.variance);
  }
  const boost::math::normal unit;
  r.p_two_sided = 2.0 * boost::math::cdf(boost::math::complement(unit, std::abs(r.z)));
  r.p_increasing = boost::math::cdf(boost::math::complement(unit, r.z));
  auto mid = slopes.begin() + static_cast<std::ptrdiff_t>(slopes.size() / 2);
  std::nth_element(slopes.begin(), mid, slopes.end());
  r.sen_slope = *mid;
  if (slopes.size() % 2 == 0) {
    const double lo = *std::max_element(slopes.begin(), mid);
    r.sen_slope = 0.5 * (r.sen_slope + lo);
  }
  return r;
}

std::vector<double> mean_curve(const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) return {};
  std::size_t len = std::numeric_limits<std::size_t>::max();
  for (const auto& c : curves) len = std::min(len, c.size());
  std::vector<double> out(len, 0.0);
  for (const auto& c : curves)
    for (std::size_t i = 0; i < len; ++i) out[i] += c[i] / static_cast<double>(curves.size());
  return out;
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

}  // namespace eqppo::harness
