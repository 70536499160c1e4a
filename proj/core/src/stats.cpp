#include "floquet_sep/stats.hpp"

#include <cmath>
#include <numeric>

#include "floquet_sep/errors.hpp"

namespace floquet_sep {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("linear_fit: size mismatch");
  if (x.size() < 2) throw InvalidArgument("linear_fit: need at least 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw InvalidArgument("linear_fit: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // exact fits (syy == 0) count as perfect
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.samples = static_cast<int>(n);
  return fit;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double batch_means_stderr(const std::vector<double>& v, int batches) {
  if (batches < 2) return 0.0;
  const auto per = v.size() / static_cast<std::size_t>(batches);
  if (per == 0) return 0.0;
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < per; ++i) s += v[b * per + i];
    means.push_back(s / static_cast<double>(per));
  }
  const double mu = mean(means);
  double var = 0.0;
  for (double x : means) var += (x - mu) * (x - mu);
  var /= static_cast<double>(batches - 1);
  return std::sqrt(var / static_cast<double>(batches));
}

}  // namespace floquet_sep
