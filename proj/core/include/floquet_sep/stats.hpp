#pragma once

#include <vector>

namespace floquet_sep {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int samples = 0;
};

/// Ordinary least squares y ≈ slope·x + intercept. Needs >= 2 distinct x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& v);

/// Standard error of the mean from `batches` contiguous batch means.
/// Returns 0 for fewer than 2 usable batches.
double batch_means_stderr(const std::vector<double>& v, int batches = 10);

}  // namespace floquet_sep
