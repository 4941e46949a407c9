#pragma once

// Small statistical toolbox: confidence intervals, binomial bands and the
// weighted log-linear decay fitter shared by all tail estimates.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace percolab {

inline constexpr double kZ95 = 1.959963984540054;

struct MeanCI {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t n = 0;
};

inline MeanCI mean_ci(const std::vector<double>& xs, double z = kZ95) {
  MeanCI r;
  r.n = xs.size();
  if (xs.empty()) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  double se = xs.size() > 1 ? std::sqrt(ss / (static_cast<double>(xs.size()) * (static_cast<double>(xs.size()) - 1.0))) : 0.0;
  r.lo = r.mean - z * se;
  r.hi = r.mean + z * se;
  return r;
}

// CI from batch means; robust to mild within-batch correlation.
inline MeanCI batch_means_ci(const std::vector<double>& xs, int batches = 10, double z = kZ95) {
  if (xs.size() < static_cast<std::size_t>(2 * batches)) return mean_ci(xs, z);
  std::vector<double> bm;
  bm.reserve(static_cast<std::size_t>(batches));
  std::size_t per = xs.size() / static_cast<std::size_t>(batches);
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = static_cast<std::size_t>(b) * per; i < static_cast<std::size_t>(b + 1) * per; ++i) s += xs[i];
    bm.push_back(s / static_cast<double>(per));
  }
  MeanCI r = mean_ci(bm, z);
  r.n = xs.size();
  return r;
}

struct BinomCI {
  double phat = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

inline BinomCI binomial_ci(std::uint64_t count, std::uint64_t total, double z = kZ95) {
  BinomCI r;
  if (total == 0) return r;
  r.phat = static_cast<double>(count) / static_cast<double>(total);
  double se = std::sqrt(std::max(r.phat * (1.0 - r.phat), 0.0) / static_cast<double>(total));
  r.lo = std::max(0.0, r.phat - z * se);
  r.hi = std::min(1.0, r.phat + z * se);
  return r;
}

inline double binomial_sigma(double p, std::uint64_t n) {
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

// |phat - p0| within k standard deviations of the null binomial
inline bool binomial_band(std::uint64_t count, std::uint64_t total, double p0, double k = 3.0) {
  double phat = static_cast<double>(count) / static_cast<double>(total);
  return std::abs(phat - p0) <= k * binomial_sigma(p0, total);
}

// with zero events in n trials, 3/n is the usual 95% upper bound on p
inline double rule_of_three(std::uint64_t total) {
  return total == 0 ? 1.0 : 3.0 / static_cast<double>(total);
}

struct FitResult {
  bool ok = false;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_ci = 0.0;  // 95% half-width
  int points_used = 0;
  std::vector<std::size_t> zero_indices;       // input points with count == 0
  std::vector<double> rule_of_three_bounds;    // -ln(3/total) per zero point
};

// Weighted least squares of -ln(count/total) against x with binomial-variance
// weights. Zero counts are excluded and reported with rule-of-three bounds.
inline FitResult fit_exponential_decay(const std::vector<double>& xs,
                                       const std::vector<double>& counts,
                                       const std::vector<double>& totals) {
  if (xs.size() != counts.size() || xs.size() != totals.size())
    throw std::invalid_argument("fit_exponential_decay: length mismatch");
  FitResult r;
  std::vector<double> x, y, w;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (totals[i] <= 0.0) throw std::invalid_argument("fit_exponential_decay: nonpositive total");
    if (counts[i] < 1.0 && counts[i] <= 0.0) {
      r.zero_indices.push_back(i);
      r.rule_of_three_bounds.push_back(-std::log(rule_of_three(static_cast<std::uint64_t>(totals[i]))));
      continue;
    }
    double phat = counts[i] / totals[i];
    x.push_back(xs[i]);
    y.push_back(-std::log(phat));
    double var = std::max((1.0 - phat) / (phat * totals[i]), 1e-12);
    w.push_back(1.0 / var);
  }
  if (x.size() < 3)
    throw std::invalid_argument("fit_exponential_decay: fewer than 3 usable points");
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  double xbar = swx / sw, ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_exponential_decay: degenerate abscissae");
  r.slope = sxy / sxx;
  r.intercept = ybar - r.slope * xbar;
  r.slope_ci = kZ95 / std::sqrt(sxx);
  r.points_used = static_cast<int>(x.size());
  r.ok = true;
  return r;
}

}  // namespace percolab
