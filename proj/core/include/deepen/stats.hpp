#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace deepen {

// Pairwise (cascade) summation; deterministic and more accurate than a naive
// left-to-right sum for long reductions.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);

// Population variance (divide by n).
double variance(std::span<const double> values);

// Spearman rank correlation with average ranks for ties.
// Returns 0 for fewer than 2 points or degenerate rankings.
double spearman(std::span<const double> x, std::span<const double> y);

// Large-sample z statistic for a Spearman coefficient: rho * sqrt(n - 1).
double spearman_z(double rho, std::size_t n);

// Wilson score interval for a binomial proportion (z = 1.96 -> 95%).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

// p-th percentile (0..100) with linear interpolation; input need not be sorted.
double percentile(std::vector<double> values, double p);

double sample_std(std::span<const double> values);

}  // namespace deepen
