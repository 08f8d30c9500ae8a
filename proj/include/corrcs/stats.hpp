#pragma once

#include <span>

namespace corrcs::stats {

/// Pairwise (cascade) sum. The tree shape depends only on the length, so the
/// result is reproducible for a given input order.
double pairwise_sum(std::span<const double> v);

double mean(std::span<const double> v);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> v);

/// Two-sided 99% normal quantile, about 2.5758.
double z99();

/// Half-width of the 99% confidence interval of the mean, Gaussian approximation.
double ci99_halfwidth(std::span<const double> v);

}  // namespace corrcs::stats
