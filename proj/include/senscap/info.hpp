#pragma once

#include <span>

namespace senscap {

// Base-2 information measures. 0·log0 = 0.

double entropy(std::span<const double> p);

/// Kullback-Leibler divergence D(p||q) in bits; +inf when p has mass where q
/// has none. Sizes must match.
double kl(std::span<const double> p, std::span<const double> q);

/// -sum p log2 q (cross entropy); +inf under the same support rule as kl.
double cross_entropy(std::span<const double> p, std::span<const double> q);

}  // namespace senscap
