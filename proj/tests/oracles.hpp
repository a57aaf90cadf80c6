#pragma once

// Test-side reference computations. They only share the public data types
// with the library and recompute everything from the definitions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

struct Model {
  std::array<double, 2> node;
  std::array<std::array<double, 2>, 2> edge;  // edge[a][b] = P(a | b)
};

inline Model symmetric(double p) { return {{p, 1 - p}, {{{p, 1 - p}, {1 - p, p}}}}; }

inline double site_weight(const Model& m, int center, int n, int e, int s, int w) {
  return m.node[center] * m.edge[center][n] * m.edge[center][e] * m.edge[center][s] * m.edge[center][w];
}

inline double W(const Model& m) {
  double total = 0.0;
  for (int bits = 0; bits < 32; ++bits)
    total += site_weight(m, bits & 1, (bits >> 4) & 1, (bits >> 3) & 1, (bits >> 2) & 1, (bits >> 1) & 1);
  return total;
}

/// φ* indexed as N·16 + E·8 + S·4 + W·2 + center.
inline std::array<double, 32> phi_star(const Model& m) {
  std::array<double, 32> phi{};
  const double w = W(m);
  for (int t = 0; t < 32; ++t)
    phi[t] = site_weight(m, t & 1, (t >> 4) & 1, (t >> 3) & 1, (t >> 2) & 1, (t >> 1) & 1) / w;
  return phi;
}

/// log2 of the product of per-site factors (divided by W), straight from the
/// torus grid. bit(r, c) = (index >> (r*k + c)) & 1.
inline double log2_unnorm(const Model& m, int k, std::uint64_t index) {
  auto bit = [&](int r, int c) { return static_cast<int>((index >> (((r + k) % k) * k + (c + k) % k)) & 1u); };
  const double lw = std::log2(W(m));
  double total = 0.0;
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c)
      total += std::log2(site_weight(m, bit(r, c), bit(r - 1, c), bit(r, c + 1), bit(r + 1, c), bit(r, c - 1))) - lw;
  return total;
}

inline std::vector<double> distribution(const Model& m, int k) {
  const std::uint64_t count = 1ull << (k * k);
  std::vector<double> logs(count);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < count; ++i) peak = std::max(peak, logs[i] = log2_unnorm(m, k, i));
  double z = 0.0;
  for (auto& v : logs) z += (v = std::exp2(v - peak));
  for (auto& v : logs) v /= z;
  return logs;
}

inline double h2(double x) { return x <= 0.0 || x >= 1.0 ? 0.0 : -x * std::log2(x) - (1 - x) * std::log2(1 - x); }

inline double binary_kl(double x, double y) {
  double d = 0.0;
  if (x > 0) d += x * std::log2(x / y);
  if (x < 1) d += (1 - x) * std::log2((1 - x) / (1 - y));
  return d;
}

/// Range-0 bound with identity sensing over a binary channel W2 (rows = input).
/// The relaxed problem reduces to two flip probabilities: a = P(guess 1 | truth 0)
/// and b = P(guess 0 | truth 1); the best joint type spreads each flip in
/// proportion to φ* inside the target center class.
class RangeZeroBound {
 public:
  RangeZeroBound(const Model& m, std::array<std::array<double, 2>, 2> channel)
      : W_(channel) {
    const auto phi = phi_star(m);
    for (int t = 0; t < 32; ++t) {
      (t & 1 ? g1_ : g0_) += phi[t];
      if (phi[t] > 0) h_star_ -= phi[t] * std::log2(phi[t]);
    }
  }

  double g0() const { return g0_; }
  double h_star() const { return h_star_; }

  double numerator(double a, double b) const {
    const double lam[2][2] = {{g0_ * (1 - a), g0_ * a}, {g1_ * b, g1_ * (1 - b)}};
    const double g[2] = {g0_, g1_};
    double n = 0.0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        const double p = g[x] * W_[x][y];
        if (p <= 0) continue;
        const double q = lam[x][0] * W_[0][y] + lam[x][1] * W_[1][y];
        n += p * std::log2(p / q);
      }
    return n;
  }

  double denom(double a, double b) const {
    return h_star_ - g0_ * binary_kl(a, g1_) - g1_ * binary_kl(b, g0_);
  }

  double ratio(double a, double b) const {
    const double d = denom(a, b);
    return d > 0 ? numerator(a, b) / d : std::numeric_limits<double>::infinity();
  }

  /// Minimum of the ratio on the line g0·a + g1·b = D (grid plus golden section).
  double on_boundary(double D, int grid = 20001) const {
    const double lo = std::max(0.0, (D - g1_) / g0_);
    const double hi = std::min(1.0, D / g0_);
    auto at = [&](double a) { return ratio(a, std::clamp((D - g0_ * a) / g1_, 0.0, 1.0)); };
    int best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
      const double v = at(lo + (hi - lo) * i / (grid - 1));
      if (v < best_v) best_v = v, best = i;
    }
    double x0 = lo + (hi - lo) * std::max(0, best - 1) / (grid - 1);
    double x1 = lo + (hi - lo) * std::min(grid - 1, best + 1) / (grid - 1);
    const double phi = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
      const double c = x1 - phi * (x1 - x0), d = x0 + phi * (x1 - x0);
      if (at(c) < at(d)) x1 = d;
      else x0 = c;
    }
    return std::min(best_v, at(0.5 * (x0 + x1)));
  }

  /// Minimum over the full region g0·a + g1·b ≥ D on an n×n grid.
  double on_region(double D, int n = 801) const {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double a = static_cast<double>(i) / (n - 1), b = static_cast<double>(j) / (n - 1);
        if (g0_ * a + g1_ * b >= D) best = std::min(best, ratio(a, b));
      }
    return best;
  }

 private:
  std::array<std::array<double, 2>, 2> W_;
  double g0_ = 0.0, g1_ = 0.0, h_star_ = 0.0;
};

/// Wilson score interval at z = 1.96 (two-sided 95%), from the textbook formula.
inline std::array<double, 2> wilson(int failures, int trials) {
  const double z = 1.959963984540054;
  const double n = trials, p = failures / n;
  const double denom = 1 + z * z / n;
  const double center = (p + z * z / (2 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace oracle
