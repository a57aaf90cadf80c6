#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "senscap/matrix.hpp"
#include "senscap/mrf.hpp"

namespace senscap {

/// Lattice offsets (dr, dc) with dr² + dc² ≤ c², in lexicographic order.
/// A footprint pattern stores the bit of offset 0 as its most significant bit.
class Coverage {
 public:
  explicit Coverage(int c);

  int range() const { return c_; }
  int size() const { return static_cast<int>(offsets_.size()); }
  int patterns() const { return 1 << size(); }
  const std::vector<std::pair<int, int>>& offsets() const { return offsets_; }

  /// Bit position (0 = MSB) of the offset (dr, dc), or -1 if outside.
  int position_of(int dr, int dc) const;
  int center_position() const { return position_of(0, 0); }
  int center_bit(int pattern) const;

  /// Footprint pattern index seen at h.
  int pattern_at(const TargetField& field, GridIndex h) const;

 private:
  int c_;
  std::vector<std::pair<int, int>> offsets_;
};

/// Cells covered by a range-c sensor at h, in offset order. Needs k ≥ 2c+1.
std::vector<GridIndex> coverage(int c, GridIndex h, int k);

/// Deterministic map from footprint patterns to an ordered output alphabet.
class SensingFunction {
 public:
  enum class Kind { Identity, Count, WeightedSum, Lookup };

  static SensingFunction identity();
  static SensingFunction count(int c);
  static SensingFunction weighted_sum(int c, std::vector<double> weights);
  /// table[pattern] is the output symbol; the alphabet is {0..max(table)}.
  static SensingFunction lookup(int c, std::vector<int> table);

  Kind kind() const { return kind_; }
  int range() const { return c_; }
  int footprint() const { return footprint_; }

  /// Output symbol index for a footprint pattern index.
  int symbol(int pattern) const { return table_[static_cast<std::size_t>(pattern)]; }
  /// Output symbol for explicit bits in offset order.
  int sense(std::span<const std::uint8_t> bits) const;

  /// Ordered output alphabet X (numeric value of each symbol).
  const std::vector<double>& alphabet() const { return alphabet_; }
  int alphabet_size() const { return static_cast<int>(alphabet_.size()); }
  const std::vector<int>& table() const { return table_; }

 private:
  SensingFunction() = default;

  Kind kind_ = Kind::Identity;
  int c_ = 0;
  int footprint_ = 1;
  std::vector<int> table_;
  std::vector<double> alphabet_;
};

/// Discrete memoryless channel P_{Y|X}(y|x); rows are inputs.
class NoiseChannel {
 public:
  explicit NoiseChannel(Matrix transition);

  /// Binary symmetric channel for two inputs; for more inputs the symbol is
  /// kept with probability 1-q and otherwise replaced by one of the other
  /// symbols uniformly, so q = (symbols-1)/symbols gives identical rows.
  static NoiseChannel symmetric(int symbols, double q);
  static NoiseChannel bsc(double q) { return symmetric(2, q); }
  static NoiseChannel noiseless(int symbols);

  int inputs() const { return static_cast<int>(matrix_.rows()); }
  int outputs() const { return static_cast<int>(matrix_.cols()); }
  double operator()(int x, int y) const { return matrix_(x, y); }
  const Matrix& matrix() const { return matrix_; }

  /// True when every row is the same distribution (output carries no
  /// information about the input).
  bool uninformative() const;

  int sample(int x, std::mt19937_64& rng) const;

 private:
  Matrix matrix_;
};

struct SensorNetwork {
  int k = 0;
  int c = 0;
  std::vector<GridIndex> placements;
  SensingFunction psi;
  NoiseChannel channel;

  int n() const { return static_cast<int>(placements.size()); }
};

/// Checks that Ψ, channel and grid fit together for range c.
void check_compatible(int k, int c, const SensingFunction& psi, const NoiseChannel& channel);

SensorNetwork generate_network(int k, int n, int c, const SensingFunction& psi,
                               const NoiseChannel& channel, std::uint64_t seed);

std::vector<int> ideal_output(const SensorNetwork& network, const TargetField& field);

std::vector<int> noisy_output(std::span<const int> x, const NoiseChannel& channel,
                              std::uint64_t seed);

/// log2 Π_ℓ P_{Y|X}(y_ℓ | x_ℓ).
double log_likelihood(std::span<const int> y, std::span<const int> x,
                      const NoiseChannel& channel);

}  // namespace senscap
