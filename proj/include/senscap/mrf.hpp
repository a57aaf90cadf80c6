#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "senscap/counts.hpp"

namespace senscap {

/// Cell on the k×k torus.
struct GridIndex {
  int row = 0;
  int col = 0;

  bool operator==(const GridIndex&) const = default;
};

/// Binary field on a k×k torus, k ≥ 3. Cell (r, c) is bit r·k + c of the
/// canonical field index.
class TargetField {
 public:
  explicit TargetField(int k);
  TargetField(int k, std::vector<std::uint8_t> bits);

  static TargetField from_index(int k, std::uint64_t index);
  static TargetField filled(int k, std::uint8_t value);
  static TargetField checkerboard(int k);

  int k() const { return k_; }
  std::size_t cells() const { return bits_.size(); }

  /// Wraps (row, col) onto the torus.
  std::uint8_t at(int row, int col) const;
  std::uint8_t at(GridIndex h) const { return at(h.row, h.col); }
  void set(GridIndex h, std::uint8_t value);
  void flip(GridIndex h);

  const std::vector<std::uint8_t>& bits() const { return bits_; }

  /// Canonical index; only meaningful for k ≤ 8.
  std::uint64_t index() const;

  TargetField shifted(int dr, int dc) const;
  TargetField complement() const;

  bool operator==(const TargetField&) const = default;

 private:
  std::size_t offset(int row, int col) const;

  int k_;
  std::vector<std::uint8_t> bits_;
};

inline constexpr int kQuintuplets = 32;
inline constexpr int kMaxEnumerationSide = 4;

/// Pairwise MRF parameters. p_edge[a][b] = P_{F|F'}(a | b), so each column
/// sums to one.
class MRFModel {
 public:
  MRFModel(std::array<double, 2> p_node, std::array<std::array<double, 2>, 2> p_edge);

  /// P_F = [p, 1-p], P_{F|F'} = [p 1-p; 1-p p].
  static MRFModel symmetric_family(double p);

  const std::array<double, 2>& p_node() const { return p_node_; }
  const std::array<std::array<double, 2>, 2>& p_edge() const { return p_edge_; }

  /// True when every entry is > 0. Zeros are accepted at construction so the
  /// degenerate limits can be represented; scoring and bounds need positivity.
  bool strictly_positive() const;

 private:
  std::array<double, 2> p_node_;
  std::array<std::array<double, 2>, 2> p_edge_;
};

/// Neighbours in (N, E, S, W) order.
std::array<GridIndex, 4> neighbors(GridIndex h, int k);

/// Quintuplet pattern index N·16 + E·8 + S·4 + W·2 + center.
int quintuplet(const TargetField& field, GridIndex h);
inline int quintuplet_center(int t) { return t & 1; }
/// Neighbour bit r ∈ {0:N, 1:E, 2:S, 3:W} of quintuplet t.
inline int quintuplet_neighbor(int t, int r) { return (t >> (4 - r)) & 1; }

/// Field type φ as exact counts over the 32 quintuplets (normalizer k²).
CountVector field_type(const TargetField& field);

double compute_W(const MRFModel& model);

/// log2 of P_F(t5)·Π_r P_{F|F'}(t5|t_r) / W for each quintuplet t.
std::array<double, kQuintuplets> quintuplet_log_weights(const MRFModel& model);

/// log2 of the unnormalized Gibbs probability (product over sites, no 1/Z).
double log_prob_unnorm(const TargetField& field, const MRFModel& model);

/// Same quantity through the field type: k² Σ_t φ_t log2 weight_t.
double log_prob_unnorm_typeform(const TargetField& field, const MRFModel& model);

/// log2 Z for k ≤ 4 by exhaustive summation.
double log2_partition_Z(const MRFModel& model, int k);
double partition_Z(const MRFModel& model, int k);

/// Probabilities of all 2^{k²} fields indexed by canonical field index.
std::vector<double> exact_distribution(const MRFModel& model, int k);

enum class ScanOrder { Raster, Random };

/// Single-site Gibbs sampler. The start field is drawn i.i.d. from a mean-field
/// fixed point, chosen among the fixed points by their variational weight.
TargetField gibbs_sample(const MRFModel& model, int k, int burn_in_sweeps,
                         std::uint64_t seed, ScanOrder order = ScanOrder::Raster);

}  // namespace senscap
