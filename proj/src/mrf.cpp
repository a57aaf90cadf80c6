#include "senscap/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "senscap/error.hpp"

namespace senscap {

namespace {

int wrap(int v, int k) { return ((v % k) + k) % k; }

void check_side(int k) {
  if (k < 3) fail(ErrorCode::InvalidGrid, "grid side must be >= 3, got " + std::to_string(k));
}

void check_enumerable(int k) {
  check_side(k);
  if (k > kMaxEnumerationSide)
    fail(ErrorCode::EnumerationTooLarge,
         "exhaustive enumeration needs k <= 4, got " + std::to_string(k));
}

bool is_distribution(double a, double b) {
  return a >= 0.0 && b >= 0.0 && std::abs(a + b - 1.0) <= 1e-12;
}

double log_sum_exp2(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp2(x - m);
  return m + std::log2(s);
}

}  // namespace

TargetField::TargetField(int k) : k_(k) {
  check_side(k);
  bits_.assign(static_cast<std::size_t>(k) * k, 0);
}

TargetField::TargetField(int k, std::vector<std::uint8_t> bits) : k_(k), bits_(std::move(bits)) {
  check_side(k);
  if (bits_.size() != static_cast<std::size_t>(k) * k)
    fail(ErrorCode::DimensionMismatch, "field needs exactly k*k bits");
  for (auto b : bits_)
    if (b > 1) fail(ErrorCode::InvalidArgument, "field bits must be 0 or 1");
}

TargetField TargetField::from_index(int k, std::uint64_t index) {
  TargetField f(k);
  if (f.cells() > 64) fail(ErrorCode::EnumerationTooLarge, "field index needs k <= 8");
  for (std::size_t i = 0; i < f.cells(); ++i) f.bits_[i] = (index >> i) & 1u;
  return f;
}

TargetField TargetField::filled(int k, std::uint8_t value) {
  TargetField f(k);
  std::fill(f.bits_.begin(), f.bits_.end(), value ? 1 : 0);
  return f;
}

TargetField TargetField::checkerboard(int k) {
  TargetField f(k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) f.bits_[f.offset(r, c)] = (r + c) & 1;
  return f;
}

std::size_t TargetField::offset(int row, int col) const {
  return static_cast<std::size_t>(wrap(row, k_)) * k_ + wrap(col, k_);
}

std::uint8_t TargetField::at(int row, int col) const { return bits_[offset(row, col)]; }

void TargetField::set(GridIndex h, std::uint8_t value) { bits_[offset(h.row, h.col)] = value ? 1 : 0; }

void TargetField::flip(GridIndex h) { bits_[offset(h.row, h.col)] ^= 1u; }

std::uint64_t TargetField::index() const {
  if (cells() > 64) fail(ErrorCode::EnumerationTooLarge, "field index needs k <= 8");
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < cells(); ++i) idx |= static_cast<std::uint64_t>(bits_[i]) << i;
  return idx;
}

TargetField TargetField::shifted(int dr, int dc) const {
  TargetField out(k_);
  for (int r = 0; r < k_; ++r)
    for (int c = 0; c < k_; ++c) out.bits_[out.offset(r + dr, c + dc)] = at(r, c);
  return out;
}

TargetField TargetField::complement() const {
  TargetField out(*this);
  for (auto& b : out.bits_) b ^= 1u;
  return out;
}

MRFModel::MRFModel(std::array<double, 2> p_node, std::array<std::array<double, 2>, 2> p_edge)
    : p_node_(p_node), p_edge_(p_edge) {
  if (!is_distribution(p_node[0], p_node[1]))
    fail(ErrorCode::InvalidModel, "p_node must be a probability vector");
  for (int b = 0; b < 2; ++b)
    if (!is_distribution(p_edge[0][b], p_edge[1][b]))
      fail(ErrorCode::InvalidModel, "each conditional P(.|b) of p_edge must sum to 1");
}

MRFModel MRFModel::symmetric_family(double p) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidModel, "p must lie in [0,1]");
  return MRFModel({p, 1.0 - p}, {{{p, 1.0 - p}, {1.0 - p, p}}});
}

bool MRFModel::strictly_positive() const {
  return p_node_[0] > 0 && p_node_[1] > 0 && p_edge_[0][0] > 0 && p_edge_[0][1] > 0 &&
         p_edge_[1][0] > 0 && p_edge_[1][1] > 0;
}

std::array<GridIndex, 4> neighbors(GridIndex h, int k) {
  check_side(k);
  return {GridIndex{wrap(h.row - 1, k), wrap(h.col, k)}, GridIndex{wrap(h.row, k), wrap(h.col + 1, k)},
          GridIndex{wrap(h.row + 1, k), wrap(h.col, k)}, GridIndex{wrap(h.row, k), wrap(h.col - 1, k)}};
}

int quintuplet(const TargetField& field, GridIndex h) {
  const int r = h.row, c = h.col;
  return (field.at(r - 1, c) << 4) | (field.at(r, c + 1) << 3) | (field.at(r + 1, c) << 2) |
         (field.at(r, c - 1) << 1) | field.at(r, c);
}

CountVector field_type(const TargetField& field) {
  CountVector phi(kQuintuplets, field.cells());
  for (int r = 0; r < field.k(); ++r)
    for (int c = 0; c < field.k(); ++c) ++phi.counts[quintuplet(field, {r, c})];
  return phi;
}

double compute_W(const MRFModel& model) {
  double w = 0.0;
  for (int t = 0; t < kQuintuplets; ++t) {
    const int a = quintuplet_center(t);
    double term = model.p_node()[a];
    for (int r = 0; r < 4; ++r) term *= model.p_edge()[a][quintuplet_neighbor(t, r)];
    w += term;
  }
  return w;
}

std::array<double, kQuintuplets> quintuplet_log_weights(const MRFModel& model) {
  const double log_w = std::log2(compute_W(model));
  std::array<double, kQuintuplets> out{};
  for (int t = 0; t < kQuintuplets; ++t) {
    const int a = quintuplet_center(t);
    double v = std::log2(model.p_node()[a]) - log_w;
    for (int r = 0; r < 4; ++r) v += std::log2(model.p_edge()[a][quintuplet_neighbor(t, r)]);
    out[t] = v;
  }
  return out;
}

double log_prob_unnorm(const TargetField& field, const MRFModel& model) {
  const double log_w = std::log2(compute_W(model));
  const int k = field.k();
  double lp = 0.0;
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      const int a = field.at(r, c);
      lp += std::log2(model.p_node()[a]) - log_w;
      for (const auto& v : neighbors({r, c}, k)) lp += std::log2(model.p_edge()[a][field.at(v)]);
    }
  }
  return lp;
}

double log_prob_unnorm_typeform(const TargetField& field, const MRFModel& model) {
  const auto weights = quintuplet_log_weights(model);
  const auto phi = field_type(field);
  double lp = 0.0;
  for (int t = 0; t < kQuintuplets; ++t)
    if (phi.counts[t] > 0) lp += static_cast<double>(phi.counts[t]) * weights[t];
  return lp;
}

namespace {

std::vector<double> all_log_scores(const MRFModel& model, int k) {
  check_enumerable(k);
  const auto weights = quintuplet_log_weights(model);
  const std::uint64_t count = 1ull << (k * k);
  std::vector<double> scores(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto phi = field_type(TargetField::from_index(k, i));
    double lp = 0.0;
    for (int t = 0; t < kQuintuplets; ++t)
      if (phi.counts[t] > 0) lp += static_cast<double>(phi.counts[t]) * weights[t];
    scores[i] = lp;
  }
  return scores;
}

}  // namespace

double log2_partition_Z(const MRFModel& model, int k) {
  return log_sum_exp2(all_log_scores(model, k));
}

double partition_Z(const MRFModel& model, int k) { return std::exp2(log2_partition_Z(model, k)); }

std::vector<double> exact_distribution(const MRFModel& model, int k) {
  auto scores = all_log_scores(model, k);
  const double log_z = log_sum_exp2(scores);
  for (auto& s : scores) s = std::exp2(s - log_z);
  return scores;
}

namespace {

struct MeanFieldMode {
  double m = 0.5;  // P(cell = 1)
  double bound = 0.0;  // per-site variational lower bound on ln Z
};

double safe_log(double v) { return std::log(std::max(v, 1e-300)); }

// Fixed points of the naive mean-field equations reached from both extremes
// and from the node marginal, each with its per-site variational bound.
std::vector<MeanFieldMode> mean_field_modes(const MRFModel& model) {
  const auto& pn = model.p_node();
  const auto& pe = model.p_edge();
  std::vector<MeanFieldMode> modes;
  for (double m : {1e-9, pn[1], 1.0 - 1e-9}) {
    for (int it = 0; it < 10000; ++it) {
      const double q[2] = {1.0 - m, m};
      double lw[2];
      for (int a = 0; a < 2; ++a) {
        lw[a] = safe_log(pn[a]);
        for (int b = 0; b < 2; ++b) lw[a] += 4.0 * q[b] * (safe_log(pe[a][b]) + safe_log(pe[b][a]));
      }
      const double next = 1.0 / (1.0 + std::exp(std::clamp(lw[0] - lw[1], -700.0, 700.0)));
      const double step = 0.5 * (next - m);
      m += step;
      if (std::abs(step) < 1e-14) break;
    }
    const double q[2] = {1.0 - m, m};
    double bound = 0.0;
    for (int a = 0; a < 2; ++a) {
      if (q[a] <= 0.0) continue;
      bound += q[a] * (safe_log(pn[a]) - std::log(q[a]));
      for (int b = 0; b < 2; ++b) bound += 4.0 * q[a] * q[b] * safe_log(pe[a][b]);
    }
    const bool seen = std::any_of(modes.begin(), modes.end(),
                                  [&](const MeanFieldMode& o) { return std::abs(o.m - m) < 1e-6; });
    if (!seen) modes.push_back({m, bound});
  }
  return modes;
}

}  // namespace

TargetField gibbs_sample(const MRFModel& model, int k, int burn_in_sweeps, std::uint64_t seed,
                         ScanOrder order) {
  check_side(k);
  if (burn_in_sweeps < 1) fail(ErrorCode::InvalidArgument, "burn_in_sweeps must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> cell(0, k - 1);

  // Start from a product field drawn from one mean-field mode, picked with
  // weight exp(k² · bound). A uniform start leaves chains stuck in minor modes.
  const auto modes = mean_field_modes(model);
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& mode : modes) top = std::max(top, mode.bound);
  std::vector<double> weight;
  for (const auto& mode : modes) weight.push_back(std::exp(static_cast<double>(k * k) * (mode.bound - top)));
  std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
  const double m = modes[pick(rng)].m;

  TargetField field(k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) field.set({r, c}, unif(rng) < m ? 1 : 0);

  const auto& pn = model.p_node();
  const auto& pe = model.p_edge();
  auto update = [&](GridIndex h) {
    double w[2];
    for (int a = 0; a < 2; ++a) {
      w[a] = pn[a];
      for (const auto& v : neighbors(h, k)) {
        const int b = field.at(v);
        w[a] *= pe[a][b] * pe[b][a];
      }
    }
    field.set(h, unif(rng) * (w[0] + w[1]) < w[0] ? 0 : 1);
  };

  for (int s = 0; s < burn_in_sweeps; ++s) {
    if (order == ScanOrder::Raster) {
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) update({r, c});
    } else {
      for (int i = 0; i < k * k; ++i) update({cell(rng), cell(rng)});
    }
  }
  return field;
}

}  // namespace senscap
