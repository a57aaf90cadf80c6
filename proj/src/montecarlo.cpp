#include "senscap/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "parallel.hpp"
#include "seed.hpp"
#include "senscap/error.hpp"

namespace senscap {

namespace {

constexpr double kWilsonZ = 1.959963984540054;

// Cell bit positions (canonical index order) seen by each sensor, in offset order.
std::vector<std::vector<int>> sensor_cells(const SensorNetwork& network) {
  std::vector<std::vector<int>> cells;
  cells.reserve(network.placements.size());
  for (const auto& h : network.placements) {
    std::vector<int> bits;
    for (const auto& g : coverage(network.c, h, network.k)) bits.push_back(g.row * network.k + g.col);
    cells.push_back(std::move(bits));
  }
  return cells;
}

Matrix log_channel(const NoiseChannel& channel) {
  Matrix L(channel.inputs(), channel.outputs());
  for (int x = 0; x < channel.inputs(); ++x)
    for (int y = 0; y < channel.outputs(); ++y) L(x, y) = std::log2(channel(x, y));
  return L;
}

}  // namespace

void TrialConfig::validate() const {
  check_compatible(k, c, psi, channel);
  if (n < 0) fail(ErrorCode::InvalidArgument, "number of sensors must be >= 0");
  if (trials < 1) fail(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (!(D >= 0.0 && D <= 1.0)) fail(ErrorCode::InvalidArgument, "distortion must lie in [0, 1]");
  if (decoder == Decoder::ExhaustiveMap && k > kMaxEnumerationSide)
    fail(ErrorCode::EnumerationTooLarge, "exhaustive MAP needs k <= 4; use ICM");
  if (gibbs_sweeps < 1) fail(ErrorCode::InvalidArgument, "gibbs_sweeps must be >= 1");
  if (icm_sweeps < 1) fail(ErrorCode::InvalidArgument, "icm_sweeps must be >= 1");
}

ErrorEstimate wilson_estimate(int failures, int trials) {
  if (trials < 1) fail(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (failures < 0 || failures > trials) fail(ErrorCode::InvalidArgument, "failures out of range");
  const double n = trials;
  const double p = failures / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double scale = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / scale;
  const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / scale;
  ErrorEstimate e;
  e.p_e_hat = p;
  e.ci_lo = std::clamp(center - half, 0.0, p);
  e.ci_hi = std::clamp(center + half, p, 1.0);
  e.trials = trials;
  e.failures = failures;
  return e;
}

double hamming_distortion(const TargetField& fi, const TargetField& fj) {
  if (fi.k() != fj.k()) fail(ErrorCode::DimensionMismatch, "fields have different sizes");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < fi.cells(); ++i) diff += fi.bits()[i] != fj.bits()[i];
  return static_cast<double>(diff) / static_cast<double>(fi.cells());
}

bool within_distortion(double distortion, double D) {
  return D == 0.0 ? distortion == 0.0 : distortion < D;
}

double posterior_score(std::span<const int> y, const SensorNetwork& network,
                       const MRFModel& model, const TargetField& field) {
  const auto x = ideal_output(network, field);
  return log_likelihood(y, x, network.channel) + log_prob_unnorm(field, model);
}

MapDecoder::MapDecoder(const MRFModel& model, int k) : k_(k) {
  if (k < 3) fail(ErrorCode::InvalidGrid, "grid side must be >= 3");
  if (k > kMaxEnumerationSide) fail(ErrorCode::EnumerationTooLarge, "exhaustive MAP needs k <= 4");
  const auto weights = quintuplet_log_weights(model);
  const std::uint64_t count = 1ull << (k * k);
  log_prior_.resize(count);
  type_counts_.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto phi = field_type(TargetField::from_index(k, i));
    auto& tc = type_counts_[i];
    double lp = 0.0;
    for (int t = 0; t < kQuintuplets; ++t) {
      tc[t] = static_cast<int>(phi.counts[t]);
      if (tc[t] > 0) lp += tc[t] * weights[t];
    }
    log_prior_[i] = lp;
  }
}

TargetField MapDecoder::decode(std::span<const int> y, const SensorNetwork& network) const {
  if (network.k != k_) fail(ErrorCode::DimensionMismatch, "network grid differs from decoder grid");
  if (y.size() != network.placements.size())
    fail(ErrorCode::DimensionMismatch, "observation length differs from the number of sensors");
  const auto cells = sensor_cells(network);
  const Matrix L = log_channel(network.channel);
  const int nx = network.channel.inputs();
  const int ny = network.channel.outputs();
  for (int v : y)
    if (v < 0 || v >= ny) fail(ErrorCode::DimensionMismatch, "observation symbol outside channel output");

  std::vector<int> pair_counts(static_cast<std::size_t>(nx * ny));
  std::uint64_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  bool have = false;
  for (std::uint64_t i = 0; i < log_prior_.size(); ++i) {
    std::fill(pair_counts.begin(), pair_counts.end(), 0);
    for (std::size_t s = 0; s < cells.size(); ++s) {
      int pattern = 0;
      for (int bit : cells[s]) pattern = (pattern << 1) | static_cast<int>((i >> bit) & 1u);
      ++pair_counts[static_cast<std::size_t>(network.psi.symbol(pattern) * ny + y[s])];
    }
    double score = log_prior_[i];
    for (int x = 0; x < nx; ++x)
      for (int v = 0; v < ny; ++v) {
        const int cnt = pair_counts[static_cast<std::size_t>(x * ny + v)];
        if (cnt > 0) score += cnt * L(x, v);
      }
    // Scores equal up to rounding count as ties, which go to the lower index.
    const double margin = std::isfinite(best_score) ? 1e-9 * (1.0 + std::abs(best_score)) : 0.0;
    if (!have || score > best_score + margin) {
      best = i;
      best_score = score;
      have = true;
    }
  }
  return TargetField::from_index(k_, best);
}

TargetField map_decode(std::span<const int> y, const SensorNetwork& network,
                       const MRFModel& model) {
  return MapDecoder(model, network.k).decode(y, network);
}

TargetField icm_decode(std::span<const int> y, const SensorNetwork& network,
                       const MRFModel& model, int sweeps, std::uint64_t seed,
                       const std::optional<TargetField>& start) {
  if (sweeps < 1) fail(ErrorCode::InvalidArgument, "sweeps must be >= 1");
  const int k = network.k;
  std::vector<TargetField> starts;
  if (start) {
    if (start->k() != k) fail(ErrorCode::DimensionMismatch, "start field has the wrong size");
    starts.push_back(*start);
  } else {
    starts.push_back(TargetField::filled(k, 0));
    starts.push_back(TargetField::filled(k, 1));
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(k * k));
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
    starts.emplace_back(k, std::move(bits));
  }

  std::optional<TargetField> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (auto field : starts) {
    double score = posterior_score(y, network, model, field);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      bool changed = false;
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) {
          field.flip({r, c});
          const double flipped = posterior_score(y, network, model, field);
          if (flipped > score) {
            score = flipped;
            changed = true;
          } else {
            field.flip({r, c});
          }
        }
      if (!changed) break;
    }
    if (!best || score > best_score) {
      best = field;
      best_score = score;
    }
  }
  return *best;
}

Simulator::Simulator(TrialConfig config) : config_(std::move(config)) {
  config_.validate();
  if (config_.k <= kMaxEnumerationSide) {
    cdf_ = exact_distribution(config_.model, config_.k);
    double acc = 0.0;
    for (auto& v : cdf_) v = (acc += v);
  }
  if (config_.decoder == Decoder::ExhaustiveMap) map_.emplace(config_.model, config_.k);
  if (config_.fixed_network)
    fixed_ = generate_network(config_.k, config_.n, config_.c, config_.psi, config_.channel,
                              derive_seed(config_.seed, std::numeric_limits<std::uint64_t>::max()));
}

TargetField Simulator::sample_field(std::uint64_t seed) const {
  if (cdf_.empty()) return gibbs_sample(config_.model, config_.k, config_.gibbs_sweeps, seed);
  std::mt19937_64 rng(seed);
  const double u = std::uniform_real_distribution<double>(0.0, cdf_.back())(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto index = static_cast<std::uint64_t>(
      std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
  return TargetField::from_index(config_.k, index);
}

TrialOutcome Simulator::run(int trial_index) const {
  if (trial_index < 0) fail(ErrorCode::InvalidArgument, "trial index must be >= 0");
  const std::uint64_t s = derive_seed(config_.seed, static_cast<std::uint64_t>(trial_index));
  TrialOutcome out{.truth = sample_field(detail::mix_seed(s, 0)),
                   .estimate = TargetField(config_.k)};
  const SensorNetwork network =
      fixed_ ? *fixed_
             : generate_network(config_.k, config_.n, config_.c, config_.psi, config_.channel,
                                detail::mix_seed(s, 1));
  const auto x = ideal_output(network, out.truth);
  const auto y = noisy_output(x, config_.channel, detail::mix_seed(s, 2));
  out.estimate = map_ ? map_->decode(y, network)
                      : icm_decode(y, network, config_.model, config_.icm_sweeps,
                                   detail::mix_seed(s, 3));
  out.distortion = hamming_distortion(out.truth, out.estimate);
  out.success = within_distortion(out.distortion, config_.D);
  return out;
}

ErrorEstimate Simulator::estimate() const {
  std::vector<char> failed(static_cast<std::size_t>(config_.trials), 0);
  detail::parallel_for(failed.size(), [&](std::size_t i) {
    failed[i] = run(static_cast<int>(i)).success ? 0 : 1;
  });
  const auto failures = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
  return wilson_estimate(failures, config_.trials);
}

bool run_trial(const TrialConfig& config, int trial_index) {
  return Simulator(config).run(trial_index).success;
}

ErrorEstimate estimate_pe(const TrialConfig& config) { return Simulator(config).estimate(); }

std::vector<RateRow> rate_sweep(const TrialConfig& config, std::span<const int> n_list) {
  std::vector<RateRow> rows;
  for (int n : n_list) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "each n in the sweep must be >= 1");
    TrialConfig cfg = config;
    cfg.n = n;
    rows.push_back({n, static_cast<double>(config.k) * config.k / n, estimate_pe(cfg)});
  }
  return rows;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return detail::mix_seed(seed, index);
}

}  // namespace senscap
