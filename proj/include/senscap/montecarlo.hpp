#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "senscap/mrf.hpp"
#include "senscap/sensing.hpp"

namespace senscap {

enum class Decoder { ExhaustiveMap, Icm };

struct TrialConfig {
  MRFModel model;
  int k = 3;
  int n = 0;
  int c = 0;
  SensingFunction psi;
  NoiseChannel channel;
  double D = 0.0;
  int trials = 1;
  std::uint64_t seed = 1;
  Decoder decoder = Decoder::ExhaustiveMap;
  /// Reuse one network (drawn from seed) for every trial instead of a fresh one.
  bool fixed_network = false;
  int gibbs_sweeps = 100;
  int icm_sweeps = 20;

  void validate() const;
};

struct ErrorEstimate {
  double p_e_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int trials = 0;
  int failures = 0;
};

/// 95% Wilson score interval.
ErrorEstimate wilson_estimate(int failures, int trials);

double hamming_distortion(const TargetField& fi, const TargetField& fj);

/// Decoding succeeds when the distortion is < D; D = 0 demands exact recovery.
bool within_distortion(double distortion, double D);

/// log2 P_{Y|X}(y | x(f)) + log2 P_F(f) without 1/Z.
double posterior_score(std::span<const int> y, const SensorNetwork& network,
                       const MRFModel& model, const TargetField& field);

/// Exhaustive MAP decoder for k ≤ 4. Holds the prior of every field; ties go
/// to the lowest canonical field index.
class MapDecoder {
 public:
  MapDecoder(const MRFModel& model, int k);

  TargetField decode(std::span<const int> y, const SensorNetwork& network) const;
  int k() const { return k_; }

 private:
  int k_;
  std::vector<double> log_prior_;
  std::vector<std::array<int, kQuintuplets>> type_counts_;
};

TargetField map_decode(std::span<const int> y, const SensorNetwork& network,
                       const MRFModel& model);

/// Iterated conditional modes: site-wise ascent of posterior_score. Runs from
/// the all-zero, all-one and a seeded random field (or only from `start`)
/// and keeps the best local maximum. Not a MAP decoder.
TargetField icm_decode(std::span<const int> y, const SensorNetwork& network,
                       const MRFModel& model, int sweeps, std::uint64_t seed,
                       const std::optional<TargetField>& start = std::nullopt);

/// Field, network and noise for one trial; reused by run_trial and tests.
struct TrialOutcome {
  TargetField truth;
  TargetField estimate;
  double distortion = 0.0;
  bool success = false;
};

class Simulator {
 public:
  explicit Simulator(TrialConfig config);

  TrialOutcome run(int trial_index) const;
  ErrorEstimate estimate() const;
  const TrialConfig& config() const { return config_; }

 private:
  TargetField sample_field(std::uint64_t seed) const;

  TrialConfig config_;
  std::vector<double> cdf_;
  std::optional<MapDecoder> map_;
  std::optional<SensorNetwork> fixed_;
};

bool run_trial(const TrialConfig& config, int trial_index);
ErrorEstimate estimate_pe(const TrialConfig& config);

struct RateRow {
  int n = 0;
  double R = 0.0;
  ErrorEstimate estimate;
};

std::vector<RateRow> rate_sweep(const TrialConfig& config, std::span<const int> n_list);

/// Per-trial seed derivation (splitmix64 of seed and index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace senscap
