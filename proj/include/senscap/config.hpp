#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "senscap/capacity.hpp"
#include "senscap/mrf.hpp"
#include "senscap/sensing.hpp"

namespace senscap {

/// One JSON run document. Keys:
///   model.p | model.p_node + model.p_edge, c, psi.kind, psi.weights, psi.table,
///   channel.kind, channel.q | channel.matrix, D, k, n, trials, seed,
///   optimizer.{theta_tol, inner_tol, eps_dist, restarts}
/// Unknown keys are rejected.
struct RunConfig {
  MRFModel model;
  int c = 0;
  SensingFunction psi;
  NoiseChannel channel;
  std::vector<double> D;
  int k = 3;
  std::vector<int> n;
  int trials = 1000;
  std::uint64_t seed = 1;
  OptimizerOptions optimizer{};
};

/// Throws Error(Config) with a message naming the offending key.
RunConfig parse_run_config(std::string_view json_text);

/// Header plus rows, already formatted.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

/// 12 significant digits, '.' decimal separator.
std::string format_number(double value);

/// Columns: D, c_lb, certificate, iterations, witness_distortion.
CsvTable run_bound(const RunConfig& config);

/// Columns: n, R, p_e_hat, ci_lo, ci_hi, trials.
CsvTable run_simulate(const RunConfig& config);

}  // namespace senscap
