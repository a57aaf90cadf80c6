#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "senscap/matrix.hpp"
#include "senscap/mrf.hpp"
#include "senscap/sensing.hpp"

namespace senscap {

// Capacity lower bounds for ranges c = 0 and c = 1.
//
// Both bounds minimize D(P^γ_{XiY} || Q^λ_{XiY}) / DENOM over joint types whose
// f_i side is the typical field type φ*. The decision variable is the joint
// quintuplet type μ = diag(φ*)·K with K row-stochastic (32×32); for c = 1 the
// footprint patterns are quintuplets, so λ is μ re-indexed, and for c = 0 λ is
// the center-bit aggregation of μ. Range c ≥ 2 is not supported here.

struct OptimizerOptions {
  double theta_tol = 1e-9;
  double inner_tol = 1e-7;
  double eps_dist = 0.0;
  int restarts = 16;
  int max_iters = 20000;
  int max_outer = 60;
  std::uint64_t seed = 0x5eed;

  void validate() const;
};

struct CapacityQuery {
  MRFModel model;
  int c = 0;
  SensingFunction psi;
  NoiseChannel channel;
  double D = 0.0;
  OptimizerOptions options{};
};

struct CapacityResult {
  /// False when no feasible point has positive DENOM; value is then +inf.
  bool constrained = true;
  double value = std::numeric_limits<double>::infinity();
  /// Witness: joint field type μ (32×32) and the joint sensor type λ it induces.
  Matrix mu;
  Matrix lambda;
  std::vector<double> gamma_i;
  std::vector<double> phi_j;
  double witness_distortion = 0.0;
  double numerator = 0.0;
  double denom = 0.0;
  /// Final Dinkelbach subproblem value min[kl − θ·DENOM] at θ = value.
  double certificate = 0.0;
  /// Frank-Wolfe duality gap of that final subproblem.
  double certificate_gap = 0.0;
  int iterations = 0;
};

/// φ*(t) = P_F(t5) Π_r P_{F|F'}(t5|t_r) / W.
std::array<double, kQuintuplets> typical_field_type(const MRFModel& model);

/// 2^{k²(−D(φ || φ*) − H(φ))}.
double field_type_prob_bound(std::span<const double> phi, const MRFModel& model, int k);

struct FieldBoundReport {
  std::uint64_t fields = 0;
  std::uint64_t violations = 0;
  /// max over fields of log2 P_F(f) − log2 bound (positive means violated).
  double worst_log2_excess = -std::numeric_limits<double>::infinity();
};

/// Compares the field-type bound with exact normalized field probabilities
/// for every field at k ≤ 4. Violations are reported, not thrown.
FieldBoundReport check_field_type_bound(const MRFModel& model, int k);

/// DENOM of the c = 1 bound via the cross-entropy form:
/// H(λ) − H(γ_i) + H(φ*) + Σ_t φ_j(t) log2 φ*(t).
double denom_t1(const Matrix& lambda, std::span<const double> gamma_i,
                std::span<const double> phi_star, std::span<const double> phi_j);
/// Same quantity written as H(λ) − H(γ_i) + H(φ*) − D(φ_j||φ*) − H(φ_j).
double denom_t1_direct(const Matrix& lambda, std::span<const double> gamma_i,
                       std::span<const double> phi_star, std::span<const double> phi_j);

/// DENOM of the c = 0 bound: H(μ) + Σ_t φ_j(t) log2 φ*(t), φ_j the column marginal of μ.
double denom_t2(const Matrix& mu, std::span<const double> phi_star);
double denom_t2_direct(const Matrix& mu, std::span<const double> phi_star);

/// Gallager-style exponent E(ρ, λ) in bits for a sensor-level joint type λ
/// with row marginal γ_i.
double exponent_E(double rho, const Matrix& lambda, std::span<const double> gamma_i,
                  const SensingFunction& psi, const NoiseChannel& channel);

/// The same expression without the ρ = 0 shortcut, for ρ ∈ (−1, 1], so that
/// derivatives at 0 can be taken by central differences.
double exponent_E_extended(double rho, const Matrix& lambda, std::span<const double> gamma_i,
                           const SensingFunction& psi, const NoiseChannel& channel);

/// 101 uniform points on [0, 1].
std::vector<double> default_rho_grid();

struct ExponentResult {
  double value = 0.0;
  double rho = 0.0;
  Matrix mu;
};

/// E_r(R, D): min over the relaxed joint types with distortion ≥ D of the max
/// over rho_grid of E(ρ, λ) − ρR·bracket(ρ). The outer minimum is searched by
/// subgradient mirror descent from several starts, so the value is an upper
/// estimate of the true minimum.
ExponentResult exponent_Er(double R, const CapacityQuery& query,
                           std::span<const double> rho_grid);

CapacityResult clb_c0(const CapacityQuery& query);
CapacityResult clb_c1(const CapacityQuery& query);
/// Dispatches on query.c.
CapacityResult capacity_lower_bound(const CapacityQuery& query);

/// Independent random search over the same relaxed polytope: random feasible
/// points followed by pairwise mass-transfer descent. Returns the smallest
/// ratio found (+inf if none had positive DENOM).
double oracle_local_search(const CapacityQuery& query, int samples, std::uint64_t seed);

}  // namespace senscap
