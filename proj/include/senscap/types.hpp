#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "senscap/counts.hpp"
#include "senscap/matrix.hpp"
#include "senscap/mrf.hpp"
#include "senscap/sensing.hpp"

namespace senscap {

/// Index space of a type: footprint patterns of a range-c sensor, or the
/// 32 quintuplets of a field type. Knows where the center bit lives.
class PatternSpace {
 public:
  static PatternSpace footprint(int c);
  static PatternSpace quintuplets();

  int size() const { return size_; }
  int center_bit(int pattern) const { return (pattern >> center_shift_) & 1; }

 private:
  PatternSpace(int size, int center_shift) : size_(size), center_shift_(center_shift) {}

  int size_;
  int center_shift_;
};

/// γ: histogram of footprint patterns over all k² positions.
CountVector sensor_type(const TargetField& field, int c);

/// λ: joint histogram of (f_i pattern, f_j pattern) over positions.
CountMatrix joint_sensor_type(const TargetField& fi, const TargetField& fj, int c);

/// μ: joint histogram of quintuplet pairs.
CountMatrix joint_field_type(const TargetField& fi, const TargetField& fj);

std::pair<CountVector, CountVector> lambda_marginals(const CountMatrix& lambda);
std::pair<std::vector<double>, std::vector<double>> lambda_marginals(const Matrix& lambda);

/// Aggregation of a joint type onto center-bit pairs.
CountMatrix center_pair(const CountMatrix& joint, const PatternSpace& space);
Matrix center_pair(const Matrix& joint, const PatternSpace& space);

/// Off-diagonal center-pair mass.
double distortion(const Matrix& center);
double distortion(const CountMatrix& center);

/// c=1 footprint pattern ↔ quintuplet re-indexing.
int footprint1_to_quintuplet(int pattern);
int quintuplet_to_footprint1(int t);

/// Marginalizes a range-c sensor type (c ≥ 1) to the field type.
CountVector gamma_to_phi(const CountVector& gamma, int c);
std::vector<double> gamma_to_phi(std::span<const double> gamma, int c);

/// Marginalizes a field type to the c=0 sensor type (center bit).
CountVector phi_to_gamma(const CountVector& phi);
std::vector<double> phi_to_gamma(std::span<const double> phi);

/// P^γ over the output alphabet of Ψ.
std::vector<double> output_dist(std::span<const double> gamma, const SensingFunction& psi);

/// λ aggregated to output-symbol pairs: Σ over patterns w,u with Ψ(w)=x, Ψ(u)=a.
Matrix output_pair_mass(const Matrix& lambda, const SensingFunction& psi);

/// P^λ(x_j | x_i). Rows whose P^{γ_i}(x_i) is zero are left undefined.
class ConditionalOutput {
 public:
  ConditionalOutput(Matrix cond, std::vector<double> row_mass);

  int size() const { return static_cast<int>(row_mass_.size()); }
  bool defined(int xi) const { return row_mass_[static_cast<std::size_t>(xi)] > 0.0; }
  /// Throws UndefinedConditional for an undefined row.
  double operator()(int xi, int xj) const;
  std::span<const double> row(int xi) const;
  const std::vector<double>& row_mass() const { return row_mass_; }

 private:
  Matrix cond_;
  std::vector<double> row_mass_;
};

ConditionalOutput cond_output_dist(const Matrix& lambda, const SensingFunction& psi);

/// P^γ_{XiY}(x, y) = P^γ(x) P_{Y|X}(y|x).
Matrix pxy(std::span<const double> gamma, const SensingFunction& psi,
           const NoiseChannel& channel);

/// Q^λ_{XiY}(x, y) = Σ_a P^γ(x) P^λ(a|x) P_{Y|X}(y|a). Throws InconsistentTypes
/// when the row marginal of λ does not reproduce γ.
Matrix qxy(std::span<const double> gamma, const Matrix& lambda, const SensingFunction& psi,
           const NoiseChannel& channel);

/// Number of k×k fields (k ≤ 4) whose field type equals phi.
std::uint64_t alpha_count(const CountVector& phi, int k);

/// Number of fields f_j whose joint sensor type with fi equals lambda (k ≤ 4).
std::uint64_t beta_count(const TargetField& fi, const CountMatrix& lambda, int c);

}  // namespace senscap
