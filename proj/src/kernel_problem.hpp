#pragma once

// Relaxed joint-type program shared by both capacity bounds.
//
// The variable is a row-stochastic 32×32 kernel K over quintuplets, and the
// joint field type is μ(t,u) = φ*(t) K(t,u). Every quantity the bounds need
// is a function of K:
//   - numerator  D(P^γ_{XiY} || Q^λ_{XiY}), which only sees the output-symbol
//     pair mass M(x,a) = Σ_{sym(t)=x, sym(u)=a} μ(t,u);
//   - DENOM = H(φ*) − Σ_t φ*(t) D(K_t || φ*);
//   - distortion = mass of μ on pairs whose center bits differ.

#include <array>
#include <cstdint>
#include <vector>

#include "senscap/capacity.hpp"
#include "senscap/matrix.hpp"

namespace senscap::detail {

inline constexpr int kQ = kQuintuplets;

struct KernelProblem {
  std::array<double, kQ> w{};       // φ*
  std::array<double, kQ> log2_w{};
  double h_star = 0.0;              // H(φ*)
  std::array<int, kQ> sym{};        // quintuplet → output symbol
  int nx = 0;
  int ny = 0;
  Matrix channel;                   // nx × ny
  std::vector<double> px;           // P^γ
  Matrix p_joint;                   // P^γ_{XiY}
  double target = 0.0;              // distortion lower limit

  static KernelProblem build(const CapacityQuery& query);
};

inline bool opposite(int t, int u) { return ((t ^ u) & 1) != 0; }

Matrix pair_mass(const KernelProblem& pb, const Matrix& K);
/// D(P || Q) in bits where Q(x,y) = Σ_a M(x,a) W(y|a).
double numerator(const KernelProblem& pb, const Matrix& M);
/// ∂numerator/∂M(x,a).
Matrix numerator_gradient(const KernelProblem& pb, const Matrix& M);
double denom(const KernelProblem& pb, const Matrix& K);
double kernel_distortion(const KernelProblem& pb, const Matrix& K);

/// Kernel with every row equal to φ*.
Matrix independent_kernel(const KernelProblem& pb);

/// Bregman (weighted KL) projection of a row-stochastic K onto
/// {distortion ≥ target}: tilts each row's opposite-center mass by a common
/// factor. Returns false if the target cannot be met on K's support.
bool project_distortion(const KernelProblem& pb, Matrix& K);

struct SubproblemResult {
  Matrix K;
  double value = 0.0;  // numerator − θ·DENOM
  double gap = 0.0;    // Frank-Wolfe gap, an upper bound on value − optimum
  int iterations = 0;
};

/// min_K numerator(K) − θ·DENOM(K) over feasible kernels by entropic mirror
/// descent with backtracking, warm-started at K (which must be feasible).
/// Stops once the gap is below max(abs_tol, rel_tol·|value|).
SubproblemResult solve_subproblem(const KernelProblem& pb, double theta, Matrix K,
                                  int max_iters, double abs_tol, double rel_tol = 0.0);

struct DinkelbachResult {
  Matrix K;
  double theta = 0.0;
  double certificate = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

DinkelbachResult dinkelbach(const KernelProblem& pb, Matrix start, const OptimizerOptions& opts);

}  // namespace senscap::detail
