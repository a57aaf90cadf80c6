#include "kernel_problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "senscap/error.hpp"
#include "senscap/info.hpp"
#include "senscap/types.hpp"

namespace senscap::detail {

namespace {

constexpr double kTiny = 1e-300;
constexpr int kStallLimit = 25;

double objective(const KernelProblem& pb, const Matrix& K, double theta) {
  return numerator(pb, pair_mass(pb, K)) - theta * denom(pb, K);
}

// Natural (per-row, divided by φ*(t)) gradient of numerator − θ·DENOM, with
// row-constant terms dropped.
Matrix natural_gradient(const KernelProblem& pb, const Matrix& K, double theta) {
  const Matrix G = numerator_gradient(pb, pair_mass(pb, K));
  Matrix g(kQ, kQ);
  for (int t = 0; t < kQ; ++t)
    for (int u = 0; u < kQ; ++u)
      g(t, u) = G(pb.sym[t], pb.sym[u]) + theta * (std::log2(std::max(K(t, u), kTiny)) - pb.log2_w[u]);
  return g;
}

double frank_wolfe_gap(const KernelProblem& pb, const Matrix& K, const Matrix& g) {
  std::array<double, kQ> same{}, opp{}, delta{}, s{};
  double reached = 0.0;
  for (int t = 0; t < kQ; ++t) {
    same[t] = opp[t] = std::numeric_limits<double>::infinity();
    for (int u = 0; u < kQ; ++u) {
      auto& slot = opposite(t, u) ? opp[t] : same[t];
      slot = std::min(slot, g(t, u));
    }
    delta[t] = opp[t] - same[t];
    if (delta[t] < 0.0) {
      s[t] = 1.0;
      reached += pb.w[t];
    }
  }
  if (reached < pb.target) {
    std::array<int, kQ> order{};
    for (int t = 0; t < kQ; ++t) order[t] = t;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return delta[a] < delta[b]; });
    for (int t : order) {
      if (s[t] == 1.0) continue;
      const double take = std::min(1.0, (pb.target - reached) / pb.w[t]);
      s[t] = take;
      reached += take * pb.w[t];
      if (reached >= pb.target) break;
    }
  }
  double current = 0.0, vertex = 0.0;
  for (int t = 0; t < kQ; ++t) {
    double row = 0.0;
    for (int u = 0; u < kQ; ++u) row += K(t, u) * g(t, u);
    current += pb.w[t] * row;
    vertex += pb.w[t] * ((1.0 - s[t]) * same[t] + s[t] * opp[t]);
  }
  return current - vertex;
}

}  // namespace

KernelProblem KernelProblem::build(const CapacityQuery& query) {
  if (query.c != 0 && query.c != 1)
    fail(ErrorCode::InvalidArgument, "capacity bounds are implemented for c = 0 and c = 1 only");
  if (!query.model.strictly_positive())
    fail(ErrorCode::InvalidModel, "capacity bounds need a strictly positive model");
  if (query.psi.range() != query.c)
    fail(ErrorCode::InvalidSensing, "sensing function range does not match c");
  if (query.channel.inputs() != query.psi.alphabet_size())
    fail(ErrorCode::DimensionMismatch, "channel inputs do not match the sensing alphabet");
  query.options.validate();
  if (!(query.D >= 0.0)) fail(ErrorCode::InvalidArgument, "distortion must be >= 0");
  if (query.D >= 1.0) fail(ErrorCode::Infeasible, "distortion D >= 1 leaves no feasible joint type");
  if (query.D + query.options.eps_dist >= 1.0)
    fail(ErrorCode::Infeasible, "D + eps_dist >= 1 leaves no feasible joint type");

  KernelProblem pb;
  const auto phi = typical_field_type(query.model);
  for (int t = 0; t < kQ; ++t) {
    pb.w[t] = phi[t];
    pb.log2_w[t] = std::log2(phi[t]);
  }
  pb.h_star = entropy(pb.w);
  for (int t = 0; t < kQ; ++t)
    pb.sym[t] = query.c == 0 ? query.psi.symbol(quintuplet_center(t))
                             : query.psi.symbol(quintuplet_to_footprint1(t));
  pb.nx = query.psi.alphabet_size();
  pb.ny = query.channel.outputs();
  pb.channel = query.channel.matrix();
  pb.px.assign(static_cast<std::size_t>(pb.nx), 0.0);
  for (int t = 0; t < kQ; ++t) pb.px[pb.sym[t]] += pb.w[t];
  pb.p_joint = Matrix(pb.nx, pb.ny);
  for (int x = 0; x < pb.nx; ++x)
    for (int y = 0; y < pb.ny; ++y) pb.p_joint(x, y) = pb.px[x] * pb.channel(x, y);
  pb.target = query.D + query.options.eps_dist;
  return pb;
}

Matrix pair_mass(const KernelProblem& pb, const Matrix& K) {
  Matrix M(pb.nx, pb.nx);
  for (int t = 0; t < kQ; ++t)
    for (int u = 0; u < kQ; ++u) M(pb.sym[t], pb.sym[u]) += pb.w[t] * K(t, u);
  return M;
}

namespace {

Matrix predicted(const KernelProblem& pb, const Matrix& M) {
  Matrix Q(pb.nx, pb.ny);
  for (int x = 0; x < pb.nx; ++x)
    for (int a = 0; a < pb.nx; ++a) {
      const double m = M(x, a);
      if (m == 0.0) continue;
      for (int y = 0; y < pb.ny; ++y) Q(x, y) += m * pb.channel(a, y);
    }
  return Q;
}

}  // namespace

double numerator(const KernelProblem& pb, const Matrix& M) {
  const Matrix Q = predicted(pb, M);
  double n = 0.0;
  for (int x = 0; x < pb.nx; ++x)
    for (int y = 0; y < pb.ny; ++y) {
      const double p = pb.p_joint(x, y);
      if (p <= 0.0) continue;
      if (Q(x, y) <= 0.0) return std::numeric_limits<double>::infinity();
      n += p * std::log2(p / Q(x, y));
    }
  return n;
}

Matrix numerator_gradient(const KernelProblem& pb, const Matrix& M) {
  const Matrix Q = predicted(pb, M);
  Matrix G(pb.nx, pb.nx);
  for (int x = 0; x < pb.nx; ++x)
    for (int y = 0; y < pb.ny; ++y) {
      const double p = pb.p_joint(x, y);
      if (p <= 0.0) continue;
      const double ratio = p / std::max(Q(x, y), kTiny);
      for (int a = 0; a < pb.nx; ++a) G(x, a) -= ratio * pb.channel(a, y) / std::numbers::ln2;
    }
  return G;
}

double denom(const KernelProblem& pb, const Matrix& K) {
  double d = pb.h_star;
  for (int t = 0; t < kQ; ++t) {
    double row = 0.0;
    for (int u = 0; u < kQ; ++u) {
      const double k = K(t, u);
      if (k > 0.0) row += k * (std::log2(k) - pb.log2_w[u]);
    }
    d -= pb.w[t] * row;
  }
  return d;
}

double kernel_distortion(const KernelProblem& pb, const Matrix& K) {
  double d = 0.0;
  for (int t = 0; t < kQ; ++t)
    for (int u = 0; u < kQ; ++u)
      if (opposite(t, u)) d += pb.w[t] * K(t, u);
  return d;
}

Matrix independent_kernel(const KernelProblem& pb) {
  Matrix K(kQ, kQ);
  for (int t = 0; t < kQ; ++t)
    for (int u = 0; u < kQ; ++u) K(t, u) = pb.w[u];
  return K;
}

bool project_distortion(const KernelProblem& pb, Matrix& K) {
  std::array<double, kQ> a{}, b{};
  double current = 0.0, reachable = 0.0;
  for (int t = 0; t < kQ; ++t) {
    for (int u = 0; u < kQ; ++u) (opposite(t, u) ? a[t] : b[t]) += K(t, u);
    current += pb.w[t] * a[t] / (a[t] + b[t]);
    if (a[t] > 0.0) reachable += pb.w[t];
  }
  if (current >= pb.target) return true;
  if (reachable <= pb.target) return false;

  auto shares = [&](double nu, std::array<double, kQ>& s) {
    double total = 0.0;
    for (int t = 0; t < kQ; ++t) {
      s[t] = a[t] > 0.0 ? a[t] / (a[t] + b[t] * std::exp(-nu)) : 0.0;
      total += pb.w[t] * s[t];
    }
    return total;
  };
  std::array<double, kQ> s{};
  double lo = 0.0, hi = 1.0;
  while (shares(hi, s) < pb.target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e4) return false;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (shares(mid, s) < pb.target)
      lo = mid;
    else
      hi = mid;
  }
  shares(hi, s);
  for (int t = 0; t < kQ; ++t) {
    const double scale_opp = a[t] > 0.0 ? s[t] / a[t] : 0.0;
    const double scale_same = b[t] > 0.0 ? (1.0 - s[t]) / b[t] : 0.0;
    for (int u = 0; u < kQ; ++u) K(t, u) *= opposite(t, u) ? scale_opp : scale_same;
  }
  return true;
}

SubproblemResult solve_subproblem(const KernelProblem& pb, double theta, Matrix K, int max_iters,
                                  double abs_tol, double rel_tol) {
  double f = objective(pb, K, theta);
  double eta = 1.0;
  double gap = std::numeric_limits<double>::infinity();
  int stall = 0;
  int it = 0;
  Matrix next(kQ, kQ);
  for (; it < max_iters; ++it) {
    const Matrix g = natural_gradient(pb, K, theta);
    gap = frank_wolfe_gap(pb, K, g);
    if (gap <= std::max(abs_tol, rel_tol * std::abs(f)) || stall >= kStallLimit) break;

    eta = std::min(eta * 2.0, 1e8);
    bool accepted = false;
    double fn = f;
    for (int bt = 0; bt < 80; ++bt) {
      for (int t = 0; t < kQ; ++t) {
        double peak = -std::numeric_limits<double>::infinity();
        for (int u = 0; u < kQ; ++u) {
          const double k = K(t, u);
          next(t, u) = k > 0.0 ? std::log(k) - eta * std::numbers::ln2 * g(t, u)
                               : -std::numeric_limits<double>::infinity();
          peak = std::max(peak, next(t, u));
        }
        double z = 0.0;
        for (int u = 0; u < kQ; ++u) z += (next(t, u) = std::exp(next(t, u) - peak));
        for (int u = 0; u < kQ; ++u) next(t, u) /= z;
      }
      if (!project_distortion(pb, next)) {
        eta *= 0.5;
        continue;
      }
      fn = objective(pb, next, theta);
      double linear = 0.0, bregman = 0.0;
      for (int t = 0; t < kQ; ++t) {
        double lin_row = 0.0, br_row = 0.0;
        for (int u = 0; u < kQ; ++u) {
          lin_row += g(t, u) * (next(t, u) - K(t, u));
          if (next(t, u) > 0.0) br_row += next(t, u) * std::log2(next(t, u) / K(t, u));
        }
        linear += pb.w[t] * lin_row;
        bregman += pb.w[t] * br_row;
      }
      if (fn <= f + linear + bregman / eta + 1e-15 * (1.0 + std::abs(f))) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;
    stall = (f - fn <= 1e-16 * (1.0 + std::abs(f))) ? stall + 1 : 0;
    std::swap(K, next);
    f = fn;
  }
  return {std::move(K), f, gap, it};
}

DinkelbachResult dinkelbach(const KernelProblem& pb, Matrix start, const OptimizerOptions& opts) {
  DinkelbachResult out;
  out.K = std::move(start);
  const double d0 = denom(pb, out.K);
  if (!(d0 > 0.0)) fail(ErrorCode::InvalidArgument, "Dinkelbach start must have positive DENOM");
  out.theta = numerator(pb, pair_mass(pb, out.K)) / d0;
  // The gap bounds how far the reported certificate sits above the true
  // subproblem minimum.
  const double final_tol = 0.1 * opts.inner_tol;

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    auto sub = solve_subproblem(pb, out.theta, out.K, opts.max_iters, final_tol, 1e-3);
    ++out.iterations;
    out.certificate = sub.value;
    out.gap = sub.gap;
    const double d = denom(pb, sub.K);
    if (!(d > 0.0)) break;
    const double next = numerator(pb, pair_mass(pb, sub.K)) / d;
    const bool converged =
        out.theta - next <= opts.theta_tol && std::abs(sub.value) <= opts.inner_tol;
    if (next >= out.theta) break;
    out.theta = next;
    out.K = std::move(sub.K);
    if (converged) break;
  }
  // Certificate at the reported θ.
  auto final_sub = solve_subproblem(pb, out.theta, out.K, opts.max_iters, final_tol);
  ++out.iterations;
  out.certificate = final_sub.value;
  out.gap = final_sub.gap;
  const double d = denom(pb, final_sub.K);
  if (d > 0.0) {
    const double ratio = numerator(pb, pair_mass(pb, final_sub.K)) / d;
    if (ratio < out.theta) {
      out.theta = ratio;
      out.K = std::move(final_sub.K);
    }
  }
  return out;
}

}  // namespace senscap::detail
