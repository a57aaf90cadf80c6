#include "senscap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "kernel_problem.hpp"
#include "parallel.hpp"
#include "seed.hpp"
#include "senscap/error.hpp"
#include "senscap/info.hpp"
#include "senscap/types.hpp"

namespace senscap {

using detail::KernelProblem;
using detail::kQ;

void OptimizerOptions::validate() const {
  if (!(theta_tol > 0.0)) fail(ErrorCode::InvalidArgument, "theta_tol must be > 0");
  if (!(inner_tol > 0.0)) fail(ErrorCode::InvalidArgument, "inner_tol must be > 0");
  if (!(eps_dist >= 0.0)) fail(ErrorCode::InvalidArgument, "eps_dist must be >= 0");
  if (restarts < 1) fail(ErrorCode::InvalidArgument, "restarts must be >= 1");
  if (max_iters < 1) fail(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  if (max_outer < 1) fail(ErrorCode::InvalidArgument, "max_outer must be >= 1");
}

std::array<double, kQuintuplets> typical_field_type(const MRFModel& model) {
  std::array<double, kQuintuplets> phi{};
  double total = 0.0;
  for (int t = 0; t < kQuintuplets; ++t) {
    const int a = quintuplet_center(t);
    double v = model.p_node()[a];
    for (int r = 0; r < 4; ++r) v *= model.p_edge()[a][quintuplet_neighbor(t, r)];
    phi[t] = v;
    total += v;
  }
  for (auto& v : phi) v /= total;
  return phi;
}

double field_type_prob_bound(std::span<const double> phi, const MRFModel& model, int k) {
  if (phi.size() != static_cast<std::size_t>(kQuintuplets))
    fail(ErrorCode::DimensionMismatch, "field type must have 32 entries");
  const auto star = typical_field_type(model);
  const double exponent = -kl(phi, star) - entropy(phi);
  return std::exp2(static_cast<double>(k) * k * exponent);
}

FieldBoundReport check_field_type_bound(const MRFModel& model, int k) {
  const auto probs = exact_distribution(model, k);
  FieldBoundReport report;
  for (std::uint64_t i = 0; i < probs.size(); ++i) {
    const auto phi = field_type(TargetField::from_index(k, i)).probabilities();
    const double bound = field_type_prob_bound(phi, model, k);
    const double excess = std::log2(probs[i]) - std::log2(bound);
    ++report.fields;
    if (excess > 1e-9) ++report.violations;
    report.worst_log2_excess = std::max(report.worst_log2_excess, excess);
  }
  return report;
}

namespace {

double cross_term(std::span<const double> phi_j, std::span<const double> phi_star) {
  if (phi_j.size() != phi_star.size())
    fail(ErrorCode::DimensionMismatch, "phi_j and phi_star sizes differ");
  return -cross_entropy(phi_j, phi_star);
}

}  // namespace

double denom_t1(const Matrix& lambda, std::span<const double> gamma_i,
                std::span<const double> phi_star, std::span<const double> phi_j) {
  return entropy(lambda.flat()) - entropy(gamma_i) + entropy(phi_star) +
         cross_term(phi_j, phi_star);
}

double denom_t1_direct(const Matrix& lambda, std::span<const double> gamma_i,
                       std::span<const double> phi_star, std::span<const double> phi_j) {
  return entropy(lambda.flat()) - entropy(gamma_i) + entropy(phi_star) -
         kl(phi_j, phi_star) - entropy(phi_j);
}

double denom_t2(const Matrix& mu, std::span<const double> phi_star) {
  const auto phi_j = mu.col_sums();
  return entropy(mu.flat()) + cross_term(phi_j, phi_star);
}

double denom_t2_direct(const Matrix& mu, std::span<const double> phi_star) {
  const auto phi_j = mu.col_sums();
  return entropy(mu.flat()) - kl(phi_j, phi_star) - entropy(phi_j);
}

// ---------------------------------------------------------------------------
// Exponent

namespace {

struct ExponentTerms {
  double value = 0.0;
  Matrix grad;  // ∂E/∂M, filled on request
};

// E(ρ) from the output-pair mass M (rows sum to px). Valid for ρ > −1.
ExponentTerms exponent_from_mass(double rho, const Matrix& M, std::span<const double> px,
                                 const Matrix& W, bool with_grad) {
  const int nx = static_cast<int>(M.rows());
  const int ny = static_cast<int>(W.cols());
  const double s = 1.0 / (1.0 + rho);
  Matrix ws(nx, ny);
  for (int a = 0; a < nx; ++a)
    for (int y = 0; y < ny; ++y) ws(a, y) = W(a, y) > 0.0 ? std::pow(W(a, y), s) : 0.0;

  Matrix T(nx, ny);
  double S = 0.0;
  for (int x = 0; x < nx; ++x) {
    if (px[x] <= 0.0) continue;
    for (int y = 0; y < ny; ++y) {
      double t = 0.0;
      for (int a = 0; a < nx; ++a) t += M(x, a) * ws(a, y);
      t /= px[x];
      T(x, y) = t;
      if (ws(x, y) > 0.0) S += px[x] * ws(x, y) * std::pow(t, rho);
    }
  }
  ExponentTerms out;
  out.value = -std::log2(S);
  if (with_grad) {
    out.grad = Matrix(nx, nx);
    const double scale = -rho / (S * std::numbers::ln2);
    for (int x = 0; x < nx; ++x) {
      if (px[x] <= 0.0) continue;
      for (int y = 0; y < ny; ++y) {
        if (ws(x, y) <= 0.0) continue;
        const double f = ws(x, y) * std::pow(std::max(T(x, y), 1e-300), rho - 1.0);
        for (int a = 0; a < nx; ++a) out.grad(x, a) += scale * f * ws(a, y);
      }
    }
  }
  return out;
}

void check_exponent_inputs(const Matrix& lambda, std::span<const double> gamma_i,
                           const SensingFunction& psi, const NoiseChannel& channel) {
  if (lambda.rows() != gamma_i.size() || lambda.cols() != gamma_i.size())
    fail(ErrorCode::DimensionMismatch, "lambda and gamma_i sizes differ");
  if (channel.inputs() != psi.alphabet_size())
    fail(ErrorCode::DimensionMismatch, "channel inputs do not match the sensing alphabet");
  const auto rows = lambda.row_sums();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (std::abs(rows[i] - gamma_i[i]) > 1e-9)
      fail(ErrorCode::InconsistentTypes, "row marginal of lambda differs from gamma_i");
}

}  // namespace

double exponent_E_extended(double rho, const Matrix& lambda, std::span<const double> gamma_i,
                           const SensingFunction& psi, const NoiseChannel& channel) {
  if (!(rho > -1.0 && rho <= 1.0)) fail(ErrorCode::InvalidArgument, "rho must lie in (-1, 1]");
  check_exponent_inputs(lambda, gamma_i, psi, channel);
  const Matrix M = output_pair_mass(lambda, psi);
  const auto px = output_dist(gamma_i, psi);
  return exponent_from_mass(rho, M, px, channel.matrix(), false).value;
}

double exponent_E(double rho, const Matrix& lambda, std::span<const double> gamma_i,
                  const SensingFunction& psi, const NoiseChannel& channel) {
  if (!(rho >= 0.0 && rho <= 1.0)) fail(ErrorCode::InvalidArgument, "rho must lie in [0, 1]");
  if (rho == 0.0) {
    check_exponent_inputs(lambda, gamma_i, psi, channel);
    return 0.0;
  }
  return exponent_E_extended(rho, lambda, gamma_i, psi, channel);
}

std::vector<double> default_rho_grid() {
  std::vector<double> grid(101);
  for (int i = 0; i <= 100; ++i) grid[i] = i / 100.0;
  return grid;
}

namespace {

Matrix random_start(const KernelProblem& pb, std::mt19937_64& rng) {
  std::gamma_distribution<double> unit(1.0);
  std::uniform_real_distribution<double> mix(0.05, 0.95);
  const double m = mix(rng);
  Matrix K(kQ, kQ);
  for (int t = 0; t < kQ; ++t) {
    double z = 0.0;
    std::array<double, kQ> d{};
    for (int u = 0; u < kQ; ++u) z += (d[u] = unit(rng) + 1e-12);
    for (int u = 0; u < kQ; ++u) K(t, u) = (1.0 - m) * pb.w[u] + m * d[u] / z;
  }
  return K;
}

// Max of E(ρ) − ρR·bracket(ρ) over the grid, with the natural gradient at the argmax.
struct ErEval {
  double value = 0.0;
  double rho = 0.0;
  Matrix grad;
};

ErEval er_objective(const KernelProblem& pb, const Matrix& K, double R,
                    std::span<const double> grid, bool with_grad) {
  const Matrix M = detail::pair_mass(pb, K);
  double ent = 0.0, cross = 0.0;
  for (int t = 0; t < kQ; ++t) {
    double h = 0.0, c = 0.0;
    for (int u = 0; u < kQ; ++u) {
      const double k = K(t, u);
      if (k > 0.0) h -= k * std::log2(k);
      c += k * pb.log2_w[u];
    }
    ent += pb.w[t] * h;
    cross += pb.w[t] * c;
  }
  ErEval best;
  best.value = -std::numeric_limits<double>::infinity();
  for (double rho : grid) {
    const double s = 1.0 / (1.0 + rho);
    const double e = rho == 0.0 ? 0.0 : exponent_from_mass(rho, M, pb.px, pb.channel, false).value;
    const double v = e - rho * R * (ent + s * (pb.h_star + cross));
    if (v > best.value) {
      best.value = v;
      best.rho = rho;
    }
  }
  if (with_grad) {
    const double rho = best.rho;
    const double s = 1.0 / (1.0 + rho);
    Matrix G(pb.nx, pb.nx);
    if (rho > 0.0) G = exponent_from_mass(rho, M, pb.px, pb.channel, true).grad;
    best.grad = Matrix(kQ, kQ);
    for (int t = 0; t < kQ; ++t)
      for (int u = 0; u < kQ; ++u)
        best.grad(t, u) = G(pb.sym[t], pb.sym[u]) -
                          rho * R * (-std::log2(std::max(K(t, u), 1e-300)) + s * pb.log2_w[u]);
  }
  return best;
}

}  // namespace

ExponentResult exponent_Er(double R, const CapacityQuery& query, std::span<const double> rho_grid) {
  if (rho_grid.empty()) fail(ErrorCode::InvalidArgument, "rho grid is empty");
  for (double rho : rho_grid)
    if (!(rho >= 0.0 && rho <= 1.0)) fail(ErrorCode::InvalidArgument, "rho grid must lie in [0, 1]");
  if (!(R >= 0.0)) fail(ErrorCode::InvalidArgument, "rate must be >= 0");
  const KernelProblem pb = KernelProblem::build(query);

  const int starts = std::min(query.options.restarts, 4);
  constexpr int kSteps = 600;
  std::vector<ExponentResult> results(static_cast<std::size_t>(starts));
  detail::parallel_for(results.size(), [&](std::size_t r) {
    std::mt19937_64 rng(detail::mix_seed(query.options.seed, r));
    Matrix K = r == 0 ? detail::independent_kernel(pb) : random_start(pb, rng);
    if (!detail::project_distortion(pb, K))
      fail(ErrorCode::Infeasible, "distortion constraint cannot be met");
    ExponentResult best{std::numeric_limits<double>::infinity(), 0.0, {}};
    Matrix next(kQ, kQ);
    for (int step = 0; step < kSteps; ++step) {
      const auto eval = er_objective(pb, K, R, rho_grid, true);
      if (eval.value < best.value) best = {eval.value, eval.rho, K};
      double spread = 0.0;
      for (double g : eval.grad.flat()) spread = std::max(spread, std::abs(g));
      const double eta = 1.0 / ((1.0 + spread) * std::sqrt(step + 1.0));
      for (int t = 0; t < kQ; ++t) {
        double peak = -std::numeric_limits<double>::infinity();
        for (int u = 0; u < kQ; ++u) {
          next(t, u) = std::log(std::max(K(t, u), 1e-300)) - eta * eval.grad(t, u);
          peak = std::max(peak, next(t, u));
        }
        double z = 0.0;
        for (int u = 0; u < kQ; ++u) z += (next(t, u) = std::exp(next(t, u) - peak));
        for (int u = 0; u < kQ; ++u) next(t, u) /= z;
      }
      if (!detail::project_distortion(pb, next)) break;
      std::swap(K, next);
    }
    const auto last = er_objective(pb, K, R, rho_grid, false);
    if (last.value < best.value) best = {last.value, last.rho, K};
    results[r] = std::move(best);
  });

  auto best = std::min_element(results.begin(), results.end(),
                               [](const auto& a, const auto& b) { return a.value < b.value; });
  ExponentResult out = std::move(*best);
  for (int t = 0; t < kQ; ++t)
    for (int u = 0; u < kQ; ++u) out.mu(t, u) *= pb.w[t];
  return out;
}

// ---------------------------------------------------------------------------
// Capacity bounds

namespace {

void fill_witness(const CapacityQuery& query, const KernelProblem& pb, const Matrix& K,
                  CapacityResult& out) {
  out.mu = Matrix(kQ, kQ);
  for (int t = 0; t < kQ; ++t)
    for (int u = 0; u < kQ; ++u) out.mu(t, u) = pb.w[t] * K(t, u);
  out.phi_j = out.mu.col_sums();
  if (query.c == 0) {
    out.lambda = center_pair(out.mu, PatternSpace::quintuplets());
    out.gamma_i = phi_to_gamma(std::span<const double>(pb.w));
  } else {
    out.lambda = Matrix(kQ, kQ);
    out.gamma_i.assign(kQ, 0.0);
    for (int t = 0; t < kQ; ++t) {
      const int pt = quintuplet_to_footprint1(t);
      out.gamma_i[pt] = pb.w[t];
      for (int u = 0; u < kQ; ++u) out.lambda(pt, quintuplet_to_footprint1(u)) = out.mu(t, u);
    }
  }
  out.witness_distortion = detail::kernel_distortion(pb, K);
  out.numerator = detail::numerator(pb, detail::pair_mass(pb, K));
  out.denom = detail::denom(pb, K);
}

CapacityResult solve_bound(const CapacityQuery& query) {
  const KernelProblem pb = KernelProblem::build(query);
  CapacityResult out;

  Matrix start = detail::independent_kernel(pb);
  if (!detail::project_distortion(pb, start))
    fail(ErrorCode::Infeasible, "distortion constraint cannot be met");
  // The projected independent kernel maximizes DENOM over the feasible set.
  if (!(detail::denom(pb, start) > 0.0)) {
    out.constrained = false;
    fill_witness(query, pb, start, out);
    return out;
  }
  if (query.channel.uninformative()) {
    fill_witness(query, pb, start, out);
    out.value = 0.0;
    out.numerator = 0.0;
    return out;
  }

  const auto restarts = static_cast<std::size_t>(query.options.restarts);
  std::vector<detail::DinkelbachResult> runs(restarts);
  detail::parallel_for(restarts, [&](std::size_t r) {
    Matrix K = start;
    if (r > 0) {
      std::mt19937_64 rng(detail::mix_seed(query.options.seed, r));
      Matrix candidate = random_start(pb, rng);
      if (detail::project_distortion(pb, candidate) && detail::denom(pb, candidate) > 0.0)
        K = std::move(candidate);
    }
    runs[r] = detail::dinkelbach(pb, std::move(K), query.options);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].theta < runs[best].theta) best = r;
  const auto& run = runs[best];
  fill_witness(query, pb, run.K, out);
  out.value = std::max(0.0, run.theta);
  out.certificate = run.certificate;
  out.certificate_gap = run.gap;
  out.iterations = run.iterations;
  return out;
}

}  // namespace

CapacityResult clb_c0(const CapacityQuery& query) {
  if (query.c != 0) fail(ErrorCode::InvalidArgument, "clb_c0 needs c = 0");
  return solve_bound(query);
}

CapacityResult clb_c1(const CapacityQuery& query) {
  if (query.c != 1) fail(ErrorCode::InvalidArgument, "clb_c1 needs c = 1");
  return solve_bound(query);
}

CapacityResult capacity_lower_bound(const CapacityQuery& query) {
  switch (query.c) {
    case 0:
      return clb_c0(query);
    case 1:
      return clb_c1(query);
    default:
      fail(ErrorCode::InvalidArgument, "capacity bounds are implemented for c = 0 and c = 1 only");
  }
}

// ---------------------------------------------------------------------------
// Oracle: random feasible points plus pairwise mass-transfer descent. It only
// uses the generic type functions (pxy, qxy, kl, DENOM), not the optimizer.

namespace {

class OracleObjective {
 public:
  explicit OracleObjective(const CapacityQuery& q) : query_(q) {
    const auto star = typical_field_type(q.model);
    phi_star_.assign(star.begin(), star.end());
    if (q.c == 0) {
      gamma_ = phi_to_gamma(std::span<const double>(phi_star_));
    } else {
      gamma_.assign(kQ, 0.0);
      for (int t = 0; t < kQ; ++t) gamma_[quintuplet_to_footprint1(t)] = phi_star_[t];
    }
    p_ = pxy(gamma_, q.psi, q.channel);
    target_ = q.D + q.options.eps_dist;
  }

  const std::vector<double>& phi_star() const { return phi_star_; }
  double target() const { return target_; }

  double distortion(const Matrix& mu) const {
    return senscap::distortion(center_pair(mu, PatternSpace::quintuplets()));
  }

  // Ratio at μ, or +inf when μ is infeasible or DENOM ≤ 0.
  double ratio(const Matrix& mu) const {
    if (distortion(mu) < target_) return std::numeric_limits<double>::infinity();
    Matrix lambda;
    double d = 0.0;
    if (query_.c == 0) {
      lambda = center_pair(mu, PatternSpace::quintuplets());
      d = denom_t2(mu, phi_star_);
    } else {
      lambda = Matrix(kQ, kQ);
      for (int t = 0; t < kQ; ++t)
        for (int u = 0; u < kQ; ++u)
          lambda(quintuplet_to_footprint1(t), quintuplet_to_footprint1(u)) = mu(t, u);
      const auto cols = mu.col_sums();
      d = denom_t1(lambda, gamma_, phi_star_, cols);
    }
    if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
    const Matrix q = qxy(gamma_, lambda, query_.psi, query_.channel);
    return std::max(0.0, kl(p_.flat(), q.flat())) / d;
  }

 private:
  const CapacityQuery& query_;
  std::vector<double> phi_star_;
  std::vector<double> gamma_;
  Matrix p_;
  double target_ = 0.0;
};

// Tilts every row's opposite-center share toward `goal` with a common factor.
bool tilt_rows(Matrix& mu, std::span<const double> w, double goal) {
  std::array<double, kQ> a{}, b{};
  for (int t = 0; t < kQ; ++t)
    for (int u = 0; u < kQ; ++u) (((t ^ u) & 1) ? a[t] : b[t]) += mu(t, u);
  auto reached = [&](double nu) {
    double total = 0.0;
    for (int t = 0; t < kQ; ++t)
      if (a[t] > 0.0) total += w[t] * a[t] / (a[t] + b[t] * std::exp(-nu));
    return total;
  };
  double lo = -60.0, hi = 60.0;
  if (reached(hi) < goal) return false;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (reached(mid) < goal ? lo : hi) = mid;
  }
  for (int t = 0; t < kQ; ++t) {
    const double share = a[t] > 0.0 ? a[t] / (a[t] + b[t] * std::exp(-hi)) : 0.0;
    const double opp = a[t] > 0.0 ? w[t] * share / a[t] : 0.0;
    const double same = b[t] > 0.0 ? w[t] * (1.0 - share) / b[t] : 0.0;
    for (int u = 0; u < kQ; ++u) mu(t, u) *= ((t ^ u) & 1) ? opp : same;
  }
  return true;
}

}  // namespace

double oracle_local_search(const CapacityQuery& query, int samples, std::uint64_t seed) {
  if (samples < 1) fail(ErrorCode::InvalidArgument, "samples must be >= 1");
  KernelProblem::build(query);  // same preconditions as the bound
  const OracleObjective objective(query);
  const auto& w = objective.phi_star();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  constexpr std::size_t kKeep = 6;
  std::vector<std::pair<double, Matrix>> pool;
  Matrix mu(kQ, kQ);
  for (int s = 0; s < samples; ++s) {
    const double concentration = std::exp(std::log(0.05) + unit(rng) * std::log(200.0));
    std::gamma_distribution<double> draw(concentration);
    // Rows mix the identity row, φ* and a Dirichlet draw, with log-uniform
    // weights so that near-identity kernels are reached as well.
    const double keep = unit(rng) < 0.5 ? 1.0 - std::exp(unit(rng) * std::log(1e-5)) : unit(rng);
    const double noise = std::exp(unit(rng) * std::log(1e-5));
    for (int t = 0; t < kQ; ++t) {
      double z = 0.0;
      for (int u = 0; u < kQ; ++u) z += (mu(t, u) = draw(rng) + 1e-300);
      for (int u = 0; u < kQ; ++u) {
        const double base = keep * (t == u ? 1.0 : 0.0) + (1.0 - keep) * w[u];
        mu(t, u) = w[t] * ((1.0 - noise) * base + noise * mu(t, u) / z);
      }
    }
    const double r = unit(rng);
    const double goal = objective.target() + r * r * r * (1.0 - objective.target()) * 0.5;
    if (!tilt_rows(mu, w, goal)) continue;
    const double ratio = objective.ratio(mu);
    if (!std::isfinite(ratio)) continue;
    if (pool.size() < kKeep || ratio < pool.back().first) {
      if (pool.size() == kKeep) pool.pop_back();
      pool.emplace_back(ratio, mu);
      std::sort(pool.begin(), pool.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
    }
  }
  if (pool.empty()) return std::numeric_limits<double>::infinity();

  std::uniform_int_distribution<int> pick(0, kQ - 1);
  double best = pool.front().first;
  Matrix saved(kQ, kQ);
  for (auto& [value, point] : pool) {
    for (int it = 0; it < 40000; ++it) {
      const int t = pick(rng), u = pick(rng);
      const double size = std::exp(unit(rng) * std::log(1e-5));
      const double kind = unit(rng);
      saved = point;
      if (kind < 0.25) {
        // Blend row t toward its identity row.
        for (int v = 0; v < kQ; ++v) point(t, v) = (1.0 - size) * point(t, v) + (v == t ? size * w[t] : 0.0);
      } else if (kind < 0.5) {
        // Blend row t toward φ*.
        for (int v = 0; v < kQ; ++v) point(t, v) = (1.0 - size) * point(t, v) + size * w[t] * w[v];
      } else {
        int v = pick(rng);
        // Half of the transfers keep the center relation of the moved mass,
        // so the distortion is unchanged.
        if (kind < 0.75) v = (v & ~1) | (u & 1);
        if (u == v || point(t, u) <= 0.0) continue;
        const double amount = size * point(t, u);
        point(t, u) -= amount;
        point(t, v) += amount;
      }
      // Moves that drop below the distortion target are tilted back onto it.
      if (objective.distortion(point) < objective.target()) tilt_rows(point, w, objective.target());
      const double trial = objective.ratio(point);
      if (trial < value)
        value = trial;
      else
        point = saved;
    }
    best = std::min(best, value);
  }
  return best;
}

}  // namespace senscap
