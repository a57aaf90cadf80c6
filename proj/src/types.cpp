#include "senscap/types.hpp"

#include <array>
#include <cmath>
#include <string>

#include "senscap/error.hpp"

namespace senscap {

namespace {

void check_enumerable(int k) {
  if (k > kMaxEnumerationSide)
    fail(ErrorCode::EnumerationTooLarge, "exhaustive enumeration needs k <= 4, got " +
                                             std::to_string(k));
}

void check_fits(int k, int c) {
  if (k < 2 * c + 1) fail(ErrorCode::CoverageOverlap, "grid too small for sensor range");
}

// Bit positions (0 = MSB) of the N, E, S, W and center cells inside a range-c
// footprint, in quintuplet order.
std::array<int, 5> quintuplet_positions(const Coverage& cov) {
  return {cov.position_of(-1, 0), cov.position_of(0, 1), cov.position_of(1, 0),
          cov.position_of(0, -1), cov.position_of(0, 0)};
}

int restrict_to_quintuplet(int pattern, const Coverage& cov, const std::array<int, 5>& pos) {
  const int m = cov.size();
  int t = 0;
  for (int p : pos) t = (t << 1) | ((pattern >> (m - 1 - p)) & 1);
  return t;
}

void check_pattern_count(std::size_t got, const SensingFunction& psi) {
  if (got != (std::size_t{1} << psi.footprint()))
    fail(ErrorCode::DimensionMismatch, "type has " + std::to_string(got) +
                                           " patterns, sensing function expects " +
                                           std::to_string(1 << psi.footprint()));
}

}  // namespace

PatternSpace PatternSpace::footprint(int c) {
  const Coverage cov(c);
  return PatternSpace(cov.patterns(), cov.size() - 1 - cov.center_position());
}

PatternSpace PatternSpace::quintuplets() { return PatternSpace(kQuintuplets, 0); }

CountVector sensor_type(const TargetField& field, int c) {
  check_fits(field.k(), c);
  const Coverage cov(c);
  CountVector gamma(static_cast<std::size_t>(cov.patterns()), field.cells());
  for (int r = 0; r < field.k(); ++r)
    for (int col = 0; col < field.k(); ++col) ++gamma.counts[cov.pattern_at(field, {r, col})];
  return gamma;
}

CountMatrix joint_sensor_type(const TargetField& fi, const TargetField& fj, int c) {
  if (fi.k() != fj.k()) fail(ErrorCode::DimensionMismatch, "fields have different sizes");
  check_fits(fi.k(), c);
  const Coverage cov(c);
  const auto n = static_cast<std::size_t>(cov.patterns());
  CountMatrix lambda(n, n, fi.cells());
  for (int r = 0; r < fi.k(); ++r)
    for (int col = 0; col < fi.k(); ++col)
      ++lambda.at(cov.pattern_at(fi, {r, col}), cov.pattern_at(fj, {r, col}));
  return lambda;
}

CountMatrix joint_field_type(const TargetField& fi, const TargetField& fj) {
  if (fi.k() != fj.k()) fail(ErrorCode::DimensionMismatch, "fields have different sizes");
  CountMatrix mu(kQuintuplets, kQuintuplets, fi.cells());
  for (int r = 0; r < fi.k(); ++r)
    for (int col = 0; col < fi.k(); ++col) ++mu.at(quintuplet(fi, {r, col}), quintuplet(fj, {r, col}));
  return mu;
}

std::pair<CountVector, CountVector> lambda_marginals(const CountMatrix& lambda) {
  CountVector gi(lambda.rows, lambda.total), gj(lambda.cols, lambda.total);
  for (std::size_t r = 0; r < lambda.rows; ++r)
    for (std::size_t c = 0; c < lambda.cols; ++c) {
      gi.counts[r] += lambda.at(r, c);
      gj.counts[c] += lambda.at(r, c);
    }
  return {gi, gj};
}

std::pair<std::vector<double>, std::vector<double>> lambda_marginals(const Matrix& lambda) {
  return {lambda.row_sums(), lambda.col_sums()};
}

CountMatrix center_pair(const CountMatrix& joint, const PatternSpace& space) {
  if (joint.rows != static_cast<std::size_t>(space.size()) ||
      joint.cols != static_cast<std::size_t>(space.size()))
    fail(ErrorCode::DimensionMismatch, "joint type does not match the pattern space");
  CountMatrix out(2, 2, joint.total);
  for (std::size_t r = 0; r < joint.rows; ++r)
    for (std::size_t c = 0; c < joint.cols; ++c)
      out.at(space.center_bit(static_cast<int>(r)), space.center_bit(static_cast<int>(c))) +=
          joint.at(r, c);
  return out;
}

Matrix center_pair(const Matrix& joint, const PatternSpace& space) {
  if (joint.rows() != static_cast<std::size_t>(space.size()) ||
      joint.cols() != static_cast<std::size_t>(space.size()))
    fail(ErrorCode::DimensionMismatch, "joint type does not match the pattern space");
  Matrix out(2, 2);
  for (std::size_t r = 0; r < joint.rows(); ++r)
    for (std::size_t c = 0; c < joint.cols(); ++c)
      out(space.center_bit(static_cast<int>(r)), space.center_bit(static_cast<int>(c))) +=
          joint(r, c);
  return out;
}

double distortion(const Matrix& center) { return center(0, 1) + center(1, 0); }

double distortion(const CountMatrix& center) {
  return static_cast<double>(center.at(0, 1) + center.at(1, 0)) /
         static_cast<double>(center.total);
}

int footprint1_to_quintuplet(int pattern) {
  static const Coverage cov(1);
  static const auto pos = quintuplet_positions(cov);
  return restrict_to_quintuplet(pattern, cov, pos);
}

int quintuplet_to_footprint1(int t) {
  static const std::array<int, kQuintuplets> inverse = [] {
    std::array<int, kQuintuplets> inv{};
    for (int p = 0; p < kQuintuplets; ++p) inv[footprint1_to_quintuplet(p)] = p;
    return inv;
  }();
  return inverse[t];
}

CountVector gamma_to_phi(const CountVector& gamma, int c) {
  if (c < 1) fail(ErrorCode::WrongDirection, "range-0 sensor types cannot be lifted to field types");
  const Coverage cov(c);
  if (gamma.size() != static_cast<std::size_t>(cov.patterns()))
    fail(ErrorCode::DimensionMismatch, "sensor type size does not match range");
  const auto pos = quintuplet_positions(cov);
  CountVector phi(kQuintuplets, gamma.total);
  for (int w = 0; w < cov.patterns(); ++w)
    phi.counts[restrict_to_quintuplet(w, cov, pos)] += gamma.counts[w];
  return phi;
}

std::vector<double> gamma_to_phi(std::span<const double> gamma, int c) {
  if (c < 1) fail(ErrorCode::WrongDirection, "range-0 sensor types cannot be lifted to field types");
  const Coverage cov(c);
  if (gamma.size() != static_cast<std::size_t>(cov.patterns()))
    fail(ErrorCode::DimensionMismatch, "sensor type size does not match range");
  const auto pos = quintuplet_positions(cov);
  std::vector<double> phi(kQuintuplets, 0.0);
  for (int w = 0; w < cov.patterns(); ++w) phi[restrict_to_quintuplet(w, cov, pos)] += gamma[w];
  return phi;
}

CountVector phi_to_gamma(const CountVector& phi) {
  if (phi.size() != kQuintuplets) fail(ErrorCode::DimensionMismatch, "field type must have 32 entries");
  CountVector gamma(2, phi.total);
  for (int t = 0; t < kQuintuplets; ++t) gamma.counts[quintuplet_center(t)] += phi.counts[t];
  return gamma;
}

std::vector<double> phi_to_gamma(std::span<const double> phi) {
  if (phi.size() != kQuintuplets) fail(ErrorCode::DimensionMismatch, "field type must have 32 entries");
  std::vector<double> gamma(2, 0.0);
  for (int t = 0; t < kQuintuplets; ++t) gamma[quintuplet_center(t)] += phi[t];
  return gamma;
}

std::vector<double> output_dist(std::span<const double> gamma, const SensingFunction& psi) {
  check_pattern_count(gamma.size(), psi);
  std::vector<double> p(static_cast<std::size_t>(psi.alphabet_size()), 0.0);
  for (std::size_t w = 0; w < gamma.size(); ++w) p[psi.symbol(static_cast<int>(w))] += gamma[w];
  return p;
}

Matrix output_pair_mass(const Matrix& lambda, const SensingFunction& psi) {
  check_pattern_count(lambda.rows(), psi);
  check_pattern_count(lambda.cols(), psi);
  const auto nx = static_cast<std::size_t>(psi.alphabet_size());
  Matrix m(nx, nx);
  for (std::size_t w = 0; w < lambda.rows(); ++w)
    for (std::size_t u = 0; u < lambda.cols(); ++u)
      m(psi.symbol(static_cast<int>(w)), psi.symbol(static_cast<int>(u))) += lambda(w, u);
  return m;
}

ConditionalOutput::ConditionalOutput(Matrix cond, std::vector<double> row_mass)
    : cond_(std::move(cond)), row_mass_(std::move(row_mass)) {}

double ConditionalOutput::operator()(int xi, int xj) const {
  if (!defined(xi))
    fail(ErrorCode::UndefinedConditional,
         "P(x_j | x_i = " + std::to_string(xi) + ") conditions on a zero-probability symbol");
  return cond_(xi, xj);
}

std::span<const double> ConditionalOutput::row(int xi) const {
  if (!defined(xi))
    fail(ErrorCode::UndefinedConditional,
         "P(x_j | x_i = " + std::to_string(xi) + ") conditions on a zero-probability symbol");
  return cond_.row(static_cast<std::size_t>(xi));
}

ConditionalOutput cond_output_dist(const Matrix& lambda, const SensingFunction& psi) {
  Matrix m = output_pair_mass(lambda, psi);
  auto mass = m.row_sums();
  for (std::size_t x = 0; x < m.rows(); ++x) {
    if (mass[x] <= 0.0) {
      mass[x] = 0.0;
      continue;
    }
    for (auto& v : m.row(x)) v /= mass[x];
  }
  return ConditionalOutput(std::move(m), std::move(mass));
}

Matrix pxy(std::span<const double> gamma, const SensingFunction& psi, const NoiseChannel& channel) {
  if (channel.inputs() != psi.alphabet_size())
    fail(ErrorCode::DimensionMismatch, "channel inputs do not match the sensing alphabet");
  const auto px = output_dist(gamma, psi);
  Matrix out(px.size(), static_cast<std::size_t>(channel.outputs()));
  for (std::size_t x = 0; x < px.size(); ++x)
    for (int y = 0; y < channel.outputs(); ++y) out(x, y) = px[x] * channel(static_cast<int>(x), y);
  return out;
}

Matrix qxy(std::span<const double> gamma, const Matrix& lambda, const SensingFunction& psi,
           const NoiseChannel& channel) {
  if (channel.inputs() != psi.alphabet_size())
    fail(ErrorCode::DimensionMismatch, "channel inputs do not match the sensing alphabet");
  const auto px = output_dist(gamma, psi);
  const auto cond = cond_output_dist(lambda, psi);
  for (std::size_t x = 0; x < px.size(); ++x)
    if (std::abs(cond.row_mass()[x] - px[x]) > 1e-9)
      fail(ErrorCode::InconsistentTypes, "row marginal of the joint type does not match gamma");
  Matrix out(px.size(), static_cast<std::size_t>(channel.outputs()));
  for (std::size_t x = 0; x < px.size(); ++x) {
    if (!cond.defined(static_cast<int>(x))) continue;
    const auto row = cond.row(static_cast<int>(x));
    for (int y = 0; y < channel.outputs(); ++y) {
      double s = 0.0;
      for (std::size_t a = 0; a < row.size(); ++a) s += row[a] * channel(static_cast<int>(a), y);
      out(x, y) = px[x] * s;
    }
  }
  return out;
}

std::uint64_t alpha_count(const CountVector& phi, int k) {
  check_enumerable(k);
  const std::uint64_t fields = 1ull << (k * k);
  std::uint64_t n = 0;
  for (std::uint64_t i = 0; i < fields; ++i)
    if (field_type(TargetField::from_index(k, i)) == phi) ++n;
  return n;
}

std::uint64_t beta_count(const TargetField& fi, const CountMatrix& lambda, int c) {
  const int k = fi.k();
  check_enumerable(k);
  const std::uint64_t fields = 1ull << (k * k);
  std::uint64_t n = 0;
  for (std::uint64_t j = 0; j < fields; ++j)
    if (joint_sensor_type(fi, TargetField::from_index(k, j), c) == lambda) ++n;
  return n;
}

}  // namespace senscap
