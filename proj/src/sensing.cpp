#include "senscap/sensing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "senscap/error.hpp"

namespace senscap {

namespace {

constexpr int kMaxFootprint = 20;

void check_range(int c) {
  if (c < 0) fail(ErrorCode::InvalidArgument, "sensor range must be >= 0");
}

}  // namespace

Coverage::Coverage(int c) : c_(c) {
  check_range(c);
  for (int dr = -c; dr <= c; ++dr)
    for (int dc = -c; dc <= c; ++dc)
      if (dr * dr + dc * dc <= c * c) offsets_.emplace_back(dr, dc);
}

int Coverage::position_of(int dr, int dc) const {
  for (std::size_t i = 0; i < offsets_.size(); ++i)
    if (offsets_[i].first == dr && offsets_[i].second == dc) return static_cast<int>(i);
  return -1;
}

int Coverage::center_bit(int pattern) const {
  return (pattern >> (size() - 1 - center_position())) & 1;
}

int Coverage::pattern_at(const TargetField& field, GridIndex h) const {
  int pattern = 0;
  for (const auto& [dr, dc] : offsets_) pattern = (pattern << 1) | field.at(h.row + dr, h.col + dc);
  return pattern;
}

std::vector<GridIndex> coverage(int c, GridIndex h, int k) {
  check_range(c);
  if (k < 3) fail(ErrorCode::InvalidGrid, "grid side must be >= 3");
  if (k < 2 * c + 1)
    fail(ErrorCode::CoverageOverlap,
         "range " + std::to_string(c) + " wraps onto itself on a " + std::to_string(k) + " grid");
  const Coverage cov(c);
  std::vector<GridIndex> cells;
  for (const auto& [dr, dc] : cov.offsets())
    cells.push_back({((h.row + dr) % k + k) % k, ((h.col + dc) % k + k) % k});
  return cells;
}

SensingFunction SensingFunction::identity() {
  SensingFunction f;
  f.kind_ = Kind::Identity;
  f.c_ = 0;
  f.footprint_ = 1;
  f.table_ = {0, 1};
  f.alphabet_ = {0.0, 1.0};
  return f;
}

SensingFunction SensingFunction::count(int c) {
  const Coverage cov(c);
  if (cov.size() > kMaxFootprint) fail(ErrorCode::InvalidSensing, "footprint too large");
  SensingFunction f;
  f.kind_ = Kind::Count;
  f.c_ = c;
  f.footprint_ = cov.size();
  f.table_.resize(static_cast<std::size_t>(cov.patterns()));
  for (int p = 0; p < cov.patterns(); ++p) f.table_[p] = std::popcount(static_cast<unsigned>(p));
  for (int v = 0; v <= cov.size(); ++v) f.alphabet_.push_back(v);
  return f;
}

SensingFunction SensingFunction::weighted_sum(int c, std::vector<double> weights) {
  const Coverage cov(c);
  if (cov.size() > kMaxFootprint) fail(ErrorCode::InvalidSensing, "footprint too large");
  if (static_cast<int>(weights.size()) != cov.size())
    fail(ErrorCode::InvalidSensing, "weighted sum needs one weight per covered cell (" +
                                        std::to_string(cov.size()) + ")");
  const int m = cov.size();
  std::vector<double> values(static_cast<std::size_t>(cov.patterns()));
  for (int p = 0; p < cov.patterns(); ++p) {
    double v = 0.0;
    for (int i = 0; i < m; ++i)
      if ((p >> (m - 1 - i)) & 1) v += weights[i];
    values[p] = v;
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  SensingFunction f;
  for (double v : sorted)
    if (f.alphabet_.empty() || v - f.alphabet_.back() > 1e-12) f.alphabet_.push_back(v);
  f.kind_ = Kind::WeightedSum;
  f.c_ = c;
  f.footprint_ = m;
  f.table_.resize(values.size());
  for (std::size_t p = 0; p < values.size(); ++p) {
    auto it = std::lower_bound(f.alphabet_.begin(), f.alphabet_.end(), values[p] - 1e-12);
    f.table_[p] = static_cast<int>(it - f.alphabet_.begin());
  }
  return f;
}

SensingFunction SensingFunction::lookup(int c, std::vector<int> table) {
  const Coverage cov(c);
  if (cov.size() > kMaxFootprint) fail(ErrorCode::InvalidSensing, "footprint too large");
  if (static_cast<int>(table.size()) != cov.patterns())
    fail(ErrorCode::InvalidSensing,
         "lookup table needs exactly " + std::to_string(cov.patterns()) + " entries");
  int max_symbol = 0;
  for (int s : table) {
    if (s < 0) fail(ErrorCode::InvalidSensing, "lookup symbols must be >= 0");
    max_symbol = std::max(max_symbol, s);
  }
  SensingFunction f;
  f.kind_ = Kind::Lookup;
  f.c_ = c;
  f.footprint_ = cov.size();
  f.table_ = std::move(table);
  for (int v = 0; v <= max_symbol; ++v) f.alphabet_.push_back(v);
  return f;
}

int SensingFunction::sense(std::span<const std::uint8_t> bits) const {
  if (static_cast<int>(bits.size()) != footprint_)
    fail(ErrorCode::PatternSize, "pattern has " + std::to_string(bits.size()) + " bits, expected " +
                                     std::to_string(footprint_));
  int pattern = 0;
  for (auto b : bits) {
    if (b > 1) fail(ErrorCode::InvalidArgument, "pattern bits must be 0 or 1");
    pattern = (pattern << 1) | b;
  }
  return symbol(pattern);
}

NoiseChannel::NoiseChannel(Matrix transition) : matrix_(std::move(transition)) {
  if (matrix_.rows() == 0 || matrix_.cols() == 0)
    fail(ErrorCode::InvalidChannel, "channel matrix is empty");
  for (std::size_t x = 0; x < matrix_.rows(); ++x) {
    double s = 0.0;
    for (double v : matrix_.row(x)) {
      if (!(v >= 0.0)) fail(ErrorCode::InvalidChannel, "channel entries must be >= 0");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12)
      fail(ErrorCode::InvalidChannel, "channel row " + std::to_string(x) + " does not sum to 1");
  }
}

NoiseChannel NoiseChannel::symmetric(int symbols, double q) {
  if (symbols < 2) fail(ErrorCode::InvalidChannel, "symmetric channel needs >= 2 symbols");
  if (!(q >= 0.0 && q <= 1.0)) fail(ErrorCode::InvalidChannel, "flip probability must be in [0,1]");
  Matrix m(symbols, symbols, q / (symbols - 1));
  for (int x = 0; x < symbols; ++x) m(x, x) = 1.0 - q;
  return NoiseChannel(std::move(m));
}

NoiseChannel NoiseChannel::noiseless(int symbols) { return symmetric(symbols, 0.0); }

bool NoiseChannel::uninformative() const {
  for (std::size_t x = 1; x < matrix_.rows(); ++x)
    for (std::size_t y = 0; y < matrix_.cols(); ++y)
      if (std::abs(matrix_(x, y) - matrix_(0, y)) > 1e-15) return false;
  return true;
}

int NoiseChannel::sample(int x, std::mt19937_64& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  const auto row = matrix_.row(static_cast<std::size_t>(x));
  int last = 0;
  for (std::size_t y = 0; y < row.size(); ++y) {
    if (row[y] <= 0.0) continue;
    last = static_cast<int>(y);
    acc += row[y];
    if (u < acc) return last;
  }
  return last;
}

void check_compatible(int k, int c, const SensingFunction& psi, const NoiseChannel& channel) {
  check_range(c);
  if (k < 3) fail(ErrorCode::InvalidGrid, "grid side must be >= 3");
  if (k < 2 * c + 1) fail(ErrorCode::CoverageOverlap, "grid too small for sensor range");
  if (psi.range() != c)
    fail(ErrorCode::InvalidSensing, "sensing function built for range " +
                                        std::to_string(psi.range()) + ", network uses " +
                                        std::to_string(c));
  if (channel.inputs() != psi.alphabet_size())
    fail(ErrorCode::DimensionMismatch, "channel has " + std::to_string(channel.inputs()) +
                                           " inputs but the sensing alphabet has " +
                                           std::to_string(psi.alphabet_size()) + " symbols");
}

SensorNetwork generate_network(int k, int n, int c, const SensingFunction& psi,
                               const NoiseChannel& channel, std::uint64_t seed) {
  check_compatible(k, c, psi, channel);
  if (n < 0) fail(ErrorCode::InvalidArgument, "number of sensors must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cell(0, k * k - 1);
  SensorNetwork net{.k = k, .c = c, .placements = {}, .psi = psi, .channel = channel};
  net.placements.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int idx = cell(rng);
    net.placements.push_back({idx / k, idx % k});
  }
  return net;
}

std::vector<int> ideal_output(const SensorNetwork& network, const TargetField& field) {
  if (field.k() != network.k)
    fail(ErrorCode::DimensionMismatch, "field and network grid sizes differ");
  const Coverage cov(network.c);
  std::vector<int> x;
  x.reserve(network.placements.size());
  for (const auto& h : network.placements) x.push_back(network.psi.symbol(cov.pattern_at(field, h)));
  return x;
}

std::vector<int> noisy_output(std::span<const int> x, const NoiseChannel& channel,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> y;
  y.reserve(x.size());
  for (int xi : x) {
    if (xi < 0 || xi >= channel.inputs())
      fail(ErrorCode::DimensionMismatch, "ideal output symbol outside channel input alphabet");
    y.push_back(channel.sample(xi, rng));
  }
  return y;
}

double log_likelihood(std::span<const int> y, std::span<const int> x, const NoiseChannel& channel) {
  if (x.size() != y.size()) fail(ErrorCode::DimensionMismatch, "x and y lengths differ");
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ll += std::log2(channel(x[i], y[i]));
  return ll;
}

}  // namespace senscap
