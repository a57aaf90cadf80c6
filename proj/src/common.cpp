#include <cmath>
#include <limits>
#include <numeric>

#include "senscap/counts.hpp"
#include "senscap/error.hpp"
#include "senscap/info.hpp"
#include "senscap/matrix.hpp"

namespace senscap {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::InvalidGrid: return "invalid grid";
    case ErrorCode::InvalidModel: return "invalid model";
    case ErrorCode::EnumerationTooLarge: return "enumeration too large";
    case ErrorCode::CoverageOverlap: return "coverage overlap";
    case ErrorCode::PatternSize: return "pattern size mismatch";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::InvalidChannel: return "invalid channel";
    case ErrorCode::InvalidSensing: return "invalid sensing function";
    case ErrorCode::UndefinedConditional: return "undefined conditional";
    case ErrorCode::InconsistentTypes: return "inconsistent types";
    case ErrorCode::WrongDirection: return "wrong marginalization direction";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::Config: return "config error";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

std::vector<double> Matrix::row_sums() const {
  std::vector<double> out(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[r] += (*this)(r, c);
  return out;
}

std::vector<double> Matrix::col_sums() const {
  std::vector<double> out(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[c] += (*this)(r, c);
  return out;
}

double Matrix::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

std::vector<double> CountVector::probabilities() const {
  std::vector<double> p(counts.size());
  const double norm = static_cast<double>(total);
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / norm;
  return p;
}

Matrix CountMatrix::probabilities() const {
  Matrix m(rows, cols);
  const double norm = static_cast<double>(total);
  for (std::size_t i = 0; i < counts.size(); ++i)
    m.flat()[i] = static_cast<double>(counts[i]) / norm;
  return m;
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

double kl(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) fail(ErrorCode::DimensionMismatch, "kl: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return d;
}

double cross_entropy(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) fail(ErrorCode::DimensionMismatch, "cross_entropy: size mismatch");
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    h -= p[i] * std::log2(q[i]);
  }
  return h;
}

}  // namespace senscap
