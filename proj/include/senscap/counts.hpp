#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "senscap/matrix.hpp"

namespace senscap {

/// Histogram with exact integer counts. Every instance comes from counting
/// positions of actual fields, so it is a realizable type; relaxed points
/// handled by the optimizer are plain doubles instead.
struct CountVector {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  CountVector() = default;
  CountVector(std::size_t size, std::uint64_t normalizer)
      : counts(size, 0), total(normalizer) {}

  std::size_t size() const { return counts.size(); }
  std::vector<double> probabilities() const;

  bool operator==(const CountVector&) const = default;
};

/// Joint histogram (rows × cols) with exact counts.
struct CountMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  CountMatrix() = default;
  CountMatrix(std::size_t r, std::size_t c, std::uint64_t normalizer)
      : rows(r), cols(c), counts(r * c, 0), total(normalizer) {}

  std::uint64_t& at(std::size_t r, std::size_t c) { return counts[r * cols + c]; }
  std::uint64_t at(std::size_t r, std::size_t c) const { return counts[r * cols + c]; }

  Matrix probabilities() const;

  bool operator==(const CountMatrix&) const = default;
};

}  // namespace senscap
