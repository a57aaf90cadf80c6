#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "senscap/error.hpp"
#include "senscap/mrf.hpp"

#define CHECK_CODE(expr, ec)                          \
  do {                                                \
    bool thrown_ = false;                             \
    try {                                             \
      (void)(expr);                                   \
    } catch (const senscap::Error& e_) {              \
      thrown_ = true;                                 \
      CHECK(e_.code() == senscap::ErrorCode::ec);     \
    }                                                 \
    CHECK_MESSAGE(thrown_, "expected " #ec);          \
  } while (0)

inline senscap::TargetField random_field(int k, std::mt19937_64& rng) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(k * k));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
  return senscap::TargetField(k, std::move(bits));
}
