#pragma once

#include <aircomplex/error.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <vector>

namespace aircomplex {

/// Unscrambled Sobol' low-discrepancy sequence (Gray-code ordering) with the
/// Joe-Kuo direction numbers. The first point is the origin.
class SobolSequence {
public:
  static constexpr std::size_t kMaxDimension = 16;
  static constexpr int kBits = 32;

  explicit SobolSequence(std::size_t dimension) : dimension_(dimension), state_(dimension, 0) {
    if (dimension == 0 || dimension > kMaxDimension)
      throw InvalidParams("Sobol dimension must be in [1, " + std::to_string(kMaxDimension) + "]");
    directions_.resize(dimension);
    for (std::size_t d = 0; d < dimension; ++d) init_directions(d);
  }

  std::size_t dimension() const noexcept { return dimension_; }
  std::uint64_t index() const noexcept { return index_; }

  /// Writes the current point into `out` (size >= dimension) and advances.
  void next(double* out) {
    constexpr double scale = 1.0 / 4294967296.0;
    for (std::size_t d = 0; d < dimension_; ++d) out[d] = static_cast<double>(state_[d]) * scale;
    const int c = std::countr_one(index_); // rightmost zero bit of index_
    if (c >= kBits) throw InvalidParams("Sobol sequence exhausted");
    for (std::size_t d = 0; d < dimension_; ++d) state_[d] ^= directions_[d][static_cast<std::size_t>(c)];
    ++index_;
  }

  std::vector<double> next() {
    std::vector<double> p(dimension_);
    next(p.data());
    return p;
  }

private:
  struct Primitive {
    unsigned degree;
    std::uint32_t coeffs;
    std::array<std::uint32_t, 8> m;
  };

  // Dimensions 2..16 of new-joe-kuo-6.21201: degree s, coefficients a, m_1..m_s.
  static constexpr std::array<Primitive, kMaxDimension - 1> kTable{{
      {1, 0, {1}},
      {2, 1, {1, 3}},
      {3, 1, {1, 3, 1}},
      {3, 2, {1, 1, 1}},
      {4, 1, {1, 1, 3, 3}},
      {4, 4, {1, 3, 5, 13}},
      {5, 2, {1, 1, 5, 5, 17}},
      {5, 4, {1, 1, 5, 5, 5}},
      {5, 7, {1, 1, 7, 11, 19}},
      {5, 11, {1, 1, 5, 1, 1}},
      {5, 13, {1, 1, 1, 3, 11}},
      {5, 14, {1, 3, 5, 5, 31}},
      {6, 1, {1, 3, 3, 9, 7, 49}},
      {6, 13, {1, 1, 1, 15, 21, 21}},
      {6, 16, {1, 3, 1, 13, 27, 49}},
  }};

  void init_directions(std::size_t d) {
    auto& v = directions_[d];
    if (d == 0) {
      for (int i = 0; i < kBits; ++i) v[static_cast<std::size_t>(i)] = std::uint32_t{1} << (kBits - 1 - i);
      return;
    }
    const auto& p = kTable[d - 1];
    const unsigned s = p.degree;
    for (unsigned i = 0; i < s && i < kBits; ++i) v[i] = p.m[i] << (kBits - 1 - i);
    for (unsigned i = s; i < kBits; ++i) {
      std::uint32_t x = v[i - s] ^ (v[i - s] >> s);
      for (unsigned k = 1; k < s; ++k)
        if ((p.coeffs >> (s - 1 - k)) & 1u) x ^= v[i - k];
      v[i] = x;
    }
  }

  std::size_t dimension_;
  std::uint64_t index_ = 0;
  std::vector<std::uint32_t> state_;
  std::vector<std::array<std::uint32_t, kBits>> directions_;
};

} // namespace aircomplex
