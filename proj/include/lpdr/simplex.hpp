#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>

#include "lpdr/error.hpp"

namespace lpdr {

using VertexId = std::int32_t;

/// Largest supported simplex has this many vertices (dimension 7).
inline constexpr int kMaxSimplexVertices = 8;

/// Unoriented simplex key: a strictly increasing tuple of vertex ids, stored inline.
/// The induced orientation is the ascending vertex order.
class Simplex {
 public:
  Simplex() = default;

  /// Sorts `ids`; throws DegenerateSimplex on repeats, BadDimension when too many.
  explicit Simplex(std::span<const VertexId> ids);
  Simplex(std::initializer_list<VertexId> ids)
      : Simplex(std::span<const VertexId>(ids.begin(), ids.size())) {}

  int size() const noexcept { return size_; }
  int dim() const noexcept { return int(size_) - 1; }
  bool empty() const noexcept { return size_ == 0; }

  VertexId operator[](int i) const noexcept { return ids_[i]; }
  const VertexId* begin() const noexcept { return ids_.data(); }
  const VertexId* end() const noexcept { return ids_.data() + size_; }
  std::span<const VertexId> ids() const noexcept { return {ids_.data(), std::size_t(size_)}; }

  /// Face with the i-th vertex removed.
  Simplex face(int i) const noexcept;
  /// Position of `v` in the key, or -1.
  int position(VertexId v) const noexcept;
  bool contains(VertexId v) const noexcept { return position(v) >= 0; }
  bool is_face_of(const Simplex& other) const noexcept;
  /// Smallest simplex containing both (vertex union); throws if it overflows.
  Simplex join(const Simplex& other) const;

  std::string to_string() const;

  friend bool operator==(const Simplex& a, const Simplex& b) noexcept {
    return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
  }
  friend std::strong_ordering operator<=>(const Simplex& a, const Simplex& b) noexcept {
    if (a.size_ != b.size_) return a.size_ <=> b.size_;
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
  }

 private:
  std::array<VertexId, kMaxSimplexVertices> ids_{};
  std::uint8_t size_ = 0;
};

/// Sign of the permutation sorting `ids` (0 if there is a repeat).
int permutation_sign(std::span<const VertexId> ids);

}  // namespace lpdr
