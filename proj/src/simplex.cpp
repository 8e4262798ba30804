#include "lpdr/simplex.hpp"

#include <sstream>

namespace lpdr {

Simplex::Simplex(std::span<const VertexId> ids) {
  if (ids.size() > std::size_t(kMaxSimplexVertices)) {
    throw Error(ErrorCode::kBadDimension,
                "simplex with " + std::to_string(ids.size()) + " vertices exceeds the supported maximum");
  }
  std::copy(ids.begin(), ids.end(), ids_.begin());
  size_ = std::uint8_t(ids.size());
  std::sort(ids_.begin(), ids_.begin() + size_);
  if (std::adjacent_find(ids_.begin(), ids_.begin() + size_) != ids_.begin() + size_) {
    throw Error(ErrorCode::kDegenerateSimplex, "repeated vertex id in a simplex");
  }
}

Simplex Simplex::face(int i) const noexcept {
  Simplex f;
  int out = 0;
  for (int j = 0; j < size_; ++j) {
    if (j != i) f.ids_[out++] = ids_[j];
  }
  f.size_ = std::uint8_t(out);
  return f;
}

int Simplex::position(VertexId v) const noexcept {
  const auto* it = std::lower_bound(begin(), end(), v);
  return (it != end() && *it == v) ? int(it - begin()) : -1;
}

bool Simplex::is_face_of(const Simplex& other) const noexcept {
  return std::includes(other.begin(), other.end(), begin(), end());
}

Simplex Simplex::join(const Simplex& other) const {
  std::array<VertexId, 2 * kMaxSimplexVertices> merged{};
  auto* last = std::set_union(begin(), end(), other.begin(), other.end(), merged.begin());
  return Simplex(std::span<const VertexId>(merged.data(), std::size_t(last - merged.begin())));
}

std::string Simplex::to_string() const {
  std::ostringstream out;
  out << '[';
  for (int i = 0; i < size_; ++i) out << (i ? "," : "") << ids_[i];
  out << ']';
  return out.str();
}

int permutation_sign(std::span<const VertexId> ids) {
  int sign = 1;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (ids[i] == ids[j]) return 0;
      if (ids[i] > ids[j]) sign = -sign;
    }
  }
  return sign;
}

}  // namespace lpdr
