#pragma once

// Finite hypercubic windows over the infinite integer weight lattice.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qwnn/random.hpp"

namespace qwnn {

using VertexIndex = std::uint64_t;
using LatticePoint = std::vector<std::int64_t>;

/// z points per dimension over w dimensions. Coordinate c in [0, z) along
/// dimension j sits at lattice index origin_j + c - floor(z/2), and maps to
/// the real weight delta_p times that index.
struct WeightWindow {
  std::size_t w = 9;
  std::int64_t z = 2;
  double delta_p = 0.5;
  LatticePoint origin = LatticePoint(9, 0);

  void validate() const {
    if (w == 0) throw std::invalid_argument("WeightWindow: w must be positive");
    if (z < 1) throw std::invalid_argument("WeightWindow: z must be positive");
    if (!(delta_p > 0.0) || !std::isfinite(delta_p)) throw std::invalid_argument("WeightWindow: delta_p must be a positive real");
    if (origin.size() != w) throw std::invalid_argument("WeightWindow: origin length must equal w");
  }

  std::int64_t centering() const { return z / 2; }

  friend bool operator==(const WeightWindow&, const WeightWindow&) = default;
};

/// z^w; throws std::overflow_error if it does not fit in 64 bits.
inline std::uint64_t window_size(std::int64_t z, std::size_t w) {
  if (z < 1) throw std::invalid_argument("window_size: z must be positive");
  std::uint64_t n = 1;
  const auto zz = static_cast<std::uint64_t>(z);
  for (std::size_t i = 0; i < w; ++i) {
    if (n > std::numeric_limits<std::uint64_t>::max() / zz) {
      throw std::overflow_error("window_size: z^w overflows 64-bit index");
    }
    n *= zz;
  }
  return n;
}

inline std::uint64_t window_size(const WeightWindow& win) { return window_size(win.z, win.w); }

/// Mixed-radix base-z digits, dimension 0 least significant.
inline LatticePoint index_to_coords(VertexIndex idx, const WeightWindow& win) {
  if (idx >= window_size(win)) throw std::out_of_range("index_to_coords: index outside window");
  LatticePoint c(win.w);
  const auto z = static_cast<std::uint64_t>(win.z);
  for (std::size_t j = 0; j < win.w; ++j) {
    c[j] = static_cast<std::int64_t>(idx % z);
    idx /= z;
  }
  return c;
}

inline VertexIndex coords_to_index(const LatticePoint& coords, const WeightWindow& win) {
  if (coords.size() != win.w) throw std::invalid_argument("coords_to_index: wrong dimension");
  VertexIndex idx = 0;
  for (std::size_t j = win.w; j-- > 0;) {
    if (coords[j] < 0 || coords[j] >= win.z) throw std::out_of_range("coords_to_index: coordinate outside window");
    idx = idx * static_cast<std::uint64_t>(win.z) + static_cast<std::uint64_t>(coords[j]);
  }
  return idx;
}

/// Integer lattice position of window coordinate `c` along dimension `j`.
inline std::int64_t lattice_index(const WeightWindow& win, std::size_t j, std::int64_t c) {
  return win.origin[j] + c - win.centering();
}

inline std::vector<double> coords_to_weights(const LatticePoint& coords, const WeightWindow& win) {
  if (coords.size() != win.w) throw std::invalid_argument("coords_to_weights: wrong dimension");
  std::vector<double> out(win.w);
  for (std::size_t j = 0; j < win.w; ++j) out[j] = win.delta_p * static_cast<double>(lattice_index(win, j, coords[j]));
  return out;
}

inline std::vector<double> index_to_weights(VertexIndex idx, const WeightWindow& win) {
  return coords_to_weights(index_to_coords(idx, win), win);
}

// ---------------------------------------------------------------------------
// Window shifting
//
// Block offsets (in units of z) are enumerated ring by ring in Chebyshev
// distance from the start block. Inside ring r the candidates are the
// vectors of {-r..r}^w, ordered by the mixed-radix number whose digits are
// the zigzag codes 0, +1, -1, +2, -2, ... (dimension 0 least significant).
// So the first offsets are (0,..), (+1,0,..), (-1,0,..), (0,+1,..), ...
// ---------------------------------------------------------------------------

namespace detail {

constexpr std::int64_t zigzag_value(std::uint64_t digit) {
  return digit == 0 ? 0 : (digit % 2 == 1 ? static_cast<std::int64_t>((digit + 1) / 2) : -static_cast<std::int64_t>(digit / 2));
}

}  // namespace detail

/// Sequential enumerator of block offsets. Offset 0 is the zero vector.
class ShiftSequence {
 public:
  explicit ShiftSequence(std::size_t w) : w_(w), digits_(w, 0) {
    if (w == 0) throw std::invalid_argument("ShiftSequence: w must be positive");
  }

  /// Offset for the current position.
  LatticePoint offset() const {
    LatticePoint v(w_);
    for (std::size_t j = 0; j < w_; ++j) v[j] = detail::zigzag_value(digits_[j]);
    return v;
  }

  std::uint64_t position() const { return position_; }
  std::uint64_t ring() const { return ring_; }

  void advance() {
    if (ring_ == 0) {
      start_ring(1);
    } else {
      increment();
      while (!on_ring()) increment();
    }
    ++position_;
  }

 private:
  void start_ring(std::uint64_t r) {
    ring_ = r;
    std::fill(digits_.begin(), digits_.end(), 0);
    // first vector on the ring: digit 1 in dimension 0
    digits_[0] = 1;
    if (!on_ring()) increment_until_ring();
  }

  void increment_until_ring() {
    do increment();
    while (!on_ring());
  }

  // Odometer over base 2r+1; rolling over the top starts the next ring.
  void increment() {
    const std::uint64_t base = 2 * ring_ + 1;
    for (std::size_t j = 0; j < w_; ++j) {
      if (++digits_[j] < base) return;
      digits_[j] = 0;
    }
    start_ring(ring_ + 1);
  }

  bool on_ring() const {
    if (ring_ == 0) return true;
    for (auto d : digits_)
      if (d + 1 >= 2 * ring_) return true;  // |value| == ring
    return false;
  }

  std::size_t w_;
  std::vector<std::uint64_t> digits_;
  std::uint64_t ring_ = 0;
  std::uint64_t position_ = 0;
};

/// Block offset of the shift_index-th window (linear in shift_index).
inline LatticePoint shift_offset(std::size_t w, std::uint64_t shift_index) {
  ShiftSequence seq(w);
  for (std::uint64_t i = 0; i < shift_index; ++i) seq.advance();
  return seq.offset();
}

inline WeightWindow apply_offset(const WeightWindow& start, const LatticePoint& offset) {
  WeightWindow out = start;
  for (std::size_t j = 0; j < out.w; ++j) out.origin[j] += start.z * offset[j];
  return out;
}

inline WeightWindow shift_window(const WeightWindow& start, std::uint64_t shift_index) {
  start.validate();
  return apply_offset(start, shift_offset(start.w, shift_index));
}

/// Origin uniform on [-z, z]^w.
inline WeightWindow random_window(std::size_t w, std::int64_t z, double delta_p, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<std::int64_t> pick(-z, z);
  WeightWindow win;
  win.w = w;
  win.z = z;
  win.delta_p = delta_p;
  win.origin.assign(w, 0);
  for (auto& o : win.origin) o = pick(rng);
  win.validate();
  return win;
}

inline void to_json(nlohmann::json& j, const WeightWindow& win) {
  j = nlohmann::json{{"w", win.w}, {"z", win.z}, {"delta_p", win.delta_p}, {"origin", win.origin}};
}

inline void from_json(const nlohmann::json& j, WeightWindow& win) {
  j.at("w").get_to(win.w);
  j.at("z").get_to(win.z);
  j.at("delta_p").get_to(win.delta_p);
  j.at("origin").get_to(win.origin);
  win.validate();
}

}  // namespace qwnn
