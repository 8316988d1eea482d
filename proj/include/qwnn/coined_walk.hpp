#pragma once

// Hadamard-coined discrete-time quantum walks on the line and on Z^d.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qwnn/format.hpp"

namespace qwnn {

using Amplitude = std::complex<double>;

inline constexpr double inv_sqrt2 = 0.70710678118654752440;

// ---------------------------------------------------------------------------
// One dimension
// ---------------------------------------------------------------------------

/// Coin amplitudes (alpha for |0>, beta for |1>) at one lattice site.
struct CoinPair {
  Amplitude alpha;
  Amplitude beta;

  double probability() const { return std::norm(alpha) + std::norm(beta); }
  bool is_zero() const { return alpha == Amplitude{} && beta == Amplitude{}; }
};

struct CoinedWalkState1D {
  std::uint64_t t = 0;
  std::map<std::int64_t, CoinPair> amplitudes;  // sparse, sorted by position

  double norm_squared() const {
    double s = 0.0;
    for (const auto& [n, c] : amplitudes) s += c.probability();
    return s;
  }

  CoinPair at(std::int64_t n) const {
    auto it = amplitudes.find(n);
    return it == amplitudes.end() ? CoinPair{} : it->second;
  }
};

/// |0>|n=0>
inline CoinedWalkState1D init_1d_asymmetric() {
  CoinedWalkState1D s;
  s.amplitudes[0] = CoinPair{{1.0, 0.0}, {0.0, 0.0}};
  return s;
}

/// (|0> - i|1>)/sqrt(2) at n = 0; gives a mirror-symmetric distribution.
inline CoinedWalkState1D init_1d_symmetric() {
  CoinedWalkState1D s;
  s.amplitudes[0] = CoinPair{{inv_sqrt2, 0.0}, {0.0, -inv_sqrt2}};
  return s;
}

/// One application of S(H (x) I):
///   alpha'_n = (alpha_{n-1} + beta_{n-1}) / sqrt2
///   beta'_n  = (alpha_{n+1} - beta_{n+1}) / sqrt2
inline CoinedWalkState1D step_1d(const CoinedWalkState1D& state) {
  CoinedWalkState1D next;
  next.t = state.t + 1;
  for (const auto& [n, c] : state.amplitudes) {
    // Written as coin products so that the d = 1 general walker, which
    // multiplies by the Hadamard matrix entries, agrees to the last bit.
    const Amplitude up = inv_sqrt2 * c.alpha + inv_sqrt2 * c.beta;
    const Amplitude down = inv_sqrt2 * c.alpha + (-inv_sqrt2) * c.beta;
    next.amplitudes[n + 1].alpha += up;
    next.amplitudes[n - 1].beta += down;
  }
  std::erase_if(next.amplitudes, [](const auto& kv) { return kv.second.is_zero(); });
  return next;
}

inline CoinedWalkState1D evolve_1d(CoinedWalkState1D state, std::uint64_t steps) {
  for (std::uint64_t i = 0; i < steps; ++i) state = step_1d(state);
  return state;
}

/// p(n) = |alpha_n|^2 + |beta_n|^2, zero-probability sites omitted.
inline std::map<std::int64_t, double> distribution_1d(const CoinedWalkState1D& state) {
  std::map<std::int64_t, double> p;
  for (const auto& [n, c] : state.amplitudes) {
    const double v = c.probability();
    if (v > 0.0) p.emplace(n, v);
  }
  return p;
}

inline void write_distribution_csv(std::ostream& os, const std::map<std::int64_t, double>& dist) {
  os << "n,probability\n";
  for (const auto& [n, p] : dist) os << n << ',' << format_real(p) << '\n';
}

// ---------------------------------------------------------------------------
// d dimensions
// ---------------------------------------------------------------------------

using Position = std::vector<std::int64_t>;

/// Square complex matrix acting on the 2^d coin space, row-major. Coin basis
/// index i encodes the direction bits: bit m set means "move -1 along axis m".
class CoinMatrix {
 public:
  CoinMatrix() = default;
  CoinMatrix(std::size_t dim, std::vector<Amplitude> entries)
      : dim_(dim), entries_(std::move(entries)) {
    if (entries_.size() != dim_ * dim_) {
      throw std::invalid_argument("CoinMatrix: entry count does not match dimension");
    }
  }

  std::size_t dim() const { return dim_; }
  const Amplitude& operator()(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }

  /// max |(C C^dagger - I)_{rc}|
  double unitarity_defect() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
      for (std::size_t c = 0; c < dim_; ++c) {
        Amplitude s{};
        for (std::size_t j = 0; j < dim_; ++j) s += (*this)(r, j) * std::conj((*this)(c, j));
        if (r == c) s -= 1.0;
        worst = std::max(worst, std::abs(s));
      }
    }
    return worst;
  }

  static CoinMatrix hadamard() {
    return CoinMatrix(2, {inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2});
  }

  /// d-fold tensor power of the 2x2 Hadamard. Bit m of the index is axis m.
  static CoinMatrix hadamard_power(std::size_t d) {
    const std::size_t dim = std::size_t{1} << d;
    std::vector<Amplitude> e(dim * dim);
    const double scale = std::pow(inv_sqrt2, static_cast<double>(d));
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < dim; ++c) {
        const bool negative = std::popcount(r & c) % 2 == 1;
        e[r * dim + c] = negative ? -scale : scale;
      }
    }
    return CoinMatrix(dim, std::move(e));
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Amplitude> entries_;
};

struct CoinedWalkStateND {
  std::uint64_t t = 0;
  std::size_t dims = 1;
  // position -> 2^dims coin amplitudes
  std::map<Position, std::vector<Amplitude>> amplitudes;

  std::size_t coin_dim() const { return std::size_t{1} << dims; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& [x, psi] : amplitudes)
      for (const auto& a : psi) s += std::norm(a);
    return s;
  }
};

/// Walker localized at the origin in coin basis state `coin_index`.
inline CoinedWalkStateND init_nd_localized(std::size_t dims, std::size_t coin_index = 0) {
  if (dims == 0) throw std::invalid_argument("init_nd_localized: dims must be >= 1");
  CoinedWalkStateND s;
  s.dims = dims;
  if (coin_index >= s.coin_dim()) throw std::invalid_argument("init_nd_localized: coin index out of range");
  std::vector<Amplitude> psi(s.coin_dim());
  psi[coin_index] = 1.0;
  s.amplitudes.emplace(Position(dims, 0), std::move(psi));
  return s;
}

/// Promote a 1D state to the general representation (coin 0 = alpha).
inline CoinedWalkStateND to_nd(const CoinedWalkState1D& s) {
  CoinedWalkStateND out;
  out.t = s.t;
  out.dims = 1;
  for (const auto& [n, c] : s.amplitudes) out.amplitudes.emplace(Position{n}, std::vector<Amplitude>{c.alpha, c.beta});
  return out;
}

inline constexpr double coin_unitarity_tolerance = 1e-12;

/// psi'_{i;x} = sum_j C_{ij} psi_{j; x - d(i)}, where d(i)_m = +1 if bit m of
/// i is clear and -1 if set (coin 0 moves right, matching the 1D shift).
inline CoinedWalkStateND step_nd(const CoinedWalkStateND& state, const CoinMatrix& coin) {
  const std::size_t cd = state.coin_dim();
  if (coin.dim() != cd) throw std::invalid_argument("step_nd: coin dimension must be 2^d");
  if (coin.unitarity_defect() > coin_unitarity_tolerance) throw std::invalid_argument("step_nd: coin is not unitary");

  CoinedWalkStateND next;
  next.t = state.t + 1;
  next.dims = state.dims;
  Position target(state.dims);
  for (const auto& [x, psi] : state.amplitudes) {
    for (std::size_t i = 0; i < cd; ++i) {
      Amplitude acc{};
      for (std::size_t j = 0; j < cd; ++j) acc += coin(i, j) * psi[j];
      if (acc == Amplitude{}) continue;
      for (std::size_t m = 0; m < state.dims; ++m) target[m] = x[m] + (((i >> m) & 1U) ? -1 : 1);
      auto [it, inserted] = next.amplitudes.try_emplace(target, cd);
      it->second[i] += acc;
    }
  }
  std::erase_if(next.amplitudes, [](const auto& kv) {
    for (const auto& a : kv.second)
      if (a != Amplitude{}) return false;
    return true;
  });
  return next;
}

inline CoinedWalkStateND evolve_nd(CoinedWalkStateND state, const CoinMatrix& coin, std::uint64_t steps) {
  for (std::uint64_t i = 0; i < steps; ++i) state = step_nd(state, coin);
  return state;
}

inline std::map<Position, double> distribution_nd(const CoinedWalkStateND& state) {
  std::map<Position, double> p;
  for (const auto& [x, psi] : state.amplitudes) {
    double v = 0.0;
    for (const auto& a : psi) v += std::norm(a);
    if (v > 0.0) p.emplace(x, v);
  }
  return p;
}

inline void write_distribution_csv(std::ostream& os, const std::map<Position, double>& dist, std::size_t dims) {
  for (std::size_t m = 1; m <= dims; ++m) os << 'x' << m << ',';
  os << "probability\n";
  for (const auto& [x, p] : dist) {
    for (auto c : x) os << c << ',';
    os << format_real(p) << '\n';
  }
}

}  // namespace qwnn
