#pragma once

// Lackadaisical quantum walk search on the complete graph, simulated in the
// four-dimensional invariant subspace spanned by |AA>, |AB>, |BA>, |BB>
// (vertex class of the walker, class of the vertex its edge points to).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qwnn/format.hpp"
#include "qwnn/random.hpp"

namespace qwnn {

enum class Outcome : std::uint8_t { AA = 0, AB = 1, BA = 2, BB = 3 };

inline constexpr std::array<Outcome, 4> all_outcomes{Outcome::AA, Outcome::AB, Outcome::BA, Outcome::BB};

constexpr std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::AA: return "AA";
    case Outcome::AB: return "AB";
    case Outcome::BA: return "BA";
    case Outcome::BB: return "BB";
  }
  return "?";
}

/// AA and AB both leave the walker on a marked vertex.
constexpr bool is_solution_outcome(Outcome o) { return o == Outcome::AA || o == Outcome::AB; }

/// N vertices, k of them marked, l self-loops on every vertex.
struct WalkParams {
  std::uint64_t N = 0;
  std::uint64_t k = 0;
  std::uint64_t l = 1;

  void validate() const {
    if (N < 2) throw std::invalid_argument("WalkParams: N must be at least 2");
    if (k < 1 || k >= N) throw std::invalid_argument("WalkParams: k must satisfy 1 <= k < N");
    if (l < 1) throw std::invalid_argument("WalkParams: l must be at least 1");
  }
};

struct Angles {
  double cos_theta = 1.0;
  double sin_theta = 0.0;
  double cos_phi = 1.0;
  double sin_phi = 0.0;
};

/// Closed forms only; no inverse-trig round trips.
inline Angles angles(const WalkParams& p) {
  p.validate();
  const auto N = static_cast<double>(p.N);
  const auto k = static_cast<double>(p.k);
  const auto l = static_cast<double>(p.l);
  const double denom = N + l - 1.0;
  Angles a;
  a.cos_theta = (N - 2.0 * k - l + 1.0) / denom;
  a.sin_theta = 2.0 * std::sqrt(N - k) * std::sqrt(k + l - 1.0) / denom;
  a.cos_phi = (N - 2.0 * k + l - 1.0) / denom;
  a.sin_phi = 2.0 * std::sqrt(k) * std::sqrt(N - k + l - 1.0) / denom;
  return a;
}

using Matrix4 = std::array<std::array<double, 4>, 4>;

/// Basis order (AA, AB, BA, BB).
struct EvolutionOperator {
  Matrix4 m{};

  double operator()(std::size_t r, std::size_t c) const { return m[r][c]; }

  /// max |(U U^T - I)_{rc}|
  double orthogonality_defect() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) {
        double s = 0.0;
        for (std::size_t j = 0; j < 4; ++j) s += m[r][j] * m[c][j];
        worst = std::max(worst, std::abs(s - (r == c ? 1.0 : 0.0)));
      }
    return worst;
  }
};

// Oracle sign flip on marked vertices followed by the edge swap
// |x>|x->y> -> |y>|y->x>, restricted to the four class states.
inline EvolutionOperator build_operator(const Angles& a) {
  EvolutionOperator u;
  u.m = {{
      {a.cos_theta, -a.sin_theta, 0.0, 0.0},
      {0.0, 0.0, -a.cos_phi, a.sin_phi},
      {-a.sin_theta, -a.cos_theta, 0.0, 0.0},
      {0.0, 0.0, a.sin_phi, a.cos_phi},
  }};
  return u;
}

struct FourStateVector {
  std::array<double, 4> amp{};  // lambda_AA, lambda_AB, lambda_BA, lambda_BB

  double operator[](Outcome o) const { return amp[static_cast<std::size_t>(o)]; }
  double norm_squared() const { return amp[0] * amp[0] + amp[1] * amp[1] + amp[2] * amp[2] + amp[3] * amp[3]; }
  friend bool operator==(const FourStateVector&, const FourStateVector&) = default;
};

/// Uniform superposition over all N(N+l-1) directed edge states, grouped by
/// class. At l = 1 this is (k, sqrt(k(N-k)), sqrt(k(N-k)), N-k)/N; at k = 1
/// it is (sqrt(l), sqrt(N-1), sqrt(N-1), sqrt((N-1)(N+l-2)))/sqrt(N(N+l-1)).
inline FourStateVector initial_state(const WalkParams& p) {
  p.validate();
  const auto N = static_cast<double>(p.N);
  const auto k = static_cast<double>(p.k);
  const auto l = static_cast<double>(p.l);
  const double scale = std::sqrt(N) * std::sqrt(N + l - 1.0);
  const double cross = std::sqrt(k) * std::sqrt(N - k) / scale;
  return FourStateVector{{std::sqrt(k) * std::sqrt(k + l - 1.0) / scale, cross, cross,
                          std::sqrt(N - k) * std::sqrt(N - k + l - 1.0) / scale}};
}

enum class Rounding { floor, ceiling, nearest };

inline Rounding parse_rounding(std::string_view s) {
  if (s == "floor") return Rounding::floor;
  if (s == "ceiling" || s == "ceil") return Rounding::ceiling;
  if (s == "nearest") return Rounding::nearest;
  throw std::invalid_argument("unknown rounding mode: " + std::string(s));
}

constexpr std::string_view to_string(Rounding r) {
  switch (r) {
    case Rounding::floor: return "floor";
    case Rounding::ceiling: return "ceiling";
    case Rounding::nearest: return "nearest";
  }
  return "?";
}

struct StepCount {
  double t_real = 0.0;
  std::uint64_t t_int = 0;
};

/// Number of steps at which the success probability peaks:
/// t = pi * sqrt(N) / sqrt(2(2k + l - 1)).
inline StepCount steps_to_max(const WalkParams& p, Rounding mode = Rounding::ceiling) {
  p.validate();
  const double t = std::numbers::pi * std::sqrt(static_cast<double>(p.N)) /
                   std::sqrt(2.0 * static_cast<double>(2 * p.k + p.l - 1));
  double r = 0.0;
  switch (mode) {
    case Rounding::floor: r = std::floor(t); break;
    case Rounding::ceiling: r = std::ceil(t); break;
    case Rounding::nearest: r = std::round(t); break;
  }
  return {t, static_cast<std::uint64_t>(r)};
}

inline FourStateVector apply(const EvolutionOperator& u, const FourStateVector& v) {
  FourStateVector out;
  for (std::size_t r = 0; r < 4; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < 4; ++c) s += u.m[r][c] * v.amp[c];
    out.amp[r] = s;
  }
  return out;
}

/// Applies `u` exactly `steps` times. There is no convergence test.
inline FourStateVector evolve(FourStateVector state, const EvolutionOperator& u, std::uint64_t steps) {
  for (std::uint64_t j = 0; j < steps; ++j) state = apply(u, state);
  return state;
}

struct OutcomeProbabilities {
  std::array<double, 4> p{};

  double operator[](Outcome o) const { return p[static_cast<std::size_t>(o)]; }
  double success() const { return p[0] + p[1]; }
  double total() const { return p[0] + p[1] + p[2] + p[3]; }
};

inline OutcomeProbabilities outcome_probabilities(const FourStateVector& s) {
  OutcomeProbabilities out;
  for (std::size_t i = 0; i < 4; ++i) out.p[i] = s.amp[i] * s.amp[i];
  return out;
}

/// Projective measurement in the class basis.
inline Outcome sample_outcome(const FourStateVector& s, Rng& rng) {
  const auto probs = outcome_probabilities(s);
  std::uniform_real_distribution<double> u01(0.0, probs.total());
  const double r = u01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    acc += probs.p[i];
    if (r < acc) return all_outcomes[i];
  }
  // Land on the last outcome with nonzero weight.
  for (std::size_t i = 4; i-- > 0;)
    if (probs.p[i] > 0.0) return all_outcomes[i];
  return Outcome::AA;
}

/// CSV `t,p_AA,p_AB,p_BA,p_BB` for t = 0..steps.
inline void write_probability_trace_csv(std::ostream& os, const WalkParams& p, std::uint64_t steps) {
  const auto u = build_operator(angles(p));
  auto state = initial_state(p);
  os << "t,p_AA,p_AB,p_BA,p_BB\n";
  for (std::uint64_t t = 0;; ++t) {
    const auto pr = outcome_probabilities(state);
    os << t;
    for (double v : pr.p) os << ',' << format_real(v);
    os << '\n';
    if (t == steps) break;
    state = apply(u, state);
  }
}

}  // namespace qwnn
