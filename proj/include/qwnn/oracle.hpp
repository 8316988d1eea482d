#pragma once

// Classical stand-in for the search oracle: a vertex is marked when its
// window weights make the 2-2-1 network classify all four XOR patterns.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qwnn/mlp.hpp"
#include "qwnn/weight_space.hpp"

namespace qwnn {

inline constexpr std::size_t xor_weight_count = 9;
inline constexpr std::uint64_t default_vertex_cap = std::uint64_t{1} << 30;

struct SolutionSet {
  WeightWindow window;
  std::vector<VertexIndex> indices;  // strictly increasing

  std::uint64_t k() const { return indices.size(); }
  bool contains(VertexIndex idx) const { return std::binary_search(indices.begin(), indices.end(), idx); }
  friend bool operator==(const SolutionSet&, const SolutionSet&) = default;
};

inline std::uint64_t count_solutions(const SolutionSet& s) { return s.k(); }

inline void require_xor_window(const WeightWindow& win) {
  win.validate();
  if (win.w != xor_weight_count) throw std::invalid_argument("oracle: XOR network needs a 9-dimensional window");
}

inline bool evaluate_vertex(VertexIndex idx, const WeightWindow& win) {
  require_xor_window(win);
  return classification_error(MlpWeights::from_span(index_to_weights(idx, win))) == 0;
}

struct EnumerationOptions {
  unsigned jobs = 1;
  std::uint64_t vertex_cap = default_vertex_cap;
  bool allow_large = false;  // lift vertex_cap
};

inline void check_vertex_cap(std::uint64_t n, const EnumerationOptions& opt) {
  if (n > opt.vertex_cap && !opt.allow_large) {
    throw std::length_error("enumerate_solutions: window has " + std::to_string(n) + " vertices, above the cap of " +
                            std::to_string(opt.vertex_cap) + "; pass the override to proceed");
  }
}

/// Straightforward per-vertex scan. Kept as the reference for the factored
/// enumerator below.
inline SolutionSet enumerate_solutions_reference(const WeightWindow& win,
                                                 const EnumerationOptions& opt = {}) {
  require_xor_window(win);
  const std::uint64_t n = window_size(win);
  check_vertex_cap(n, opt);
  SolutionSet out{win, {}};
  for (VertexIndex idx = 0; idx < n; ++idx)
    if (evaluate_vertex(idx, win)) out.indices.push_back(idx);
  return out;
}

namespace detail {

// Activations of one hidden neuron for all z^3 settings of its three weights,
// one row per XOR pattern, columns indexed like the low-order digits of a
// vertex index.
inline std::array<std::vector<double>, 4> hidden_table(const WeightWindow& win, std::size_t first_dim) {
  const auto z = static_cast<std::size_t>(win.z);
  std::array<std::vector<double>, 4> table;
  for (auto& row : table) row.resize(z * z * z);
  for (std::size_t c2 = 0; c2 < z; ++c2)
    for (std::size_t c1 = 0; c1 < z; ++c1)
      for (std::size_t c0 = 0; c0 < z; ++c0) {
        const double wa = win.delta_p * static_cast<double>(lattice_index(win, first_dim, static_cast<std::int64_t>(c0)));
        const double wb = win.delta_p * static_cast<double>(lattice_index(win, first_dim + 1, static_cast<std::int64_t>(c1)));
        const double th = win.delta_p * static_cast<double>(lattice_index(win, first_dim + 2, static_cast<std::int64_t>(c2)));
        const std::size_t col = c0 + z * (c1 + z * c2);
        for (std::size_t p = 0; p < 4; ++p) {
          const auto& pat = XorDataset::patterns[p];
          table[p][col] = hidden_activation(wa, wb, th, pat.x0, pat.x1);
        }
      }
  return table;
}

}  // namespace detail

/// Exact solution set of an XOR window.
///
/// The nine weights split into three neurons of three weights each, so a
/// vertex index factors as a + z^3 b + z^6 c with a, b, c selecting the
/// settings of hidden neuron 1, hidden neuron 2 and the output neuron. Hidden
/// activations are tabulated once per neuron; each vertex then costs four
/// output evaluations. The arithmetic is the same as forward(), so results
/// agree bit for bit with the reference scan. Work is split over `jobs`
/// threads by output-neuron setting and merged in index order.
inline SolutionSet enumerate_solutions(const WeightWindow& win, const EnumerationOptions& opt = {}) {
  require_xor_window(win);
  const std::uint64_t n = window_size(win);
  check_vertex_cap(n, opt);

  const auto z = static_cast<std::uint64_t>(win.z);
  const std::uint64_t block = z * z * z;
  const auto h1 = detail::hidden_table(win, 0);
  const auto h2 = detail::hidden_table(win, 3);
  static_assert(XorDataset::patterns[0].target == 0 && XorDataset::patterns[1].target == 1 &&
                XorDataset::patterns[2].target == 1 && XorDataset::patterns[3].target == 0);

  // Per-pattern extremes of the hidden tables. Rounded multiplication and
  // addition are monotone, so output_value() evaluated at the extremes bounds
  // every output the scan can compute; blocks whose bounds already violate a
  // target are skipped without changing the result.
  struct Range {
    double lo, hi;
  };
  auto ranges = [](const std::array<std::vector<double>, 4>& t) {
    std::array<Range, 4> r{};
    for (std::size_t p = 0; p < 4; ++p) {
      const auto [mn, mx] = std::minmax_element(t[p].begin(), t[p].end());
      r[p] = {*mn, *mx};
    }
    return r;
  };
  const auto r1 = ranges(h1);
  const auto r2 = ranges(h2);
  auto pick = [](double w, Range r, bool upper) { return (w >= 0.0) == upper ? r.hi : r.lo; };
  auto feasible = [&](double wa, double wb, double th, std::size_t p, Range ha, Range hb) {
    if (XorDataset::patterns[p].target == 1)
      return output_value(wa, wb, th, pick(wa, ha, true), pick(wb, hb, true)) >= class_threshold;
    return output_value(wa, wb, th, pick(wa, ha, false), pick(wb, hb, false)) < class_threshold;
  };

  auto scan = [&](std::uint64_t c_begin, std::uint64_t c_end, std::vector<VertexIndex>& found) {
    for (std::uint64_t c = c_begin; c < c_end; ++c) {
      const double wa = win.delta_p * static_cast<double>(lattice_index(win, 6, static_cast<std::int64_t>(c % z)));
      const double wb = win.delta_p * static_cast<double>(lattice_index(win, 7, static_cast<std::int64_t>((c / z) % z)));
      const double th = win.delta_p * static_cast<double>(lattice_index(win, 8, static_cast<std::int64_t>(c / (z * z))));
      bool possible = true;
      for (std::size_t p = 0; p < 4 && possible; ++p) possible = feasible(wa, wb, th, p, r1[p], r2[p]);
      if (!possible) continue;
      for (std::uint64_t b = 0; b < block; ++b) {
        const double b0 = h2[0][b], b1 = h2[1][b], b2 = h2[2][b], b3 = h2[3][b];
        if (!feasible(wa, wb, th, 0, r1[0], {b0, b0}) || !feasible(wa, wb, th, 1, r1[1], {b1, b1}) ||
            !feasible(wa, wb, th, 2, r1[2], {b2, b2}) || !feasible(wa, wb, th, 3, r1[3], {b3, b3}))
          continue;
        for (std::uint64_t a = 0; a < block; ++a) {
          if (output_value(wa, wb, th, h1[0][a], b0) >= class_threshold) continue;
          if (output_value(wa, wb, th, h1[1][a], b1) < class_threshold) continue;
          if (output_value(wa, wb, th, h1[2][a], b2) < class_threshold) continue;
          if (output_value(wa, wb, th, h1[3][a], b3) >= class_threshold) continue;
          found.push_back(a + block * (b + block * c));
        }
      }
    }
  };

  const unsigned jobs = std::max(1U, std::min<unsigned>(opt.jobs, static_cast<unsigned>(block)));
  std::vector<std::vector<VertexIndex>> parts(jobs);
  if (jobs == 1) {
    scan(0, block, parts[0]);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) {
      const std::uint64_t lo = block * t / jobs;
      const std::uint64_t hi = block * (t + 1) / jobs;
      workers.emplace_back([&, lo, hi, t] { scan(lo, hi, parts[t]); });
    }
  }

  SolutionSet out{win, {}};
  for (auto& p : parts) out.indices.insert(out.indices.end(), p.begin(), p.end());
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const SolutionSet& s) {
  j = nlohmann::json{{"window", s.window}, {"k", s.k()}, {"indices", s.indices}};
}

inline void from_json(const nlohmann::json& j, SolutionSet& s) {
  j.at("window").get_to(s.window);
  j.at("indices").get_to(s.indices);
  if (j.contains("k") && j.at("k").get<std::uint64_t>() != s.indices.size())
    throw std::runtime_error("SolutionSet: k does not match index count");
  if (!std::is_sorted(s.indices.begin(), s.indices.end()) ||
      std::adjacent_find(s.indices.begin(), s.indices.end()) != s.indices.end())
    throw std::runtime_error("SolutionSet: indices must be strictly increasing");
}

// Binary layout, all integers little-endian:
//   magic "QWSOLSET" | u32 version=1 | u32 w | i64 z | f64 delta_p |
//   i64 origin[w] | u64 k | u64 payload_bytes | payload
// The payload holds k unsigned LEB128 varints: the first index, then the
// gaps between consecutive indices.
inline constexpr char solution_set_magic[8] = {'Q', 'W', 'S', 'O', 'L', 'S', 'E', 'T'};

namespace detail {

template <class T>
void put_le(std::string& out, T v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw std::runtime_error("SolutionSet: truncated binary input");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  T v;
  std::memcpy(&v, &bits, sizeof(T));
  return v;
}

}  // namespace detail

inline void write_solution_set_binary(std::ostream& os, const SolutionSet& s) {
  std::string payload;
  VertexIndex prev = 0;
  for (VertexIndex idx : s.indices) {
    std::uint64_t gap = idx - prev;
    prev = idx;
    do {
      unsigned char byte = gap & 0x7F;
      gap >>= 7;
      if (gap) byte |= 0x80;
      payload.push_back(static_cast<char>(byte));
    } while (gap);
  }

  std::string head(solution_set_magic, sizeof(solution_set_magic));
  detail::put_le<std::uint32_t>(head, 1);
  detail::put_le<std::uint32_t>(head, static_cast<std::uint32_t>(s.window.w));
  detail::put_le<std::int64_t>(head, s.window.z);
  detail::put_le<double>(head, s.window.delta_p);
  for (auto o : s.window.origin) detail::put_le<std::int64_t>(head, o);
  detail::put_le<std::uint64_t>(head, s.indices.size());
  detail::put_le<std::uint64_t>(head, payload.size());
  os.write(head.data(), static_cast<std::streamsize>(head.size()));
  os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

inline SolutionSet read_solution_set_binary(std::istream& in) {
  char magic[sizeof(solution_set_magic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, solution_set_magic, sizeof(magic)) != 0)
    throw std::runtime_error("SolutionSet: bad magic");
  if (detail::get_le<std::uint32_t>(in) != 1) throw std::runtime_error("SolutionSet: unsupported version");
  SolutionSet s;
  s.window.w = detail::get_le<std::uint32_t>(in);
  s.window.z = detail::get_le<std::int64_t>(in);
  s.window.delta_p = detail::get_le<double>(in);
  s.window.origin.resize(s.window.w);
  for (auto& o : s.window.origin) o = detail::get_le<std::int64_t>(in);
  s.window.validate();
  const auto k = detail::get_le<std::uint64_t>(in);
  const auto payload_bytes = detail::get_le<std::uint64_t>(in);
  std::string payload(payload_bytes, '\0');
  if (!in.read(payload.data(), static_cast<std::streamsize>(payload_bytes)))
    throw std::runtime_error("SolutionSet: truncated payload");

  s.indices.reserve(k);
  std::size_t pos = 0;
  VertexIndex prev = 0;
  for (std::uint64_t i = 0; i < k; ++i) {
    std::uint64_t gap = 0;
    for (unsigned shift = 0;; shift += 7) {
      if (pos >= payload.size() || shift > 63) throw std::runtime_error("SolutionSet: malformed varint");
      const auto byte = static_cast<unsigned char>(payload[pos++]);
      gap |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
      if (!(byte & 0x80)) break;
    }
    if (i > 0 && gap == 0) throw std::runtime_error("SolutionSet: duplicate index");
    prev += gap;
    s.indices.push_back(prev);
  }
  if (pos != payload.size()) throw std::runtime_error("SolutionSet: trailing payload bytes");
  return s;
}

}  // namespace qwnn
