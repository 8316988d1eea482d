#pragma once

// End-to-end weight search: pick a window, count its solutions, run the
// lackadaisical walk for the a-priori step count, measure, and read the
// measured vertex back as network weights.

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "qwnn/lackadaisical_walk.hpp"
#include "qwnn/mlp.hpp"
#include "qwnn/oracle.hpp"
#include "qwnn/random.hpp"
#include "qwnn/weight_space.hpp"

namespace qwnn {

struct TrainerConfig {
  double delta_p = 0.5;
  std::int64_t z = 2;
  std::size_t w = xor_weight_count;
  std::uint64_t l = 1;
  std::uint64_t seed = 0;
  Rounding rounding = Rounding::ceiling;
  std::uint64_t max_window_shifts = 1'000'000;
  // Start here instead of a random window around the origin.
  std::optional<LatticePoint> origin;
  // Relative standard deviation applied to k before building the walk;
  // 0 uses the exact count.
  double count_noise = 0.0;
  EnumerationOptions enumeration{};

  void validate() const {
    if (!(delta_p > 0.0) || !std::isfinite(delta_p)) throw std::invalid_argument("TrainerConfig: delta_p must be positive");
    if (z < 2) throw std::invalid_argument("TrainerConfig: z must be at least 2");
    if (w != xor_weight_count) throw std::invalid_argument("TrainerConfig: the XOR network has 9 weights");
    if (l < 1) throw std::invalid_argument("TrainerConfig: l must be at least 1");
    if (origin && origin->size() != w) throw std::invalid_argument("TrainerConfig: origin length must equal w");
    if (!(count_noise >= 0.0)) throw std::invalid_argument("TrainerConfig: count_noise must be non-negative");
    (void)window_size(z, w);
  }
};

enum class TrainStatus { measured, no_solution_window };

struct ExperimentResult {
  TrainStatus status = TrainStatus::no_solution_window;
  WeightWindow window;
  std::uint64_t shifts = 0;
  std::uint64_t N = 0;
  std::uint64_t k = 0;             // exact count from the oracle
  std::uint64_t k_used = 0;        // count that parameterized the walk
  double t_real = 0.0;
  std::uint64_t t_int = 0;
  std::uint64_t steps_applied = 0;
  FourStateVector final_state;
  OutcomeProbabilities probabilities;
  Outcome outcome = Outcome::BB;
  VertexIndex vertex = 0;
  MlpWeights weights;
  int classification_error = 4;

  bool found_solution() const { return status == TrainStatus::measured && is_solution_outcome(outcome); }
};

/// Vertex read out together with the class measurement. Each class state is a
/// uniform superposition over its vertices, so the vertex is uniform within
/// the measured class: marked vertices for AA/AB, unmarked for BA/BB.
inline VertexIndex sample_vertex(Outcome outcome, const SolutionSet& solutions, Rng& rng) {
  const std::uint64_t n = window_size(solutions.window);
  const std::uint64_t k = solutions.k();
  if (is_solution_outcome(outcome)) {
    if (k == 0) throw std::logic_error("sample_vertex: solution outcome with no marked vertices");
    std::uniform_int_distribution<std::uint64_t> pick(0, k - 1);
    return solutions.indices[pick(rng)];
  }
  if (k == n) throw std::logic_error("sample_vertex: non-solution outcome with every vertex marked");
  // r-th unmarked vertex: walk the sorted marked list to skip over it.
  std::uniform_int_distribution<std::uint64_t> pick(0, n - k - 1);
  std::uint64_t r = pick(rng);
  auto it = solutions.indices.begin();
  VertexIndex candidate = r;
  while (it != solutions.indices.end() && *it <= candidate) {
    ++candidate;
    ++it;
  }
  return candidate;
}

namespace detail {

inline std::uint64_t perturb_count(std::uint64_t k, std::uint64_t n, double noise, Rng& rng) {
  if (noise <= 0.0) return k;
  std::normal_distribution<double> gauss(0.0, noise * static_cast<double>(k));
  const double v = std::round(static_cast<double>(k) + gauss(rng));
  return static_cast<std::uint64_t>(std::clamp(v, 1.0, static_cast<double>(n - 1)));
}

}  // namespace detail

inline ExperimentResult train(const TrainerConfig& cfg) {
  cfg.validate();
  ExperimentResult res;

  WeightWindow start;
  if (cfg.origin) {
    start = WeightWindow{cfg.w, cfg.z, cfg.delta_p, *cfg.origin};
    start.validate();
  } else {
    start = random_window(cfg.w, cfg.z, cfg.delta_p, derive_seed(cfg.seed, "window"));
  }
  res.N = window_size(start);

  // Shift until a window holds at least one solution.
  ShiftSequence shifts(cfg.w);
  SolutionSet solutions;
  for (;;) {
    res.window = apply_offset(start, shifts.offset());
    solutions = enumerate_solutions(res.window, cfg.enumeration);
    if (solutions.k() > 0) break;
    if (shifts.position() >= cfg.max_window_shifts) {
      res.shifts = shifts.position();
      res.status = TrainStatus::no_solution_window;
      return res;
    }
    shifts.advance();
  }
  res.shifts = shifts.position();
  res.k = solutions.k();

  Rng measurement = make_rng(cfg.seed, "measurement");
  Rng counting = make_rng(cfg.seed, "count-noise");
  res.k_used = detail::perturb_count(res.k, res.N, cfg.count_noise, counting);

  const WalkParams params{res.N, res.k_used, cfg.l};
  const auto steps = steps_to_max(params, cfg.rounding);
  res.t_real = steps.t_real;
  res.t_int = steps.t_int;

  const auto u = build_operator(angles(params));
  FourStateVector state = initial_state(params);
  for (std::uint64_t j = 0; j < res.t_int; ++j) {
    state = apply(u, state);
    ++res.steps_applied;
  }
  res.final_state = state;
  res.probabilities = outcome_probabilities(state);

  res.outcome = sample_outcome(state, measurement);
  res.vertex = sample_vertex(res.outcome, solutions, measurement);
  res.weights = MlpWeights::from_span(index_to_weights(res.vertex, res.window));
  res.classification_error = classification_error(res.weights);
  res.status = TrainStatus::measured;
  return res;
}

inline void to_json(nlohmann::json& j, const ExperimentResult& r) {
  j = nlohmann::json{
      {"status", r.status == TrainStatus::measured ? "measured" : "no_solution_window"},
      {"window", r.window},
      {"shifts", r.shifts},
      {"N", r.N},
      {"k", r.k},
      {"k_used", r.k_used},
      {"t_theoretical", r.t_real},
      {"t_simulated", r.t_int},
      {"final_state", r.final_state.amp},
      {"probabilities", {{"AA", r.probabilities.p[0]}, {"AB", r.probabilities.p[1]}, {"BA", r.probabilities.p[2]}, {"BB", r.probabilities.p[3]}}},
      {"outcome", to_string(r.outcome)},
      {"vertex", r.vertex},
      {"weights", r.weights.w},
      {"classification_error", r.classification_error},
  };
}

/// Table-3 style row: `experiment,k,N,t_theoretical,t_simulated`.
inline void write_steps_row(std::ostream& os, const std::string& experiment, const ExperimentResult& r) {
  os << experiment << ',' << r.k << ',' << r.N << ',' << format_real(r.t_real) << ',' << r.t_int << '\n';
}

/// Table-4 style row: `experiment,p_AA,p_AB,p_BA,p_BB`.
inline void write_probability_row(std::ostream& os, const std::string& experiment, const OutcomeProbabilities& p) {
  os << experiment;
  for (double v : p.p) os << ',' << format_real(v);
  os << '\n';
}

/// One CSV row per trainer run. Weights are joined with ';' so the row stays
/// a fixed width.
inline void write_run_header(std::ostream& os) {
  os << "seed,z,status,shifts,k,N,t_theoretical,t_simulated,p_AA,p_AB,p_BA,p_BB,outcome,vertex,classification_error,weights\n";
}

inline void write_run_row(std::ostream& os, const TrainerConfig& cfg, const ExperimentResult& r) {
  os << cfg.seed << ',' << cfg.z << ',' << (r.status == TrainStatus::measured ? "measured" : "no_solution_window") << ','
     << r.shifts << ',' << r.k << ',' << r.N << ',' << format_real(r.t_real) << ',' << r.t_int;
  for (double v : r.probabilities.p) os << ',' << format_real(v);
  os << ',' << (r.status == TrainStatus::measured ? std::string(to_string(r.outcome)) : std::string()) << ',' << r.vertex << ','
     << r.classification_error << ',';
  for (std::size_t i = 0; i < r.weights.w.size(); ++i) os << (i ? ";" : "") << format_real(r.weights.w[i]);
  os << '\n';
}

}  // namespace qwnn
