#pragma once

// Experiment drivers shared by the `reproduce` command and the acceptance
// binary: published reference numbers, the acceptance criteria, and the
// table/figure writers.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qwnn/coined_walk.hpp"
#include "qwnn/format.hpp"
#include "qwnn/lackadaisical_walk.hpp"
#include "qwnn/mlp.hpp"
#include "qwnn/oracle.hpp"
#include "qwnn/random.hpp"
#include "qwnn/trainer.hpp"
#include "qwnn/weight_space.hpp"

namespace qwnn {

/// Runs fn(0..n-1) on up to `jobs` threads. Each index owns its output slot,
/// so results do not depend on the job count.
inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) {
      pool.emplace_back([&, j] {
        try {
          for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        } catch (...) {
          errors[j] = std::current_exception();
          next = n;
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Published reference values
// ---------------------------------------------------------------------------

struct StepReference {
  int experiment;
  std::uint64_t k;
  std::uint64_t N;
  double t_theoretical;
  std::uint64_t t_simulated;
  double tolerance;
  const char* note;
};

inline const std::vector<StepReference>& step_references() {
  static const std::vector<StepReference> rows{
      {1, 12, 512, 10.26, 11, 0.01, ""},
      {2, 12, 512, 10.26, 11, 0.01, ""},
      {3, 17, 262144, 195.83, 196, 1.0,
       "known discrepancy: the step formula gives 195.06 for k=17, N=262144; the published 195.83 is kept inside a 1.0 band"},
      {4, 20, 262144, 179.83, 180, 0.01, ""},
      {5, 80295, 134217728, 64.22, 65, 0.01, ""},
  };
  return rows;
}

struct ProbabilityReference {
  int experiment;
  std::uint64_t k;
  std::uint64_t N;
  std::uint64_t t;
  std::array<double, 4> p;
};

inline const std::vector<ProbabilityReference>& probability_references() {
  static const std::vector<ProbabilityReference> rows{
      {1, 12, 512, 11, {0.9548, 0.0307, 0.0140, 0.0005}},
      {2, 12, 512, 11, {0.9503, 0.0367, 0.0126, 0.0004}},
      {3, 17, 262144, 196, {1.0, 0.0, 0.0, 0.0}},
      {4, 20, 262144, 180, {0.9999, 0.0, 0.0001, 0.0}},
      {5, 80295, 134217728, 65, {0.9988, 0.0010, 0.0002, 0.0}},
  };
  return rows;
}

inline constexpr double probability_tolerance = 0.02;

struct BackpropReference {
  double lr;
  std::uint64_t epoch_limit_hits;
  std::uint64_t successes;
  std::uint64_t runs;
  double min, mean, max, stddev;
};

inline const std::vector<BackpropReference>& backprop_references() {
  static const std::vector<BackpropReference> rows{
      {0.5, 0, 1200, 1200, 1, 33.60, 319, 35.68},
      {0.1, 0, 1200, 1200, 3, 433.84, 3279, 463.78},
      {0.01, 452, 748, 1200, 2, 5277.48, 132199, 17927.67},
      {0.001, 467, 733, 1200, 9, 12949.18, 148256, 22451.79},
      {0.0001, 726, 474, 1200, 295, 46987.00, 149644, 36780.22},
  };
  return rows;
}

// ---------------------------------------------------------------------------
// Acceptance criteria
// ---------------------------------------------------------------------------

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = true;
  bool skipped = false;
  double seconds = 0.0;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) passed = false;
    notes.push_back(std::string(ok ? "ok: " : "FAILED: ") + what);
  }
  void note(const std::string& what) { notes.push_back(what); }
};

struct AcceptanceOptions {
  bool heavy = false;
  unsigned jobs = 1;
  std::uint64_t seed = 1;
  std::size_t training_runs = 1000;
};

namespace detail {

inline std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline void expect_runtime(CriterionResult& r, double seconds, double budget) {
  r.seconds = seconds;
  r.expect(seconds < budget, "runtime " + fmt(seconds, 3) + " s < " + fmt(budget) + " s");
}

}  // namespace detail

inline CriterionResult criterion_toy_exactness() {
  CriterionResult r{1, "toy search collapses onto the marked class"};
  detail::Stopwatch sw;
  const WalkParams p{8, 2, 1};
  const auto s0 = initial_state(p);
  const std::array<double, 4> expected{2.0 / 8.0, std::sqrt(12.0) / 8.0, std::sqrt(12.0) / 8.0, 6.0 / 8.0};
  double init_err = 0.0;
  for (std::size_t i = 0; i < 4; ++i) init_err = std::max(init_err, std::abs(s0.amp[i] - expected[i]));
  const auto s3 = evolve(s0, build_operator(angles(p)), 3);
  const double p_aa = outcome_probabilities(s3).p[0];
  const double elapsed = sw.seconds();
  r.expect(init_err < 1e-12, "initial state (2, sqrt12, sqrt12, 6)/8, max error " + detail::fmt(init_err));
  r.expect(std::abs(p_aa - 1.0) < 1e-9, "p_AA after 3 steps = " + detail::fmt(p_aa, 17));
  detail::expect_runtime(r, elapsed, 1e-3);
  return r;
}

inline CriterionResult criterion_step_formula() {
  CriterionResult r{2, "step count formula and ceiling rounding"};
  detail::Stopwatch sw;
  for (const auto& row : step_references()) {
    const auto sc = steps_to_max({row.N, row.k, 1}, Rounding::ceiling);
    const std::string tag = "(N=" + std::to_string(row.N) + ", k=" + std::to_string(row.k) + ")";
    r.expect(std::abs(sc.t_real - row.t_theoretical) <= row.tolerance,
             tag + " t = " + detail::fmt(sc.t_real, 8) + " vs published " + detail::fmt(row.t_theoretical) + " +/- " +
                 detail::fmt(row.tolerance));
    r.expect(sc.t_int == row.t_simulated, tag + " ceiling t = " + std::to_string(sc.t_int));
    if (row.k == 17) {
      r.expect(std::abs(sc.t_real - 195.06) < 0.01, tag + " recomputed value 195.06 (published 195.83 flagged)");
    }
  }
  r.seconds = sw.seconds();
  return r;
}

inline CriterionResult criterion_subspace_probabilities() {
  CriterionResult r{3, "four-state walk probabilities"};
  struct Case {
    std::uint64_t N, k, t;
  };
  for (const auto& c : {Case{512, 12, 11}, Case{262144, 20, 180}, Case{134217728, 80295, 65}}) {
    detail::Stopwatch sw;
    const WalkParams p{c.N, c.k, 1};
    const auto pr = outcome_probabilities(evolve(initial_state(p), build_operator(angles(p)), c.t));
    const double elapsed = sw.seconds();
    const std::string tag = "(N=" + std::to_string(c.N) + ", k=" + std::to_string(c.k) + ", t=" + std::to_string(c.t) + ")";
    if (c.N == 512) {
      r.expect(std::abs(pr.p[0] - 0.9548) <= probability_tolerance, tag + " p_AA = " + detail::fmt(pr.p[0]) + " within 2 pp of 0.9548");
      r.expect(pr.success() >= 0.98, tag + " p_AA + p_AB = " + detail::fmt(pr.success()));
    } else if (c.N == 262144) {
      r.expect(pr.p[0] >= 0.999, tag + " p_AA = " + detail::fmt(pr.p[0]));
    } else {
      r.expect(pr.p[0] >= 0.99, tag + " p_AA = " + detail::fmt(pr.p[0]));
    }
    r.expect(elapsed < 1.0, tag + " runtime " + detail::fmt(elapsed, 3) + " s");
    r.seconds += elapsed;
  }
  return r;
}

inline CriterionResult criterion_line_walk() {
  CriterionResult r{4, "Hadamard walk on the line"};
  detail::Stopwatch sw;
  const double c = inv_sqrt2 / 2.0;
  const auto s3 = evolve_1d(init_1d_asymmetric(), 3);
  const auto close = [](Amplitude a, double v) { return std::abs(a - Amplitude{v, 0.0}) < 1e-12; };
  r.expect(close(s3.at(3).alpha, c) && close(s3.at(3).beta, 0.0) && close(s3.at(1).alpha, 2 * c) &&
               close(s3.at(1).beta, c) && close(s3.at(-1).alpha, -c) && close(s3.at(-1).beta, 0.0) &&
               close(s3.at(-3).alpha, 0.0) && close(s3.at(-3).beta, c) && s3.amplitudes.size() == 4,
           "three-step amplitudes from |0>|0> exact to 1e-12");
  const auto s2 = evolve_1d(init_1d_asymmetric(), 2);
  r.expect(close(s2.at(2).alpha, 0.5) && close(s2.at(0).alpha, 0.5) && close(s2.at(0).beta, 0.5) &&
               close(s2.at(-2).beta, -0.5),
           "two-step amplitudes exact to 1e-12");

  for (bool symmetric : {false, true}) {
    const auto s = evolve_1d(symmetric ? init_1d_symmetric() : init_1d_asymmetric(), 100);
    const auto d = distribution_1d(s);
    const std::string tag = symmetric ? "symmetric start" : "asymmetric start";
    r.expect(std::abs(s.norm_squared() - 1.0) <= 1e-10, tag + " norm at t=100 = " + detail::fmt(s.norm_squared(), 17));
    const auto peak = std::max_element(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    r.expect(std::abs(peak->first) >= 60 && std::abs(peak->first) <= 80, tag + " peak at n = " + std::to_string(peak->first));
    if (symmetric) {
      double mirror = 0.0;
      for (const auto& [n, pn] : d) mirror = std::max(mirror, std::abs(pn - d.at(-n)));
      r.expect(mirror <= 1e-15, "mirror symmetry p(n) = p(-n), max difference " + detail::fmt(mirror));
    }
  }
  detail::expect_runtime(r, sw.seconds(), 1.0);
  return r;
}

/// Seeded trainer runs at z = 2, Δp = 0.5, l = 1.
inline std::vector<ExperimentResult> training_batch(std::uint64_t first_seed, std::size_t runs, unsigned jobs,
                                                    std::int64_t z = 2) {
  std::vector<ExperimentResult> out(runs);
  parallel_for(runs, jobs, [&](std::size_t i) {
    TrainerConfig cfg;
    cfg.z = z;
    cfg.seed = first_seed + i;
    cfg.enumeration.allow_large = true;
    out[i] = train(cfg);
  });
  return out;
}

inline CriterionResult criterion_end_to_end(const AcceptanceOptions& opt) {
  CriterionResult r{5, "end-to-end weight search at z=2"};
  detail::Stopwatch sw;
  const auto results = training_batch(opt.seed, opt.training_runs, opt.jobs);
  const double elapsed = sw.seconds();
  std::size_t measured = 0, solution = 0, bad = 0;
  for (const auto& e : results) {
    if (e.status != TrainStatus::measured) continue;
    ++measured;
    if (e.found_solution()) {
      ++solution;
      if (e.classification_error != 0) ++bad;
    }
  }
  const double frac = results.empty() ? 0.0 : static_cast<double>(solution) / static_cast<double>(results.size());
  r.expect(measured == results.size(), std::to_string(measured) + "/" + std::to_string(results.size()) + " runs found a solvable window");
  r.expect(bad == 0, std::to_string(bad) + " solution outcomes with nonzero XOR error");
  r.expect(frac >= 0.95, "solution-outcome fraction " + detail::fmt(frac) + " >= 0.95");
  detail::expect_runtime(r, elapsed, 60.0);
  return r;
}

inline CriterionResult criterion_oracle_equivalence(unsigned jobs) {
  CriterionResult r{6, "parallel oracle matches the serial scan"};
  detail::Stopwatch sw;
  const WeightWindow win{xor_weight_count, 2, 0.5, {2, -3, 3, -1, 4, 2, 4, 4, 2}};
  const auto serial = enumerate_solutions_reference(win);
  const auto parallel = enumerate_solutions(win, EnumerationOptions{std::max(jobs, 4U)});
  r.expect(serial.k() > 0, "window holds " + std::to_string(serial.k()) + " solutions");
  r.expect(parallel == serial, "parallel and serial solution lists identical");
  bool all_verify = true;
  for (auto idx : parallel.indices) all_verify = all_verify && classification_error(MlpWeights::from_span(index_to_weights(idx, win))) == 0;
  r.expect(all_verify, "every listed vertex classifies XOR with zero error");
  detail::expect_runtime(r, sw.seconds(), 1.0);
  return r;
}

inline std::vector<TrainResult> backprop_batch(double lr, std::uint64_t first_seed, std::size_t runs, unsigned jobs) {
  std::vector<TrainResult> out(runs);
  parallel_for(runs, jobs, [&](std::size_t i) {
    BackpropConfig cfg;
    cfg.learning_rate = lr;
    cfg.seed = first_seed + i;
    out[i] = backprop_train(cfg);
  });
  return out;
}

inline CriterionResult criterion_backprop_trends(const AcceptanceOptions& opt) {
  CriterionResult r{7, "backpropagation baseline trends"};
  detail::Stopwatch sw;
  const auto fast = summarize(backprop_batch(0.5, opt.seed, 100, opt.jobs));
  r.expect(fast.successes >= 95, "lr=0.5: " + std::to_string(fast.successes) + "/100 successes");
  r.expect(fast.mean < 5000.0, "lr=0.5: mean epochs " + detail::fmt(fast.mean));
  const auto slow = summarize(backprop_batch(0.0001, opt.seed, 20, opt.jobs));
  r.expect(slow.mean >= 50.0 * fast.mean || slow.epoch_limit_hits > 0,
           "lr=0.0001: " + std::to_string(slow.successes) + "/20 successes (mean epochs " + detail::fmt(slow.mean) +
               "), epoch-limit hits " + std::to_string(slow.epoch_limit_hits));

  Rng rng = make_rng(opt.seed, "gradient-check");
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    MlpWeights m;
    for (auto& v : m.w) v = u(rng);
    const auto g = mse_gradient(m);
    for (std::size_t i = 0; i < 9; ++i) {
      const double h = 1e-6;
      MlpWeights up = m, down = m;
      up[i] += h;
      down[i] -= h;
      const double fd = (mse(up) - mse(down)) / (2.0 * h);
      worst = std::max(worst, std::abs(g[i] - fd) / std::max(1.0, std::abs(g[i])));
    }
  }
  r.expect(worst <= 1e-6, "gradient vs central differences at 100 points, worst relative error " + detail::fmt(worst));
  detail::expect_runtime(r, sw.seconds(), 300.0);
  return r;
}

inline CriterionResult criterion_invariants(const AcceptanceOptions& opt) {
  CriterionResult r{8, "invariant suite"};
  detail::Stopwatch sw;
  Rng rng = make_rng(opt.seed, "invariants");

  auto random_params = [&] {
    std::uniform_int_distribution<int> bits(1, 40);
    const std::uint64_t N = std::max<std::uint64_t>(2, std::uniform_int_distribution<std::uint64_t>(2, std::uint64_t{1} << bits(rng))(rng));
    const std::uint64_t k = std::uniform_int_distribution<std::uint64_t>(1, N - 1)(rng);
    const std::uint64_t l = std::uniform_int_distribution<std::uint64_t>(1, 64)(rng);
    return WalkParams{N, k, l};
  };

  double unitarity = 0.0, angle_norm = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto a = angles(random_params());
    unitarity = std::max(unitarity, build_operator(a).orthogonality_defect());
    angle_norm = std::max({angle_norm, std::abs(a.cos_theta * a.cos_theta + a.sin_theta * a.sin_theta - 1.0),
                           std::abs(a.cos_phi * a.cos_phi + a.sin_phi * a.sin_phi - 1.0)});
  }
  r.expect(unitarity < 1e-12, "U orthogonal for 10^4 random (N,k,l), max defect " + detail::fmt(unitarity));
  r.expect(angle_norm < 1e-12, "cos^2 + sin^2 = 1 for both angles, max error " + detail::fmt(angle_norm));

  double drift = 0.0;
  for (int i = 0; i < 5; ++i) {
    const auto p = random_params();
    const auto u = build_operator(angles(p));
    auto s = initial_state(p);
    for (int t = 0; t < 10000; ++t) s = apply(u, s);
    drift = std::max(drift, std::abs(outcome_probabilities(s).total() - 1.0));
  }
  r.expect(drift < 1e-10, "norm drift after 10^4 steps " + detail::fmt(drift));

  double same = 0.0;
  for (int i = 0; i < 1000; ++i) {
    auto p = random_params();
    p.l = 1;
    const auto a = angles(p);
    same = std::max({same, std::abs(a.cos_theta - a.cos_phi), std::abs(a.sin_theta - a.sin_phi)});
  }
  r.expect(same < 1e-15, "theta = phi at l=1, max difference " + detail::fmt(same));

  double reduction = 0.0;
  for (int i = 0; i < 1000; ++i) {
    auto p = random_params();
    p.k = 1;
    const double n = static_cast<double>(p.N), l = static_cast<double>(p.l), d = n + l - 1.0;
    const auto a = angles(p);
    reduction = std::max({reduction, std::abs(a.cos_theta - (n - l - 1.0) / d), std::abs(a.sin_theta - 2.0 * std::sqrt((n - 1.0) * l) / d),
                          std::abs(a.cos_phi - (n + l - 3.0) / d), std::abs(a.sin_phi - 2.0 * std::sqrt(n + l - 2.0) / d)});
  }
  r.expect(reduction < 1e-12, "k=1 angle forms, max error " + detail::fmt(reduction));

  bool round_trip = true, multiples = true;
  const double steps[] = {0.5, 0.25, 1.0, 0.1, 0.75};
  for (int i = 0; i < 2000; ++i) {
    const std::int64_t z = std::uniform_int_distribution<std::int64_t>(2, 8)(rng);
    const double dp = steps[i % 5];
    const auto win = random_window(xor_weight_count, z, dp, rng());
    const VertexIndex idx = std::uniform_int_distribution<VertexIndex>(0, window_size(win) - 1)(rng);
    round_trip = round_trip && coords_to_index(index_to_coords(idx, win), win) == idx;
    for (double wv : index_to_weights(idx, win)) multiples = multiples && std::abs(wv / dp - std::round(wv / dp)) < 1e-9;
  }
  r.expect(round_trip, "index -> coords -> index round trip on 2000 random windows");
  for (const auto& e : training_batch(opt.seed + 100000, 50, opt.jobs))
    for (double wv : e.weights.w) multiples = multiples && std::abs(wv / 0.5 - std::round(wv / 0.5)) < 1e-12;
  r.expect(multiples, "every emitted weight is an integer multiple of delta_p");
  detail::expect_runtime(r, sw.seconds(), 30.0);
  return r;
}

inline CriterionResult criterion_large_window(const AcceptanceOptions& opt) {
  CriterionResult r{9, "z=8 window drives a high-probability search"};
  if (!opt.heavy) {
    r.skipped = true;
    r.note("skipped: needs the heavy flag");
    return r;
  }
  detail::Stopwatch sw;
  TrainerConfig cfg;
  cfg.z = 8;
  cfg.seed = opt.seed;
  cfg.enumeration = EnumerationOptions{opt.jobs, default_vertex_cap, true};
  const auto e = train(cfg);
  r.expect(e.status == TrainStatus::measured, "solvable window after " + std::to_string(e.shifts) + " shifts");
  r.expect(e.N == 134217728, "N = " + std::to_string(e.N));
  r.note("k = " + std::to_string(e.k) + ", t = " + std::to_string(e.t_int));
  r.expect(e.probabilities.success() >= 0.99, "p_AA + p_AB = " + detail::fmt(e.probabilities.success()));
  if (e.status == TrainStatus::measured) {
    const auto set = enumerate_solutions(e.window, cfg.enumeration);
    bool verify = true;
    for (auto idx : set.indices) verify = verify && evaluate_vertex(idx, e.window);
    Rng rng = make_rng(opt.seed, "spot-check");
    std::uniform_int_distribution<VertexIndex> pick(0, e.N - 1);
    for (int i = 0; i < 100000; ++i) {
      const auto idx = pick(rng);
      verify = verify && evaluate_vertex(idx, e.window) == set.contains(idx);
    }
    r.expect(verify, "listed solutions re-verify and 10^5 random vertices agree with the list");
    r.expect(e.classification_error == 0 || !e.found_solution(), "measured weights classify XOR");
  }
  r.seconds = sw.seconds();
  return r;
}

inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  return {criterion_toy_exactness(),     criterion_step_formula(),         criterion_subspace_probabilities(),
          criterion_line_walk(),         criterion_end_to_end(opt),        criterion_oracle_equivalence(opt.jobs),
          criterion_backprop_trends(opt), criterion_invariants(opt),       criterion_large_window(opt)};
}

inline std::string status_word(const CriterionResult& r) { return r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL"); }

// ---------------------------------------------------------------------------
// Table writers
// ---------------------------------------------------------------------------

struct StepRow {
  StepReference ref;
  StepCount computed;
  bool passed;
};

inline std::vector<StepRow> step_table() {
  std::vector<StepRow> rows;
  for (const auto& ref : step_references()) {
    const auto sc = steps_to_max({ref.N, ref.k, 1}, Rounding::ceiling);
    rows.push_back({ref, sc, std::abs(sc.t_real - ref.t_theoretical) <= ref.tolerance && sc.t_int == ref.t_simulated});
  }
  return rows;
}

inline void write_step_table(std::ostream& os, const std::vector<StepRow>& rows) {
  os << "experiment,k,N,t_theoretical,t_simulated,published_t_theoretical,published_t_simulated,tolerance,status\n";
  for (const auto& r : rows) {
    os << r.ref.experiment << ',' << r.ref.k << ',' << r.ref.N << ',' << format_real(r.computed.t_real) << ',' << r.computed.t_int
       << ',' << format_real(r.ref.t_theoretical) << ',' << r.ref.t_simulated << ',' << format_real(r.ref.tolerance) << ','
       << (r.passed ? "pass" : "fail") << '\n';
  }
}

struct ProbabilityRow {
  ProbabilityReference ref;
  OutcomeProbabilities computed;
  bool passed;
};

/// Analytic class probabilities after the published step counts. A row
/// passes when p_AA and p_AA + p_AB are each within the tolerance.
inline std::vector<ProbabilityRow> probability_table() {
  std::vector<ProbabilityRow> rows;
  for (const auto& ref : probability_references()) {
    const WalkParams p{ref.N, ref.k, 1};
    const auto pr = outcome_probabilities(evolve(initial_state(p), build_operator(angles(p)), ref.t));
    const bool ok = std::abs(pr.p[0] - ref.p[0]) <= probability_tolerance &&
                    std::abs(pr.success() - (ref.p[0] + ref.p[1])) <= probability_tolerance;
    rows.push_back({ref, pr, ok});
  }
  return rows;
}

inline void write_probability_table(std::ostream& os, const std::vector<ProbabilityRow>& rows) {
  os << "experiment,k,N,t,p_AA,p_AB,p_BA,p_BB,published_p_AA,published_p_AB,published_p_BA,published_p_BB,status\n";
  for (const auto& r : rows) {
    os << r.ref.experiment << ',' << r.ref.k << ',' << r.ref.N << ',' << r.ref.t;
    for (double v : r.computed.p) os << ',' << format_real(v);
    for (double v : r.ref.p) os << ',' << format_real(v);
    os << ',' << (r.passed ? "pass" : "fail") << '\n';
  }
}

struct BackpropRow {
  BackpropReference ref;
  EpochSummary computed;
};

inline std::vector<BackpropRow> backprop_table(std::size_t runs, std::uint64_t first_seed, unsigned jobs) {
  std::vector<BackpropRow> rows;
  for (const auto& ref : backprop_references()) rows.push_back({ref, summarize(backprop_batch(ref.lr, first_seed, runs, jobs))});
  return rows;
}

inline void write_backprop_outcomes(std::ostream& os, const std::vector<BackpropRow>& rows) {
  os << "lr,runs,epoch_limit,stagnation,successful,published_runs,published_epoch_limit,published_successful\n";
  for (const auto& r : rows) {
    os << format_real(r.ref.lr) << ',' << r.computed.runs << ',' << r.computed.epoch_limit_hits << ',' << r.computed.stagnations << ','
       << r.computed.successes << ',' << r.ref.runs << ',' << r.ref.epoch_limit_hits << ',' << r.ref.successes << '\n';
  }
}

inline void write_summary_header(std::ostream& os) { os << "lr,runs,successful,epoch_limit,stagnation,min,mean,max,std\n"; }

inline void write_summary_row(std::ostream& os, double lr, const EpochSummary& s) {
  os << format_real(lr) << ',' << s.runs << ',' << s.successes << ',' << s.epoch_limit_hits << ',' << s.stagnations << ','
     << format_real(s.min) << ',' << format_real(s.mean) << ',' << format_real(s.max) << ',' << format_real(s.stddev) << '\n';
}

inline void write_backprop_statistics(std::ostream& os, const std::vector<BackpropRow>& rows) {
  os << "lr,min,mean,max,std,published_min,published_mean,published_max,published_std\n";
  for (const auto& r : rows) {
    os << format_real(r.ref.lr) << ',' << format_real(r.computed.min) << ',' << format_real(r.computed.mean) << ','
       << format_real(r.computed.max) << ',' << format_real(r.computed.stddev) << ',' << format_real(r.ref.min) << ','
       << format_real(r.ref.mean) << ',' << format_real(r.ref.max) << ',' << format_real(r.ref.stddev) << '\n';
  }
}

struct ReportInputs {
  std::vector<StepRow> steps;
  std::vector<ProbabilityRow> probabilities;
  std::vector<BackpropRow> backprop;
  std::vector<std::pair<TrainerConfig, ExperimentResult>> searches;
  std::vector<CriterionResult> criteria;
};

/// Markdown comparison of produced numbers against the published ones.
inline void write_report(std::ostream& os, const ReportInputs& in) {
  auto pass = [](bool ok) { return ok ? "pass" : "FAIL"; };
  os << "# Reproduction report\n\n";

  os << "## Acceptance criteria\n\n| # | criterion | status | seconds |\n|---|---|---|---|\n";
  for (const auto& c : in.criteria) os << "| " << c.id << " | " << c.name << " | " << status_word(c) << " | " << detail::fmt(c.seconds, 3) << " |\n";
  for (const auto& c : in.criteria) {
    os << "\n" << c.id << ". " << c.name << "\n";
    for (const auto& n : c.notes) os << "   - " << n << "\n";
  }

  os << "\n## Step counts (l = 1, ceiling rounding)\n\n"
     << "| exp | k | N | t computed | t published | t simulated | published | status |\n|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : in.steps) {
    os << "| " << r.ref.experiment << " | " << r.ref.k << " | " << r.ref.N << " | " << detail::fmt(r.computed.t_real, 6) << " | "
       << r.ref.t_theoretical << " | " << r.computed.t_int << " | " << r.ref.t_simulated << " | " << pass(r.passed) << " |\n";
  }
  for (const auto& r : in.steps)
    if (*r.ref.note) os << "\nNote (experiment " << r.ref.experiment << "): " << r.ref.note << ".\n";

  os << "\n## Class probabilities after t steps (analytic; p_AA and p_AA + p_AB within 2 pp)\n\n"
     << "| exp | p_AA | p_AB | p_BA | p_BB | published AA/AB/BA/BB | status |\n|---|---|---|---|---|---|---|\n";
  for (const auto& r : in.probabilities) {
    os << "| " << r.ref.experiment;
    for (double v : r.computed.p) os << " | " << detail::fmt(100.0 * v, 4) << "%";
    os << " | " << detail::fmt(100.0 * r.ref.p[0], 4) << "/" << detail::fmt(100.0 * r.ref.p[1], 4) << "/"
       << detail::fmt(100.0 * r.ref.p[2], 4) << "/" << detail::fmt(100.0 * r.ref.p[3], 4) << "% | " << pass(r.passed) << " |\n";
  }
  os << "\nExperiments 1 and 2 share N, k and t, so their analytic probabilities coincide; the published rows differ, "
        "which points to sampled measurement frequencies. Experiment 2 therefore misses its published p_AA (95.03%) by about 2.1 pp.\n";

  if (!in.searches.empty()) {
    os << "\n## Weight searches\n\n| z | seed | shifts | k | N | t | p_AA + p_AB | outcome | XOR errors |\n|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& [cfg, r] : in.searches) {
      os << "| " << cfg.z << " | " << cfg.seed << " | " << r.shifts << " | " << r.k << " | " << r.N << " | " << r.t_int << " | "
         << detail::fmt(r.probabilities.success(), 6) << " | " << (r.status == TrainStatus::measured ? to_string(r.outcome) : "none")
         << " | " << r.classification_error << " |\n";
    }
  }

  if (!in.backprop.empty()) {
    os << "\n## Backpropagation baseline\n\n"
       << "Epoch statistics cover successful runs. Published figures come from 1200 runs per rate with an unstated "
          "initialization, so only trends are compared.\n\n"
       << "| lr | runs | successful | epoch limit | min | mean | max | std | published successful | published mean |\n"
       << "|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : in.backprop) {
      const auto& c = r.computed;
      os << "| " << r.ref.lr << " | " << c.runs << " | " << c.successes << " | " << c.epoch_limit_hits << " | ";
      if (c.successes > 0) {
        os << c.min << " | " << detail::fmt(c.mean, 6) << " | " << c.max << " | " << detail::fmt(c.stddev, 6);
      } else {
        os << "n/a | n/a | n/a | n/a";
      }
      os << " | " << r.ref.successes << "/" << r.ref.runs << " | " << r.ref.mean << " |\n";
    }
  }
}

}  // namespace qwnn
