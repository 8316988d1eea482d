#pragma once

// 2-2-1 multilayer perceptron for XOR and its backpropagation baseline.
//
// Hidden neurons are logistic sigmoids, the output neuron is linear, and
// every neuron subtracts its bias: u = w0*x0 + w1*x1 - theta.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "qwnn/format.hpp"
#include "qwnn/random.hpp"

namespace qwnn {

/// Weight layout (flat index): w00 w01 w02 | w10 w11 w12 | w20 w21 w22.
/// The third weight of each neuron is its bias theta.
struct MlpWeights {
  std::array<double, 9> w{};

  static MlpWeights from_span(std::span<const double> v) {
    if (v.size() != 9) throw std::invalid_argument("MlpWeights: expected 9 weights");
    MlpWeights out;
    std::copy(v.begin(), v.end(), out.w.begin());
    return out;
  }

  double& operator[](std::size_t i) { return w[i]; }
  double operator[](std::size_t i) const { return w[i]; }

  bool all_finite() const {
    for (double v : w)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const MlpWeights&, const MlpWeights&) = default;
};

struct Pattern {
  double x0;
  double x1;
  int target;
};

struct XorDataset {
  static constexpr std::array<Pattern, 4> patterns{{{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}}};
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Hidden neuron: sigmoid(wa*x0 + wb*x1 - theta).
inline double hidden_activation(double wa, double wb, double theta, double x0, double x1) {
  return sigmoid(wa * x0 + wb * x1 - theta);
}

/// Linear output neuron.
inline double output_value(double wa, double wb, double theta, double h1, double h2) {
  return wa * h1 + wb * h2 - theta;
}

inline constexpr double class_threshold = 0.5;

inline int classify_output(double y) { return y >= class_threshold ? 1 : 0; }

struct ForwardResult {
  double y1;
  double y2;
  double y3;
};

inline ForwardResult forward(const MlpWeights& m, double x0, double x1) {
  const double h1 = hidden_activation(m[0], m[1], m[2], x0, x1);
  const double h2 = hidden_activation(m[3], m[4], m[5], x0, x1);
  return {h1, h2, output_value(m[6], m[7], m[8], h1, h2)};
}

inline int classify(const MlpWeights& m, double x0, double x1) { return classify_output(forward(m, x0, x1).y3); }

/// Number of misclassified XOR patterns, 0..4.
inline int classification_error(const MlpWeights& m) {
  int errors = 0;
  for (const auto& p : XorDataset::patterns) errors += classify(m, p.x0, p.x1) != p.target;
  return errors;
}

inline double mse(const MlpWeights& m) {
  double s = 0.0;
  for (const auto& p : XorDataset::patterns) {
    const double e = forward(m, p.x0, p.x1).y3 - p.target;
    s += e * e;
  }
  return s / static_cast<double>(XorDataset::patterns.size());
}

/// Analytic gradient of mse() with respect to the nine weights.
inline std::array<double, 9> mse_gradient(const MlpWeights& m) {
  std::array<double, 9> g{};
  const double scale = 2.0 / static_cast<double>(XorDataset::patterns.size());
  for (const auto& p : XorDataset::patterns) {
    const auto f = forward(m, p.x0, p.x1);
    const double dy = scale * (f.y3 - p.target);
    g[6] += dy * f.y1;
    g[7] += dy * f.y2;
    g[8] -= dy;
    const double d1 = dy * m[6] * f.y1 * (1.0 - f.y1);
    const double d2 = dy * m[7] * f.y2 * (1.0 - f.y2);
    g[0] += d1 * p.x0;
    g[1] += d1 * p.x1;
    g[2] -= d1;
    g[3] += d2 * p.x0;
    g[4] += d2 * p.x1;
    g[5] -= d2;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Backpropagation baseline
// ---------------------------------------------------------------------------

struct BackpropConfig {
  double learning_rate = 0.5;
  std::uint64_t max_epochs = 150000;
  std::uint64_t stagnation_window = 1000;
  double init_range = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("BackpropConfig: learning_rate must be positive");
    if (max_epochs < 1) throw std::invalid_argument("BackpropConfig: max_epochs must be at least 1");
    if (stagnation_window < 1) throw std::invalid_argument("BackpropConfig: stagnation_window must be at least 1");
    if (!(init_range >= 0.0)) throw std::invalid_argument("BackpropConfig: init_range must be non-negative");
  }
};

enum class TrainOutcome { success, epoch_limit, stagnation };

constexpr std::string_view to_string(TrainOutcome o) {
  switch (o) {
    case TrainOutcome::success: return "success";
    case TrainOutcome::epoch_limit: return "epoch_limit";
    case TrainOutcome::stagnation: return "stagnation";
  }
  return "?";
}

struct TrainResult {
  TrainOutcome outcome = TrainOutcome::epoch_limit;
  std::uint64_t epochs_used = 0;
  MlpWeights final_weights;
  double final_mse = 0.0;
};

inline constexpr double stagnation_epsilon = 1e-12;

/// Full-batch gradient descent on the MSE over the four XOR patterns.
/// The classification check happens before each update, so a network that
/// already solves XOR reports zero epochs.
inline TrainResult backprop_train(const BackpropConfig& cfg) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed, "backprop-init");
  std::uniform_real_distribution<double> init(-cfg.init_range, cfg.init_range);
  MlpWeights m;
  for (auto& v : m.w) v = init(rng);

  TrainResult res;
  double best = mse(m);
  std::uint64_t since_improvement = 0;
  std::uint64_t epoch = 0;
  for (;;) {
    if (classification_error(m) == 0) {
      res.outcome = TrainOutcome::success;
      break;
    }
    if (epoch == cfg.max_epochs) {
      res.outcome = TrainOutcome::epoch_limit;
      break;
    }
    const auto g = mse_gradient(m);
    for (std::size_t i = 0; i < 9; ++i) m[i] -= cfg.learning_rate * g[i];
    ++epoch;

    const double e = mse(m);
    if (e < best - stagnation_epsilon) {
      best = e;
      since_improvement = 0;
    } else if (++since_improvement >= cfg.stagnation_window) {
      res.outcome = classification_error(m) == 0 ? TrainOutcome::success : TrainOutcome::stagnation;
      break;
    }
  }
  res.epochs_used = epoch;
  res.final_weights = m;
  res.final_mse = mse(m);
  return res;
}

struct EpochSummary {
  std::size_t runs = 0;  // all runs, successful or not
  std::uint64_t successes = 0;
  std::uint64_t epoch_limit_hits = 0;
  std::uint64_t stagnations = 0;
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
};

inline EpochSummary summarize_epochs(std::span<const std::uint64_t> epochs) {
  EpochSummary s;
  s.runs = epochs.size();
  if (epochs.empty()) return s;
  s.min = static_cast<double>(*std::min_element(epochs.begin(), epochs.end()));
  s.max = static_cast<double>(*std::max_element(epochs.begin(), epochs.end()));
  double sum = 0.0;
  for (auto e : epochs) sum += static_cast<double>(e);
  s.mean = sum / static_cast<double>(epochs.size());
  if (epochs.size() > 1) {
    double ss = 0.0;
    for (auto e : epochs) ss += (static_cast<double>(e) - s.mean) * (static_cast<double>(e) - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(epochs.size() - 1));
  }
  return s;
}

/// Epoch statistics cover successful runs only; runs that hit the epoch limit
/// or stagnated are reported through the counters.
inline EpochSummary summarize(std::span<const TrainResult> results) {
  std::vector<std::uint64_t> epochs;
  for (const auto& r : results)
    if (r.outcome == TrainOutcome::success) epochs.push_back(r.epochs_used);
  auto s = summarize_epochs(epochs);
  s.runs = results.size();
  for (const auto& r : results) {
    s.successes += r.outcome == TrainOutcome::success;
    s.epoch_limit_hits += r.outcome == TrainOutcome::epoch_limit;
    s.stagnations += r.outcome == TrainOutcome::stagnation;
  }
  return s;
}

/// CSV header and row for `lr,seed,outcome,epochs,final_mse`.
inline void write_train_result_header(std::ostream& os) { os << "lr,seed,outcome,epochs,final_mse\n"; }

inline void write_train_result_row(std::ostream& os, const BackpropConfig& cfg, const TrainResult& r) {
  os << format_real(cfg.learning_rate) << ',' << cfg.seed << ',' << to_string(r.outcome) << ',' << r.epochs_used << ','
     << format_real(r.final_mse) << '\n';
}

}  // namespace qwnn
