#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qwnn/lackadaisical_walk.hpp"

using namespace qwnn;

namespace {

constexpr double kTol = 1e-12;

WalkParams random_params(std::mt19937_64& rng, std::uint64_t max_n) {
  std::uniform_int_distribution<std::uint64_t> pick_n(2, max_n);
  const auto n = pick_n(rng);
  std::uniform_int_distribution<std::uint64_t> pick_k(1, n - 1);
  std::uniform_int_distribution<std::uint64_t> pick_l(1, 50);
  return {n, pick_k(rng), pick_l(rng)};
}

const WalkParams toy{8, 2, 1};

}  // namespace

TEST(Angles, ToyExample) {
  const auto a = angles(toy);
  EXPECT_NEAR(a.cos_theta, 0.5, kTol);
  EXPECT_NEAR(a.sin_theta, std::sqrt(3.0) / 2.0, kTol);
  EXPECT_NEAR(a.cos_phi, 0.5, kTol);
  EXPECT_NEAR(a.sin_phi, std::sqrt(3.0) / 2.0, kTol);
}

TEST(Angles, SingleSelfLoopMakesThetaEqualPhi) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    auto p = random_params(rng, 1'000'000'000);
    p.l = 1;
    const auto a = angles(p);
    const double n = static_cast<double>(p.N), k = static_cast<double>(p.k);
    EXPECT_NEAR(a.cos_theta, a.cos_phi, kTol);
    EXPECT_NEAR(a.sin_theta, a.sin_phi, kTol);
    EXPECT_NEAR(a.cos_theta, (n - 2 * k) / n, kTol);
    EXPECT_NEAR(a.sin_theta, 2 * std::sqrt(k * (n - k)) / n, kTol);
  }
}

TEST(Angles, DirectSubstitution) {
  EXPECT_DOUBLE_EQ(angles({512, 12, 1}).cos_theta, 488.0 / 512.0);
  EXPECT_DOUBLE_EQ(angles({512, 12, 1}).cos_theta, 0.953125);
}

TEST(Angles, SingleSolutionReduction) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    auto p = random_params(rng, 1'000'000'000);
    p.k = 1;
    const auto a = angles(p);
    const double n = static_cast<double>(p.N), l = static_cast<double>(p.l);
    EXPECT_NEAR(a.cos_theta, (n - l - 1) / (n + l - 1), kTol);
    EXPECT_NEAR(a.sin_theta, 2 * std::sqrt(l * (n - 1)) / (n + l - 1), kTol);
    // cos(phi) = (N + l - 3)/(N + l - 1); the N - l - 3 variant is not
    // compatible with the stated sin(phi) unless l = 0.
    EXPECT_NEAR(a.cos_phi, (n + l - 3) / (n + l - 1), kTol);
    EXPECT_NEAR(a.sin_phi, 2 * std::sqrt(n + l - 2) / (n + l - 1), kTol);
  }
}

TEST(Angles, TrigIdentityAndValidation) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto a = angles(random_params(rng, 1'000'000'000));
    EXPECT_NEAR(a.cos_theta * a.cos_theta + a.sin_theta * a.sin_theta, 1.0, kTol);
    EXPECT_NEAR(a.cos_phi * a.cos_phi + a.sin_phi * a.sin_phi, 1.0, kTol);
  }
  EXPECT_THROW(angles({8, 0, 1}), std::invalid_argument);
  EXPECT_THROW(angles({8, 8, 1}), std::invalid_argument);
  EXPECT_THROW(angles({8, 2, 0}), std::invalid_argument);
}

TEST(EvolutionOperator, ToyMatrix) {
  const auto u = build_operator(angles(toy));
  const double r3 = std::sqrt(3.0);
  const double expected[4][4] = {{1, -r3, 0, 0}, {0, 0, -1, r3}, {-r3, -1, 0, 0}, {0, 0, r3, 1}};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(u(r, c), expected[r][c] / 2.0, kTol) << r << "," << c;
}

TEST(EvolutionOperator, OrthogonalForRandomParams) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 10000; ++i) {
    const auto p = random_params(rng, 1'000'000'000);
    EXPECT_LT(build_operator(angles(p)).orthogonality_defect(), kTol) << p.N << " " << p.k << " " << p.l;
  }
}

TEST(EvolutionOperator, ZeroAngleLimitIsSignedPermutation) {
  const auto u = build_operator(Angles{1.0, 0.0, 1.0, 0.0});
  const double expected[4][4] = {{1, 0, 0, 0}, {0, 0, -1, 0}, {0, -1, 0, 0}, {0, 0, 0, 1}};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) EXPECT_EQ(u(r, c), expected[r][c]);
  EXPECT_EQ(u.orthogonality_defect(), 0.0);
}

TEST(InitialState, ToyExample) {
  const auto s = initial_state(toy);
  EXPECT_NEAR(s.amp[0], 2.0 / 8.0, kTol);
  EXPECT_NEAR(s.amp[1], std::sqrt(12.0) / 8.0, kTol);
  EXPECT_NEAR(s.amp[2], std::sqrt(12.0) / 8.0, kTol);
  EXPECT_NEAR(s.amp[3], 6.0 / 8.0, kTol);
}

TEST(InitialState, LargeWindow) {
  const auto s = initial_state({512, 12, 1});
  EXPECT_NEAR(s.amp[0], 12.0 / 512.0, kTol);
  EXPECT_NEAR(s.amp[1], std::sqrt(6000.0) / 512.0, kTol);
  EXPECT_NEAR(s.amp[2], std::sqrt(6000.0) / 512.0, kTol);
  EXPECT_NEAR(s.amp[3], 500.0 / 512.0, kTol);
}

TEST(InitialState, ReducesToSingleSolutionForm) {
  for (std::uint64_t l : {1, 2, 5, 40}) {
    const double n = 100, ld = static_cast<double>(l);
    const auto s = initial_state({100, 1, l});
    const double scale = std::sqrt(n * (n + ld - 1));
    EXPECT_NEAR(s.amp[0], std::sqrt(ld) / scale, kTol);
    EXPECT_NEAR(s.amp[1], std::sqrt(n - 1) / scale, kTol);
    EXPECT_NEAR(s.amp[2], std::sqrt(n - 1) / scale, kTol);
    EXPECT_NEAR(s.amp[3], std::sqrt((n - 1) * (n + ld - 2)) / scale, kTol);
  }
}

TEST(InitialState, Normalized) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 5000; ++i) EXPECT_NEAR(initial_state(random_params(rng, 1'000'000'000)).norm_squared(), 1.0, kTol);
}

TEST(StepsToMax, TableValues) {
  auto s = steps_to_max({512, 12, 1});
  EXPECT_NEAR(s.t_real, 10.26, 0.005);
  EXPECT_EQ(s.t_int, 11U);
  s = steps_to_max({262144, 20, 1});
  EXPECT_NEAR(s.t_real, 179.83, 0.01);
  EXPECT_EQ(s.t_int, 180U);
  s = steps_to_max({134217728, 80295, 1});
  EXPECT_NEAR(s.t_real, 64.22, 0.01);
  EXPECT_EQ(s.t_int, 65U);
  // The formula gives 195.06 here, not the 195.83 printed alongside it.
  s = steps_to_max({262144, 17, 1});
  EXPECT_NEAR(s.t_real, 195.06, 0.01);
  EXPECT_EQ(s.t_int, 196U);
}

TEST(StepsToMax, ToyAndRoundingModes) {
  EXPECT_NEAR(steps_to_max(toy).t_real, std::numbers::pi, kTol);
  EXPECT_EQ(steps_to_max(toy, Rounding::floor).t_int, 3U);
  EXPECT_EQ(steps_to_max(toy, Rounding::nearest).t_int, 3U);
  EXPECT_EQ(steps_to_max(toy, Rounding::ceiling).t_int, 4U);
  EXPECT_EQ(parse_rounding("ceil"), Rounding::ceiling);
  EXPECT_THROW(parse_rounding("up"), std::invalid_argument);
}

TEST(StepsToMax, DecreasesWithMoreSolutions) {
  for (std::uint64_t n : {64ULL, 512ULL, 262144ULL}) {
    for (std::uint64_t l : {1ULL, 3ULL}) {
      double prev = steps_to_max({n, 1, l}).t_real;
      for (std::uint64_t k = 2; k < std::min<std::uint64_t>(n, 200); ++k) {
        const double t = steps_to_max({n, k, l}).t_real;
        EXPECT_LT(t, prev);
        prev = t;
      }
    }
  }
}

TEST(Evolve, ToyStepByStep) {
  const auto u = build_operator(angles(toy));
  const auto s0 = initial_state(toy);
  EXPECT_EQ(evolve(s0, u, 0), s0);

  const auto s1 = evolve(s0, u, 1);
  const double r3 = std::sqrt(3.0);
  EXPECT_NEAR(s1.amp[0], -0.25, kTol);
  EXPECT_NEAR(s1.amp[1], r3 / 4, kTol);
  EXPECT_NEAR(s1.amp[2], -r3 / 4, kTol);
  EXPECT_NEAR(s1.amp[3], 0.75, kTol);

  const auto s3 = evolve(s0, u, 3);
  EXPECT_NEAR(s3.amp[0], -1.0, kTol);
  EXPECT_NEAR(s3.amp[1], 0.0, kTol);
  EXPECT_NEAR(s3.amp[2], 0.0, kTol);
  EXPECT_NEAR(s3.amp[3], 0.0, kTol);
  EXPECT_NEAR(outcome_probabilities(s3)[Outcome::AA], 1.0, 1e-9);
}

TEST(Evolve, NormConservedOverTenThousandSteps) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    const auto p = random_params(rng, 1'000'000);
    const auto s = evolve(initial_state(p), build_operator(angles(p)), 10000);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-9);
  }
}

TEST(Evolve, SuccessProbabilityOscillatesWithPeakNearPrediction) {
  for (const WalkParams p : {WalkParams{512, 12, 1}, WalkParams{4096, 3, 1}, WalkParams{262144, 20, 1}}) {
    const auto steps = steps_to_max(p);
    const auto u = build_operator(angles(p));
    auto s = initial_state(p);
    std::vector<double> trace;
    for (std::uint64_t t = 0; t <= 4 * steps.t_int; ++t) {
      trace.push_back(outcome_probabilities(s)[Outcome::AA]);
      s = apply(u, s);
    }
    std::size_t argmax = 0;
    for (std::size_t t = 0; t < trace.size() / 2; ++t)
      if (trace[t] > trace[argmax]) argmax = t;
    EXPECT_NEAR(static_cast<double>(argmax), steps.t_real, 1.0 + 0.02 * steps.t_real);
    // falls back down before rising again
    const double trough = *std::min_element(trace.begin() + argmax, trace.end());
    EXPECT_LT(trough, 0.1);
    EXPECT_LT(trace.front(), 0.1);
  }
}

TEST(OutcomeProbabilities, Values) {
  const auto p0 = outcome_probabilities(initial_state(toy));
  EXPECT_NEAR(p0.p[0], 4.0 / 64, kTol);
  EXPECT_NEAR(p0.p[1], 12.0 / 64, kTol);
  EXPECT_NEAR(p0.p[2], 12.0 / 64, kTol);
  EXPECT_NEAR(p0.p[3], 36.0 / 64, kTol);

  const WalkParams p{512, 12, 1};
  const auto pr = outcome_probabilities(evolve(initial_state(p), build_operator(angles(p)), 11));
  EXPECT_NEAR(pr.total(), 1.0, 1e-10);
  EXPECT_NEAR(pr[Outcome::AA], 0.9548, 0.02);
  EXPECT_GE(pr.success(), 0.98);
}

TEST(SampleOutcome, BasisStatesAreDeterministic) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(sample_outcome(FourStateVector{{1, 0, 0, 0}}, rng), Outcome::AA);
    EXPECT_EQ(sample_outcome(FourStateVector{{0, 0, 0, 1}}, rng), Outcome::BB);
    EXPECT_EQ(sample_outcome(FourStateVector{{0, -1, 0, 0}}, rng), Outcome::AB);
  }
}

TEST(SampleOutcome, ToyFinalStateAlwaysAA) {
  const auto s = evolve(initial_state(toy), build_operator(angles(toy)), 3);
  Rng rng(99);
  int aa = 0;
  for (int i = 0; i < 10000; ++i) aa += sample_outcome(s, rng) == Outcome::AA;
  EXPECT_EQ(aa, 10000);
}

TEST(SampleOutcome, FrequenciesFollowProbabilities) {
  const auto s = initial_state(toy);  // (4, 12, 12, 36)/64
  Rng rng(7);
  std::array<int, 4> hits{};
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++hits[static_cast<std::size_t>(sample_outcome(s, rng))];
  const auto p = outcome_probabilities(s);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(hits[i] / double(n), p.p[i], 0.005);
}

TEST(SampleOutcome, SeedDeterminism) {
  const auto s = initial_state(toy);
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_outcome(s, a), sample_outcome(s, b));
}

TEST(ProbabilityTrace, Csv) {
  std::ostringstream os;
  write_probability_trace_csv(os, toy, 3);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,p_AA,p_AB,p_BA,p_BB");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) ++rows, last = line;
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(last.substr(0, 2), "3,");
  EXPECT_NEAR(std::stod(last.substr(2)), 1.0, 1e-9);
}
