#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "qwnn/coined_walk.hpp"

using namespace qwnn;

namespace {

constexpr double kTol = 1e-12;

// Independent dense evolution of the 1D Hadamard walk over positions
// -t..t, used as the oracle for the sparse implementation.
std::vector<double> dense_distribution(std::complex<double> a0, std::complex<double> b0, int steps) {
  const int width = 2 * steps + 3;
  const int mid = steps + 1;
  std::vector<std::complex<double>> a(width), b(width);
  a[mid] = a0;
  b[mid] = b0;
  const double h = 1.0 / std::sqrt(2.0);
  for (int s = 0; s < steps; ++s) {
    std::vector<std::complex<double>> na(width), nb(width);
    for (int i = 1; i + 1 < width; ++i) {
      na[i] = (a[i - 1] + b[i - 1]) * h;
      nb[i] = (a[i + 1] - b[i + 1]) * h;
    }
    a.swap(na);
    b.swap(nb);
  }
  std::vector<double> p(2 * steps + 1);
  for (int n = -steps; n <= steps; ++n) p[n + steps] = std::norm(a[mid + n]) + std::norm(b[mid + n]);
  return p;
}

}  // namespace

TEST(CoinedWalk1D, AsymmetricInitIsSingleBasisState) {
  const auto s = init_1d_asymmetric();
  const auto d = distribution_1d(s);
  ASSERT_EQ(d.size(), 1U);
  EXPECT_DOUBLE_EQ(d.at(0), 1.0);
  EXPECT_EQ(s.t, 0U);
}

TEST(CoinedWalk1D, SymmetricInitIsNormalized) {
  const auto s = init_1d_symmetric();
  EXPECT_NEAR(s.norm_squared(), 1.0, kTol);
  EXPECT_NEAR(s.at(0).alpha.real(), 1.0 / std::sqrt(2.0), kTol);
  EXPECT_NEAR(s.at(0).beta.imag(), -1.0 / std::sqrt(2.0), kTol);
}

TEST(CoinedWalk1D, FirstStepAmplitudes) {
  // (|0>|1> + |1>|-1>)/sqrt2
  const auto s = step_1d(init_1d_asymmetric());
  EXPECT_EQ(s.t, 1U);
  EXPECT_NEAR(std::abs(s.at(1).alpha - 1.0 / std::sqrt(2.0)), 0.0, kTol);
  EXPECT_NEAR(std::abs(s.at(1).beta), 0.0, kTol);
  EXPECT_NEAR(std::abs(s.at(-1).beta - 1.0 / std::sqrt(2.0)), 0.0, kTol);
  EXPECT_NEAR(std::abs(s.at(-1).alpha), 0.0, kTol);
  const auto d = distribution_1d(s);
  EXPECT_NEAR(d.at(1), 0.5, kTol);
  EXPECT_NEAR(d.at(-1), 0.5, kTol);
}

TEST(CoinedWalk1D, SecondAndThirdStepAmplitudes) {
  auto s = evolve_1d(init_1d_asymmetric(), 2);
  // (|0>|2> + (|1> + |0>)|0> - |1>|-2>)/2
  EXPECT_NEAR(std::abs(s.at(2).alpha - 0.5), 0.0, kTol);
  EXPECT_NEAR(std::abs(s.at(0).alpha - 0.5), 0.0, kTol);
  EXPECT_NEAR(std::abs(s.at(0).beta - 0.5), 0.0, kTol);
  EXPECT_NEAR(std::abs(s.at(-2).beta + 0.5), 0.0, kTol);
  auto d = distribution_1d(s);
  EXPECT_NEAR(d.at(2), 0.25, kTol);
  EXPECT_NEAR(d.at(0), 0.5, kTol);
  EXPECT_NEAR(d.at(-2), 0.25, kTol);

  s = step_1d(s);
  // (|0>|3> + (2|0> + |1>)|1> - |0>|-1> + |1>|-3>)/(2 sqrt2)
  const double c = 1.0 / (2.0 * std::sqrt(2.0));
  EXPECT_NEAR(std::abs(s.at(3).alpha - c), 0.0, kTol);
  EXPECT_NEAR(std::abs(s.at(1).alpha - 2.0 * c), 0.0, kTol);
  EXPECT_NEAR(std::abs(s.at(1).beta - c), 0.0, kTol);
  EXPECT_NEAR(std::abs(s.at(-1).alpha + c), 0.0, kTol);
  EXPECT_NEAR(std::abs(s.at(-1).beta), 0.0, kTol);
  EXPECT_NEAR(std::abs(s.at(-3).beta - c), 0.0, kTol);
  d = distribution_1d(s);
  ASSERT_EQ(d.size(), 4U);
  EXPECT_NEAR(d.at(1), 5.0 / 8.0, kTol);
  EXPECT_NEAR(d.at(3), 1.0 / 8.0, kTol);
  EXPECT_NEAR(d.at(-1), 1.0 / 8.0, kTol);
  EXPECT_NEAR(d.at(-3), 1.0 / 8.0, kTol);
}

TEST(CoinedWalk1D, NormParityAndSupportOverLongRuns) {
  auto s = init_1d_asymmetric();
  for (int t = 1; t <= 1000; ++t) {
    s = step_1d(s);
    if (t % 97 == 0 || t == 1000) {
      EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10) << "t=" << t;
      for (const auto& [n, c] : s.amplitudes) {
        EXPECT_LE(std::abs(n), t);
        EXPECT_EQ((n + t) % 2, 0) << "odd-parity site populated at t=" << t;
      }
    }
  }
}

TEST(CoinedWalk1D, SymmetricInitStaysMirrorSymmetric) {
  auto s = init_1d_symmetric();
  for (int t = 1; t <= 150; ++t) {
    s = step_1d(s);
    const auto d = distribution_1d(s);
    for (const auto& [n, p] : d) {
      ASSERT_TRUE(d.contains(-n));
      EXPECT_NEAR(p, d.at(-n), 1e-15) << "t=" << t << " n=" << n;
    }
  }
}

TEST(CoinedWalk1D, HundredStepsMatchesDenseRecursionAndPeaks) {
  const auto s = evolve_1d(init_1d_symmetric(), 100);
  const auto d = distribution_1d(s);
  const auto dense = dense_distribution({1.0 / std::sqrt(2.0), 0.0}, {0.0, -1.0 / std::sqrt(2.0)}, 100);
  for (int n = -100; n <= 100; ++n) {
    const double sparse = d.contains(n) ? d.at(n) : 0.0;
    EXPECT_NEAR(sparse, dense[n + 100], kTol);
  }
  // two mirror-image maxima inside |n| in [60, 80]
  std::int64_t arg_pos = 0, arg_neg = 0;
  double best_pos = -1, best_neg = -1;
  for (const auto& [n, p] : d) {
    if (n > 0 && p > best_pos) best_pos = p, arg_pos = n;
    if (n < 0 && p > best_neg) best_neg = p, arg_neg = n;
  }
  EXPECT_EQ(arg_pos, -arg_neg);
  EXPECT_GE(arg_pos, 60);
  EXPECT_LE(arg_pos, 80);
}

TEST(CoinedWalk1D, AsymmetricDistributionSkewsPositive) {
  const auto d = distribution_1d(evolve_1d(init_1d_asymmetric(), 100));
  double left = 0, right = 0, mean = 0;
  for (const auto& [n, p] : d) {
    (n > 0 ? right : left) += p;
    mean += static_cast<double>(n) * p;
  }
  EXPECT_GT(right, left);
  EXPECT_GT(mean, 10.0);
}

TEST(CoinedWalk1D, QuantumOriginProbabilityBelowClassicalGaussian) {
  const int t = 100;
  const double classical = 2.0 / std::sqrt(2.0 * std::numbers::pi * t);
  for (const auto& init : {init_1d_asymmetric(), init_1d_symmetric()}) {
    const auto d = distribution_1d(evolve_1d(init, t));
    const double quantum = d.contains(0) ? d.at(0) : 0.0;
    EXPECT_LT(quantum, classical);
  }
}

TEST(CoinedWalk1D, CsvExport) {
  std::ostringstream os;
  write_distribution_csv(os, distribution_1d(init_1d_asymmetric()));
  EXPECT_EQ(os.str(), "n,probability\n0,1.0\n");

  std::ostringstream three;
  write_distribution_csv(three, distribution_1d(evolve_1d(init_1d_asymmetric(), 3)));
  EXPECT_EQ(three.str().substr(0, 14), "n,probability\n");
  EXPECT_NE(three.str().find("\n-3,"), std::string::npos);
  EXPECT_NE(three.str().find("\n1,0.62"), std::string::npos);
}

TEST(CoinedWalkND, HadamardPowerIsUnitary) {
  for (std::size_t d = 1; d <= 4; ++d) EXPECT_LT(CoinMatrix::hadamard_power(d).unitarity_defect(), 1e-12) << d;
}

TEST(CoinedWalkND, RejectsBadCoins) {
  const auto s = init_nd_localized(2);
  EXPECT_THROW(step_nd(s, CoinMatrix::hadamard()), std::invalid_argument);
  const CoinMatrix not_unitary(4, std::vector<Amplitude>(16, 0.5));
  EXPECT_THROW(step_nd(s, not_unitary), std::invalid_argument);
}

TEST(CoinedWalkND, OneDimensionReproducesLineWalkBitForBit) {
  for (const auto& init : {init_1d_asymmetric(), init_1d_symmetric()}) {
    auto line = init;
    auto general = to_nd(init);
    const auto coin = CoinMatrix::hadamard();
    for (int t = 1; t <= 20; ++t) {
      line = step_1d(line);
      general = step_nd(general, coin);
      ASSERT_EQ(line.amplitudes.size(), general.amplitudes.size()) << "t=" << t;
      for (const auto& [n, c] : line.amplitudes) {
        const auto& psi = general.amplitudes.at(Position{n});
        EXPECT_EQ(psi[0], c.alpha);
        EXPECT_EQ(psi[1], c.beta);
      }
      const auto d1 = distribution_1d(line);
      const auto dn = distribution_nd(general);
      for (const auto& [n, p] : d1) EXPECT_EQ(dn.at(Position{n}), p);
    }
  }
}

TEST(CoinedWalkND, TwoDimensionalFirstStep) {
  const auto s = step_nd(init_nd_localized(2, 0), CoinMatrix::hadamard_power(2));
  const auto d = distribution_nd(s);
  ASSERT_EQ(d.size(), 4U);
  for (const auto& [x, p] : d) {
    EXPECT_NEAR(p, 0.25, kTol);
    EXPECT_EQ(std::abs(x[0]), 1);
    EXPECT_EQ(std::abs(x[1]), 1);
  }
}

TEST(CoinedWalkND, TwoDimensionalNormOverFiftySteps) {
  auto s = init_nd_localized(2, 0);
  const auto coin = CoinMatrix::hadamard_power(2);
  for (int t = 0; t < 50; ++t) s = step_nd(s, coin);
  EXPECT_NEAR(s.norm_squared(), 1.0, kTol);
  for (const auto& [x, p] : distribution_nd(s)) {
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(CoinedWalkND, LocalizedInitAndCsv) {
  const auto s = init_nd_localized(3);
  const auto d = distribution_nd(s);
  ASSERT_EQ(d.size(), 1U);
  EXPECT_EQ(d.begin()->first, (Position{0, 0, 0}));
  EXPECT_DOUBLE_EQ(d.begin()->second, 1.0);
  std::ostringstream os;
  write_distribution_csv(os, d, 3);
  EXPECT_EQ(os.str(), "x1,x2,x3,probability\n0,0,0,1.0\n");
}
