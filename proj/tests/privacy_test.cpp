// Copyright 2026 The PFP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pfp/pfp.hpp"
#include "test_support.hpp"

namespace pfp {
namespace {

// Reference values evaluated independently at 40 significant digits.
constexpr double kSqrtLn25 = 1.794122577994101480;
constexpr double kSigmaDelta1e5 = 3.425794654716543015;
constexpr double kAdvancedEps = 1.862258136269109925;

constexpr double kRel = 1e-12;

TEST(PrivacyBudget, Validation) {
  EXPECT_NO_THROW(PrivacyBudget(0.5, 0.01));
  EXPECT_NO_THROW(PrivacyBudget(1.0, 1e-5));
  EXPECT_THROW(PrivacyBudget(0.0, 0.01), InvalidArgument);
  EXPECT_THROW(PrivacyBudget(1.5, 0.01), InvalidArgument);
  EXPECT_THROW(PrivacyBudget(0.5, 0.0), InvalidArgument);
  EXPECT_THROW(PrivacyBudget(0.5, 1.0), InvalidArgument);
  EXPECT_THROW(PrivacyBudget(std::nan(""), 0.1), InvalidArgument);
  EXPECT_EQ(PrivacyBudget(1.0, 0.1).halved(), PrivacyBudget(0.5, 0.05));
}

TEST(GaussianMechanism, ReferenceValues) {
  EXPECT_LE(test::relative_error(gaussian_mechanism_sigma(1.0, {1.0, 0.05}), kSqrtLn25), kRel);
  EXPECT_LE(test::relative_error(gaussian_mechanism_sigma(1.0, {1.0, 1e-5}), kSigmaDelta1e5), kRel);
  EXPECT_EQ(gaussian_mechanism_sigma(2.0, {1.0, 1e-5}), 2.0 * gaussian_mechanism_sigma(1.0, {1.0, 1e-5}));
}

TEST(GaussianMechanism, RejectsNonPositiveSensitivity) {
  EXPECT_THROW(gaussian_mechanism_sigma(0.0, {1.0, 0.1}), InvalidArgument);
  EXPECT_THROW(gaussian_mechanism_sigma(-1.0, {1.0, 0.1}), InvalidArgument);
}

TEST(GaussianMechanism, CalibrationMatchesClosedForm) {
  for (double eps : {0.1, 0.25, 0.5, 1.0})
    for (double delta : {1e-9, 1e-5, 0.01, 0.2}) {
      const NoiseCalibration cal = calibrate_gaussian(1.5, {eps, delta});
      const long double want = 1.5L / eps * std::sqrt(std::log(1.25L / delta));
      EXPECT_NEAR(cal.sigma, static_cast<double>(want), 2.0 * (std::nextafter(cal.sigma, INFINITY) - cal.sigma));
      EXPECT_EQ(cal.sensitivity, 1.5);
    }
}

TEST(Composition, Basic) {
  const ComposedBudget one = basic_composition(1, {0.5, 0.01});
  EXPECT_EQ(one.epsilon, 0.5);
  EXPECT_EQ(one.delta, 0.01);
  const ComposedBudget two = basic_composition(2, {0.3, 0.02});
  EXPECT_EQ(two.epsilon, 0.6);
  EXPECT_EQ(two.delta, 0.04);
  EXPECT_THROW(basic_composition(0, {0.5, 0.01}), InvalidArgument);
}

TEST(Composition, AdvancedReferenceValue) {
  const ComposedBudget c = advanced_composition(10, {0.1, 0.01}, 1e-6);
  EXPECT_LE(test::relative_error(c.epsilon, kAdvancedEps), kRel);
  EXPECT_LE(test::relative_error(c.delta, 0.100001), kRel);
  EXPECT_THROW(advanced_composition(0, {0.1, 0.01}, 1e-6), InvalidArgument);
  EXPECT_THROW(advanced_composition(3, {0.1, 0.01}, 0.0), InvalidArgument);
}

TEST(Composition, AdvancedIsMonotoneInK) {
  ComposedBudget prev = advanced_composition(1, {0.05, 1e-4}, 1e-6);
  for (std::size_t k = 2; k <= 200; ++k) {
    const ComposedBudget c = advanced_composition(k, {0.05, 1e-4}, 1e-6);
    EXPECT_GE(c.epsilon, prev.epsilon);
    EXPECT_GE(c.delta, prev.delta);
    prev = c;
  }
}

TEST(RandomizedResponse, EmpiricalStddev) {
  const DenseMatrix a = gaussian_matrix(500, 500, 0.0, 1.0, RngSeed{1});
  const DenseMatrix noise = subtract(randomized_response(a, {1.0, 1e-5}, RngSeed{2}), a);
  double sq = 0.0;
  for (double v : noise.data()) sq += v * v;
  const double sd = std::sqrt(sq / static_cast<double>(noise.size()));
  EXPECT_NEAR(sd, kSigmaDelta1e5, 0.02 * kSigmaDelta1e5);
}

TEST(RandomizedResponse, MeanAndVarianceTests) {
  const PrivacyBudget budget(0.5, 1e-6);
  const double sigma = gaussian_mechanism_sigma(1.0, budget);
  const DenseMatrix zero(400, 400);
  const DenseMatrix out = randomized_response(zero, budget, RngSeed{7});
  const double n = static_cast<double>(out.size());
  double sum = 0.0;
  for (double v : out.data()) sum += v;
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : out.data()) sq += (v - mean) * (v - mean);
  const double var = sq / (n - 1.0);
  EXPECT_LE(std::abs(mean), 4.0 * sigma / std::sqrt(n));
  EXPECT_LE(std::abs(var - sigma * sigma), 4.0 * sigma * sigma * std::sqrt(2.0 / (n - 1.0)));
}

TEST(RandomizedResponse, DeterministicAndInputIndependent) {
  const DenseMatrix a = gaussian_matrix(30, 20, 0.0, 5.0, RngSeed{1});
  const DenseMatrix b = gaussian_matrix(30, 20, 3.0, 1.0, RngSeed{2});
  const PrivacyBudget budget(1.0, 1e-5);
  EXPECT_EQ(randomized_response(a, budget, RngSeed{9}), randomized_response(a, budget, RngSeed{9}));
  const DenseMatrix na = subtract(randomized_response(a, budget, RngSeed{9}), a);
  const DenseMatrix nb = subtract(randomized_response(b, budget, RngSeed{9}), b);
  EXPECT_LE(frobenius_distance(na, nb), 1e-12 * frobenius_norm(na));
}

TEST(RandomizedResponse, NoiseOverride) {
  const DenseMatrix a = gaussian_matrix(10, 10, 0.0, 1.0, RngSeed{1});
  EXPECT_EQ(randomized_response(a, {1.0, 0.1}, RngSeed{2}, testing::NoiseOverride{0.0}), a);
  EXPECT_THROW(randomized_response(a, {1.0, 0.1}, RngSeed{2}, testing::NoiseOverride{-1.0}),
               InvalidArgument);
}

TEST(RrBaseline, ZeroNoiseRecoversRankK) {
  const DenseMatrix a = test::planted_low_rank(60, 90, 4, 1.0, RngSeed{3});
  const ApproxResult r = rr_low_rank_baseline(a, 4, {1.0, 1e-5}, RngSeed{1}, testing::NoiseOverride{0.0});
  EXPECT_LE(r.achieved_error, 1e-8 * frobenius_norm(a));
}

TEST(RrBaseline, ErrorScalesLikeSqrtKmPlusSqrtKn) {
  const std::size_t m = 128, n = 1024, k = 5;
  const DenseMatrix a = test::planted_low_rank(m, n, 5, 1.0, RngSeed{11});
  const double scale = std::sqrt(double(k * m)) + std::sqrt(double(k * n));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const ApproxResult r = rr_low_rank_baseline(a, k, {1.0, 1e-5}, RngSeed{s});
    const double ratio = r.achieved_error / scale;
    EXPECT_GE(ratio, 0.1);
    EXPECT_LE(ratio, 10.0);
    EXPECT_NEAR(r.achieved_error, frobenius_distance(a, r.b), 1e-10 * r.achieved_error);
    if (s < 3) {
      EXPECT_LE(test::rank_of(r.b), k);
    }
  }
}

TEST(RrBaseline, RejectsBadRank) {
  const DenseMatrix a(5, 8, 1.0);
  EXPECT_THROW(rr_low_rank_baseline(a, 0, {1.0, 0.1}, RngSeed{1}), InvalidArgument);
  EXPECT_THROW(rr_low_rank_baseline(a, 6, {1.0, 0.1}, RngSeed{1}), InvalidArgument);
}

}  // namespace
}  // namespace pfp
