/*
   Copyright 2026 The polycond Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <doctest.h>

#include <cmath>

#include "ensembles.hpp"
#include "oracles.hpp"
#include "system.hpp"

using namespace polycond;

TEST_CASE("sample_system: support, moments and determinism") {
  const auto rad = sample_system(SystemShape::make(5, 3), DistributionSpec::rademacher(), SeedPolicy{3});
  for (double v : rad.data()) REQUIRE((v == 1.0 || v == -1.0));

  // 10 x 101^2 = 102010 entries per trial, ten trials.
  const auto shape = SystemShape::make(101, 2);
  double sum = 0, sq = 0;
  std::size_t count = 0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const auto g = sample_system(shape, DistributionSpec::gaussian(), SeedPolicy{9}, t);
    for (double v : g.data()) {
      sum += v;
      sq += v * v;
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  CHECK(count >= 1000000u);
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(count)));
  CHECK(std::abs(sq / static_cast<double>(count) - mean * mean - 1.0) < 0.01);

  const auto a = sample_system(SystemShape::make(4, 3), DistributionSpec::gaussian(), SeedPolicy{77}, 5);
  const auto b = sample_system(SystemShape::make(4, 3), DistributionSpec::gaussian(), SeedPolicy{77}, 5);
  const auto c = sample_system(SystemShape::make(4, 3), DistributionSpec::gaussian(), SeedPolicy{77}, 6);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK_THROWS(sample_system(SystemShape::make(200, 4), DistributionSpec::gaussian(), SeedPolicy{1}, 0, 1000));
}

TEST_CASE("KSS bookkeeping: Weyl norm per form equals the sum of squared monomial Gaussians") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto shape = SystemShape::make(3 + trial % 4, 2 + trial % 3);
    const auto sys = make_kss(shape, SeedPolicy{11}, static_cast<std::uint64_t>(trial));
    CHECK_FALSE(sys.det().has_value());
    const auto xi = kss_gaussians(shape, SeedPolicy{11}, static_cast<std::uint64_t>(trial));
    const auto w = weyl_norm(sys);
    const std::size_t N = xi.size() / static_cast<std::size_t>(shape.m());
    for (int l = 0; l < shape.m(); ++l) {
      double s = 0;
      for (std::size_t a = 0; a < N; ++a) s += xi[static_cast<std::size_t>(l) * N + a] * xi[static_cast<std::size_t>(l) * N + a];
      CHECK(std::abs(w.per_form[static_cast<std::size_t>(l)] * w.per_form[static_cast<std::size_t>(l)] - s) <= 1e-10 * s);
    }
    // The tensor is symmetric.
    const auto sym = symmetrize(sys.rand());
    double diff = 0;
    for (std::size_t i = 0; i < sym.data().size(); ++i)
      diff = std::max(diff, std::abs(sym.data()[i] - sys.rand().data()[i]));
    CHECK(diff < 1e-14);
  }
}

TEST_CASE("KSS at d = 1 is an iid Gaussian matrix") {
  const auto shape = SystemShape::make(6, 1);
  const auto sys = make_kss(shape, SeedPolicy{4});
  const auto xi = kss_gaussians(shape, SeedPolicy{4});
  REQUIRE(xi.size() == shape.entries());
  for (std::size_t i = 0; i < xi.size(); ++i) CHECK(sys.rand().data()[i] == xi[i]);
}

TEST_CASE("KSS coefficient of x1 x2 has variance 2") {
  const auto shape = SystemShape::make(3, 2);
  const int trials = 100000;
  double sum = 0, sq = 0;
  for (int t = 0; t < trials; ++t) {
    const auto sys = make_kss(shape, SeedPolicy{123}, static_cast<std::uint64_t>(t));
    const auto form = sys.rand().form(0);
    const double c = form[1] + form[3];  // a12 + a21
    sum += c;
    sq += c * c;
  }
  const double mean = sum / trials;
  CHECK(std::abs(sq / trials - mean * mean - 2.0) < 0.05);
}

TEST_CASE("gamma control") {
  const auto shape = SystemShape::make(4, 2);
  const auto zero = gamma_control_estimate(CoefficientTensor::zeros(shape), 0.0, 5, 50, SeedPolicy{1});
  CHECK(zero.passed);
  REQUIRE(zero.sup_estimates.size() == 3u);
  for (double v : zero.sup_estimates) CHECK(v == 0.0);

  // Estimates scale exactly with the square of the tensor scale, so a system
  // normalized to max estimate n^gamma / 4 passes and four times that fails.
  const double gamma = 1.0;
  const auto base = make_kss(shape, SeedPolicy{2}).rand();
  const auto rep = gamma_control_estimate(base, gamma, 20, 200, SeedPolicy{1});
  const double peak = *std::max_element(rep.sup_estimates.begin(), rep.sup_estimates.end());
  const double unit = std::sqrt(std::pow(shape.n, gamma) / peak);
  CHECK(gamma_control_estimate(scaled(base, 0.5 * unit), gamma, 20, 200, SeedPolicy{1}).passed);
  CHECK_FALSE(gamma_control_estimate(scaled(base, 2.0 * unit), gamma, 20, 200, SeedPolicy{1}).passed);

  // d = 1: the k = 0 sup is sigma_max^2.
  const auto lin = sample_system(SystemShape::make(7, 1), DistributionSpec::gaussian(), SeedPolicy{5});
  const auto lr = gamma_control_estimate(lin, 10.0, 20, 200, SeedPolicy{1});
  const auto A = oracle::to_matrix(Vector(lin.data().begin(), lin.data().end()), 6, 7);
  const double smax = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
  CHECK(std::abs(lr.sup_estimates[0] - smax * smax) < 1e-6 * smax * smax);

  // More restarts never lower an estimate.
  const auto few = gamma_control_estimate(base, gamma, 3, 200, SeedPolicy{1});
  for (std::size_t k = 0; k < few.sup_estimates.size(); ++k)
    CHECK(rep.sup_estimates[k] >= few.sup_estimates[k] * (1 - 1e-12));
}
