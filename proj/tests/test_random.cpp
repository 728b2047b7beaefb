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

#include <algorithm>
#include <cmath>
#include <set>

#include "errors.hpp"
#include "random.hpp"

using namespace polycond;

TEST_CASE("counter streams are pure functions of their key") {
  const CounterStream a(SeedPolicy{5}, 3, purpose::kRandomPart);
  const CounterStream b(SeedPolicy{5}, 3, purpose::kRandomPart);
  // Draws in opposite orders agree entry by entry.
  std::vector<double> fwd, bwd(100);
  for (int i = 0; i < 100; ++i) fwd.push_back(a.gaussian(static_cast<std::uint64_t>(i)));
  for (int i = 99; i >= 0; --i) bwd[static_cast<std::size_t>(i)] = b.gaussian(static_cast<std::uint64_t>(i));
  CHECK(fwd == bwd);

  const CounterStream other_trial(SeedPolicy{5}, 4, purpose::kRandomPart);
  const CounterStream other_purpose(SeedPolicy{5}, 3, purpose::kRestarts);
  const CounterStream other_seed(SeedPolicy{6}, 3, purpose::kRandomPart);
  CHECK(a.bits(0) != other_trial.bits(0));
  CHECK(a.bits(0) != other_purpose.bits(0));
  CHECK(a.bits(0) != other_seed.bits(0));
  CHECK(a.substream(0).bits(0) != a.substream(1).bits(0));
  CHECK(a.substream(7).bits(3) == b.substream(7).bits(3));
}

TEST_CASE("uniform lies in (0, 1] and below() stays in range") {
  StreamCursor cur(CounterStream(SeedPolicy{1}, 0, purpose::kUser));
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const double u = cur.uniform();
    CHECK_UNARY(u > 0.0);
    CHECK_UNARY(u <= 1.0);
    const auto k = cur.below(7);
    REQUIRE(k < 7u);
    ++counts[k];
  }
  // Each bucket has mean 10^4 and sd about 93.
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("distribution moments") {
  const CounterStream s(SeedPolicy{42}, 0, purpose::kUser);
  const int N = 200000;
  for (const auto& dist : {DistributionSpec::gaussian(), DistributionSpec::rademacher(),
                           DistributionSpec::uniform_pm(),
                           DistributionSpec::table({-2.0, 0.5}, {0.2, 0.8})}) {
    double mean = 0, sq = 0;
    for (int i = 0; i < N; ++i) {
      const double v = dist.draw(s, static_cast<std::uint64_t>(i));
      mean += v;
      sq += v * v;
      if (dist.kind == DistributionSpec::Kind::Rademacher) REQUIRE((v == 1.0 || v == -1.0));
      if (dist.kind == DistributionSpec::Kind::UniformPm) REQUIRE(std::abs(v) <= std::sqrt(3.0));
      if (dist.kind == DistributionSpec::Kind::Table) REQUIRE((v == -2.0 || v == 0.5));
    }
    mean /= N;
    const double var = sq / N - mean * mean;
    CHECK(std::abs(mean) < 5.0 * 2.0 / std::sqrt(N));
    CHECK(std::abs(var - 1.0) < 0.02);
  }
}

TEST_CASE("table distributions are validated") {
  CHECK_THROWS_AS(DistributionSpec::table({-1.0, 1.0}, {0.3, 0.7}), ArgumentError);  // mean 0.4
  CHECK_THROWS_AS(DistributionSpec::table({-2.0, 2.0}, {0.5, 0.5}), ArgumentError);  // variance 4
  CHECK_THROWS_AS(DistributionSpec::table({-1.0, 1.0}, {0.5}), ArgumentError);
  CHECK_THROWS_AS(DistributionSpec::table({-1.0, 1.0}, {-0.5, 1.5}), ArgumentError);
  CHECK_NOTHROW(DistributionSpec::table({-1.0, 0.0, 1.0}, {0.5, 0.0, 0.5}));
}

TEST_CASE("distribution names round trip") {
  for (auto k : {DistributionSpec::Kind::Gaussian, DistributionSpec::Kind::Rademacher,
                 DistributionSpec::Kind::UniformPm, DistributionSpec::Kind::Table})
    CHECK(kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(kind_from_string("cauchy"), ConfigError);
}
