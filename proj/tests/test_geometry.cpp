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

#include "errors.hpp"
#include "geometry.hpp"
#include "oracles.hpp"

using namespace polycond;

namespace {

std::vector<double> uniform_vector(int n) { return std::vector<double>(static_cast<std::size_t>(n), 1 / std::sqrt(n)); }

}  // namespace

TEST_CASE("parameters") {
  const auto p = CompressibilityParams::for_degree(2);
  CHECK(p.delta == doctest::Approx(0.025));
  CHECK(p.rho == doctest::Approx(0.025));
  CHECK(p.kappa0 == 0.1);
  CHECK_THROWS(CompressibilityParams{0.0, 0.1, 0.1}.validate());
  CHECK_THROWS(CompressibilityParams{0.1, 1.0, 0.1}.validate());
  // 0.07 * 100 rounds to 7.000000000000001 in floating point.
  CHECK(CompressibilityParams{0.07, 0.1, 0.1}.sparsity(100) == 7);
  CHECK(CompressibilityParams{0.025, 0.1, 0.1}.sparsity(8) == 1);
  CHECK(CompressibilityParams{0.25, 0.1, 0.1}.sparsity(9) == 3);
}

TEST_CASE("classification") {
  const CompressibilityParams quarter{0.25, 0.25, 0.1};
  CHECK(classify(std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0}, quarter).cls == VectorClass::Sparse);
  CHECK(classify(std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0}, quarter).dist_to_sparse == 0.0);

  const auto u = classify(uniform_vector(8), quarter);
  CHECK(u.cls == VectorClass::Incompressible);
  CHECK(u.dist_to_sparse == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));
  REQUIRE(u.spread_set.has_value());
  CHECK(u.spread_set->size() == 8u);

  // Within rho of a 2-sparse vector but not sparse.
  std::vector<double> c{0.8, 0.59, 0.1, 0, 0, 0, 0, 0};
  const double nc = oracle::norm(c);
  for (auto& e : c) e /= nc;
  const auto rc = classify(c, quarter);
  CHECK(rc.cls == VectorClass::Compressible);
  CHECK_FALSE(rc.spread_set.has_value());
  CHECK(rc.dist_to_sparse <= 0.25);
}

TEST_CASE("truncation is the nearest sparse vector") {
  const CompressibilityParams p{0.25, 0.25, 0.1};
  const int n = 8, k = p.sparsity(n);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = oracle::unit_vec(n);
    const double dist = classify(x, p).dist_to_sparse;
    for (int c = 0; c < 500; ++c) {
      std::vector<double> s(n, 0.0);
      std::vector<int> idx(n);
      for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
      std::shuffle(idx.begin(), idx.end(), oracle::rng());
      const auto g = oracle::gaussian_vec(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) s[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = g[static_cast<std::size_t>(i)];
      double d2 = 0;
      for (int i = 0; i < n; ++i) d2 += std::pow(x[static_cast<std::size_t>(i)] - s[static_cast<std::size_t>(i)], 2);
      REQUIRE(dist <= std::sqrt(d2) + 1e-15);
    }
  }
}

TEST_CASE("sign and permutation invariance") {
  const auto p = CompressibilityParams::for_degree(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = oracle::unit_vec(16);
    const auto a = classify(x, p);
    std::shuffle(x.begin(), x.end(), oracle::rng());
    for (std::size_t i = 0; i < x.size(); i += 3) x[i] = -x[i];
    const auto b = classify(x, p);
    CHECK(a.cls == b.cls);
    CHECK(a.dist_to_sparse == doctest::Approx(b.dist_to_sparse).epsilon(1e-14));
  }
}

TEST_CASE("spread sets") {
  const auto p = CompressibilityParams::for_degree(2);
  CHECK_THROWS_AS(spread_set(std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0}, p), PreconditionError);
  for (int n : {8, 16}) {
    int seen = 0;
    for (int trial = 0; trial < 2000; ++trial) {
      const auto x = oracle::unit_vec(static_cast<std::size_t>(n));
      if (classify(x, p).cls != VectorClass::Incompressible) continue;
      ++seen;
      const auto s = spread_set(x, p);
      CHECK(static_cast<double>(s.size()) >= p.rho * p.rho * p.delta * n / 2);
      const double lo = p.rho / std::sqrt(2.0 * n), hi = 1 / std::sqrt(p.delta * n);
      for (int k : s) {
        const double a = std::abs(x[static_cast<std::size_t>(k)]);
        CHECK(a >= lo);
        CHECK(a <= hi);
      }
    }
    CHECK(seen > 1000);
  }
}
