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
#include "opnorm.hpp"

using namespace polycond;

TEST_CASE("opnorm of the zero tensor") {
  const auto r = opnorm(CoefficientTensor::zeros(SystemShape::make(4, 3)));
  CHECK(r.value == 0.0);
}

TEST_CASE("d = 1 matches the top singular value") {
  for (int k = 0; k < 10; ++k) {
    const auto g = oracle::gaussian_vec(8 * 9);
    const TensorView view{8, 9, 1, g};
    const auto r = opnorm(view, OpnormOptions{}, CounterStream(SeedPolicy{1}, static_cast<std::uint64_t>(k), purpose::kUser));
    const double s = Eigen::JacobiSVD<Eigen::MatrixXd>(oracle::to_matrix(g, 8, 9)).singularValues()(0);
    CHECK(std::abs(r.value - s * s) < 1e-8 * s * s);
  }
}

TEST_CASE("rank-one tensor") {
  const int n = 5, d = 3, m = 4;
  const auto u = oracle::unit_vec(m);
  const auto v = oracle::unit_vec(n);
  std::vector<double> data;
  for (int l = 0; l < m; ++l)
    oracle::for_each_index(n, d, [&](const std::vector<int>& idx) {
      double p = u[static_cast<std::size_t>(l)];
      for (int i : idx) p *= v[static_cast<std::size_t>(i)];
      data.push_back(p);
    });
  const auto r = opnorm(TensorView{m, n, d, data}, OpnormOptions{}, CounterStream(SeedPolicy{3}, 0, purpose::kUser));
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
  for (const auto& slot : r.arg) {
    double dot = 0;
    for (int i = 0; i < n; ++i) dot += slot[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    CHECK(std::abs(std::abs(dot) - 1.0) < 1e-6);
  }
}

TEST_CASE("value recomputes from arg and bounds every basis assignment") {
  const auto t = sample_system(SystemShape::make(5, 3), DistributionSpec::gaussian(), SeedPolicy{8});
  const auto r = opnorm(t, OpnormOptions{}, SeedPolicy{2});
  CHECK(std::abs(multilinear_objective(t.view(), r.arg) - r.value) < 1e-10 * std::max(1.0, r.value));
  for (const auto& slot : r.arg) CHECK(oracle::norm(slot) == doctest::Approx(1.0).epsilon(1e-12));

  double best_basis = 0;
  const int m = 4, n = 5;
  oracle::for_each_index(n, 3, [&](const std::vector<int>& idx) {
    double s = 0;
    for (int l = 0; l < m; ++l) {
      const double e = t.data()[static_cast<std::size_t>(l * 125 + idx[0] * 25 + idx[1] * 5 + idx[2])];
      s += e * e;
    }
    best_basis = std::max(best_basis, s);
  });
  CHECK(r.value >= best_basis * (1 - 1e-12));
}

TEST_CASE("invariance under slot sign flips and form permutations") {
  const auto t = sample_system(SystemShape::make(4, 2), DistributionSpec::gaussian(), SeedPolicy{13});
  const auto base = opnorm(t, OpnormOptions{}, SeedPolicy{5});
  const int m = 3, n = 4;
  std::vector<double> permuted(t.data().size()), flipped(t.data().size());
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const auto src = static_cast<std::size_t>(l * 16 + i * 4 + j);
        permuted[static_cast<std::size_t>(((l + 1) % m) * 16 + i * 4 + j)] = t.data()[src];
        flipped[src] = (i == 2 ? -1.0 : 1.0) * t.data()[src];  // negates coordinate 2 of slot 1
      }
  const auto rp = opnorm(TensorView{m, n, 2, permuted}, OpnormOptions{}, CounterStream(SeedPolicy{5}, 0, purpose::kRestarts));
  const auto rf = opnorm(TensorView{m, n, 2, flipped}, OpnormOptions{}, CounterStream(SeedPolicy{5}, 0, purpose::kRestarts));
  CHECK(rp.value == doctest::Approx(base.value).epsilon(1e-9));
  CHECK(rf.value == doctest::Approx(base.value).epsilon(1e-9));
}

TEST_CASE("more restarts never lower the estimate") {
  const auto t = sample_system(SystemShape::make(6, 3), DistributionSpec::gaussian(), SeedPolicy{21});
  const auto few = opnorm(t, OpnormOptions{3, 200, 1e-10}, SeedPolicy{9});
  const auto many = opnorm(t, OpnormOptions{30, 200, 1e-10}, SeedPolicy{9});
  CHECK(many.value >= few.value);
}

TEST_CASE("repeated slot sup matches a dense angle scan at n = 2") {
  // S symmetric, m = 3, n = 2, d = 2: sup over unit x of ||S(x, x)||^2.
  const auto t = symmetrize(sample_system(SystemShape::make(2, 2), DistributionSpec::gaussian(), SeedPolicy{4}));
  std::vector<double> data;
  for (int l = 0; l < 3; ++l) {
    const auto g = oracle::gaussian_vec(4);
    data.insert(data.end(), {g[0], 0.5 * (g[1] + g[2]), 0.5 * (g[1] + g[2]), g[3]});
  }
  const TensorView view{3, 2, 2, data};
  double scan = 0;
  for (int k = 0; k < 200000; ++k) {
    const double th = M_PI * k / 200000.0;
    const double c = std::cos(th), s = std::sin(th);
    double sum = 0;
    for (int l = 0; l < 3; ++l) {
      const double* a = &data[static_cast<std::size_t>(l * 4)];
      const double v = a[0] * c * c + (a[1] + a[2]) * c * s + a[3] * s * s;
      sum += v * v;
    }
    scan = std::max(scan, sum);
  }
  const auto r = sup_with_repeated_slot(view, 2, OpnormOptions{20, 500, 1e-12}, CounterStream(SeedPolicy{1}, 0, purpose::kUser));
  CHECK(r.value <= scan * (1 + 1e-9));
  CHECK(r.value >= scan * (1 - 1e-6));
  (void)t;
}

TEST_CASE("opnorm scaling table is reproducible and supports restriction") {
  OpnormScalingConfig cfg;
  cfg.d = 2;
  cfg.n_list = {4, 8};
  cfg.trials = 4;
  cfg.seeds = SeedPolicy{3};
  const auto a = opnorm_scaling(cfg);
  cfg.threads = 3;
  const auto b = opnorm_scaling(cfg);
  REQUIRE(a.size() == 2u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].values == b[i].values);
    CHECK(a[i].median == median(a[i].values));
    CHECK(a[i].median_over_n == a[i].median / a[i].n);
  }
  cfg.restrict_fraction = 0.5;
  const auto r = opnorm_scaling(cfg);
  CHECK(r[1].k == 4);
  CHECK(median({3.0, 1.0, 2.0, 10.0}) == 2.5);
}

TEST_CASE("d = 1 scaling stays near the matrix edge") {
  // Median sigma_max^2 of an (n-1) x n Gaussian matrix is close to (2 sqrt n)^2.
  OpnormScalingConfig cfg;
  cfg.d = 1;
  cfg.n_list = {8, 16, 32};
  cfg.trials = 9;
  cfg.seeds = SeedPolicy{12};
  for (const auto& row : opnorm_scaling(cfg)) {
    const double edge = std::pow(std::sqrt(row.n - 1.0) + std::sqrt(row.n), 2);
    CHECK(row.median <= 2.0 * edge);
    CHECK(row.median >= 0.5 * edge);
  }
}
