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

#include "ensembles.hpp"

#include <cmath>

#include "errors.hpp"

namespace polycond {

CoefficientTensor sample_system(SystemShape shape, const DistributionSpec& dist,
                                const SeedPolicy& seeds, std::uint64_t trial, std::size_t cap) {
  shape = SystemShape::make(shape.n, shape.d);
  shape.check_cap(cap);
  dist.validate();
  const CounterStream stream(seeds, trial, purpose::kRandomPart);
  std::vector<double> data(shape.entries());
  for (std::size_t e = 0; e < data.size(); ++e) data[e] = dist.draw(stream, e);
  return CoefficientTensor(shape, std::move(data));
}

std::vector<double> kss_gaussians(SystemShape shape, const SeedPolicy& seeds, std::uint64_t trial) {
  const std::size_t count = sorted_tuples(shape.n, shape.d).size() * static_cast<std::size_t>(shape.m());
  const CounterStream stream(seeds, trial, purpose::kKssMonomials);
  std::vector<double> xi(count);
  for (std::size_t i = 0; i < count; ++i) xi[i] = stream.gaussian(i);
  return xi;
}

PolynomialSystem make_kss(SystemShape shape, const SeedPolicy& seeds, std::uint64_t trial,
                          std::size_t cap) {
  shape = SystemShape::make(shape.n, shape.d);
  shape.check_cap(cap);
  const auto monomials = sorted_tuples(shape.n, shape.d);
  const auto offset_mono = monomial_of_offsets(shape.n, shape.d);
  const auto xi = kss_gaussians(shape, seeds, trial);
  std::vector<double> inv_sqrt(monomials.size());
  for (std::size_t a = 0; a < monomials.size(); ++a) inv_sqrt[a] = 1.0 / std::sqrt(multinomial(monomials[a]));

  const std::size_t pf = shape.per_form();
  std::vector<double> data(shape.entries());
  for (int l = 0; l < shape.m(); ++l) {
    const std::size_t base = static_cast<std::size_t>(l) * monomials.size();
    for (std::size_t p = 0; p < pf; ++p) {
      const std::size_t a = offset_mono[p];
      // sqrt(w) * xi / w per ordering, w orderings in total.
      data[static_cast<std::size_t>(l) * pf + p] = xi[base + a] * inv_sqrt[a];
    }
  }
  return PolynomialSystem(CoefficientTensor(shape, std::move(data)));
}

GammaReport gamma_control_estimate(const CoefficientTensor& det, double gamma, int restarts,
                                   int sweeps, const SeedPolicy& seeds) {
  if (restarts < 1) throw ArgumentError("gamma_control_estimate: restarts must be >= 1");
  if (sweeps < 1) throw ArgumentError("gamma_control_estimate: sweeps must be >= 1");
  const SystemShape shape = det.shape();
  const CoefficientTensor sym = symmetrize(det);
  GammaReport report;
  report.gamma = gamma;
  report.threshold = std::pow(static_cast<double>(shape.n), gamma);
  const OpnormOptions options{restarts, sweeps, 1e-12};
  for (int k = 0; k <= shape.d; ++k) {
    // D^(k)_x(y1..yk) = d!/(d-k)! * S(x^(d-k), y1, ..., yk).
    double falling = 1.0;
    for (int j = 0; j < k; ++j) falling *= shape.d - j;
    const CounterStream stream = CounterStream(seeds, 0, purpose::kRestarts).substream(static_cast<std::uint64_t>(k));
    const OpnormResult r = sup_with_repeated_slot(sym.view(), shape.d - k, options, stream);
    report.sup_estimates.push_back(falling * falling * r.value);
  }
  for (double v : report.sup_estimates)
    if (v > report.threshold) report.passed = false;
  return report;
}

}  // namespace polycond
