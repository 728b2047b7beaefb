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

#ifndef POLYCOND_ENSEMBLES_HPP
#define POLYCOND_ENSEMBLES_HPP

#include <cstdint>
#include <vector>

#include "opnorm.hpp"
#include "random.hpp"
#include "system.hpp"

namespace polycond {

/// Entry e of the tensor is draw e of stream (seeds, trial, kRandomPart).
CoefficientTensor sample_system(SystemShape shape, const DistributionSpec& dist,
                                const SeedPolicy& seeds, std::uint64_t trial = 0,
                                std::size_t cap = kDefaultEntryCap);

/// Kostlan-Shub-Smale system: the coefficient of x^alpha in form l is
/// sqrt(multinomial(alpha)) * xi(l, alpha), spread equally over the index
/// orderings of alpha. No deterministic part.
PolynomialSystem make_kss(SystemShape shape, const SeedPolicy& seeds, std::uint64_t trial = 0,
                          std::size_t cap = kDefaultEntryCap);

/// The standard Gaussians xi(l, alpha) used by make_kss, form-major, monomials
/// in sorted_tuples order.
std::vector<double> kss_gaussians(SystemShape shape, const SeedPolicy& seeds,
                                  std::uint64_t trial = 0);

struct GammaReport {
  double gamma = 0.0;
  /// Index k: estimated sup of ||D^(k)_x(y1, ..., yk)||^2 over unit vectors.
  std::vector<double> sup_estimates;
  double threshold = 0.0;  // n^gamma
  bool passed = true;
};

/// Lower-bound check of gamma-control for a deterministic part: every sup is
/// estimated by alternating maximization, so "passed" means no violation found.
GammaReport gamma_control_estimate(const CoefficientTensor& det, double gamma, int restarts = 50,
                                   int sweeps = 200, const SeedPolicy& seeds = {});

}  // namespace polycond

#endif  // POLYCOND_ENSEMBLES_HPP
