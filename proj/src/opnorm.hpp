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

#ifndef POLYCOND_OPNORM_HPP
#define POLYCOND_OPNORM_HPP

#include <optional>
#include <vector>

#include "random.hpp"
#include "system.hpp"

namespace polycond {

struct OpnormOptions {
  int restarts = 20;
  int max_sweeps = 200;
  double tol = 1e-10;
};

/// Lower bound on sup over unit slot vectors of sum_l t_l(v1, ..., vd)^2.
struct OpnormResult {
  double value = 0.0;  // squared sup estimate
  std::vector<Vector> arg;
  int sweeps = 0;
  int restarts = 0;
  bool converged = false;

  double norm() const;
};

/// sum_l t_l(v1, ..., vd)^2.
double multilinear_objective(const TensorView& t, std::span<const Vector> slots);

/// Alternating maximization: each slot update is the top right singular vector
/// of the partial contraction, so the objective is monotone within a restart.
/// Restart r starts from Gaussian vectors of stream.substream(r).
OpnormResult opnorm(const TensorView& t, const OpnormOptions& options, const CounterStream& stream);
OpnormResult opnorm(const CoefficientTensor& t, const OpnormOptions& options = {},
                    const SeedPolicy& seeds = {});

/// sup of ||S(x, ..., x, y1, ..., yk)||^2 over unit x, y_j where x fills the
/// first `repeated` slots of the symmetric tensor S. Slots with a single
/// vector get exact updates; the repeated block uses a power step with
/// backtracking and only accepts improvements.
OpnormResult sup_with_repeated_slot(const TensorView& symmetric, int repeated,
                                    const OpnormOptions& options, const CounterStream& stream);

struct OpnormScalingRow {
  int n = 0;
  int d = 0;
  /// Index range per slot (k < n for the restricted rectangular variant).
  int k = 0;
  std::vector<double> values;
  double median = 0.0;
  double median_over_n = 0.0;
};

struct OpnormScalingConfig {
  int d = 2;
  std::vector<int> n_list;
  DistributionSpec dist;
  int trials = 20;
  SeedPolicy seeds;
  OpnormOptions options;
  /// When set, each slot index ranges over the first ceil(fraction * n)
  /// coordinates only.
  std::optional<double> restrict_fraction;
  int threads = 1;
};

std::vector<OpnormScalingRow> opnorm_scaling(const OpnormScalingConfig& config);

double median(std::vector<double> values);

}  // namespace polycond

#endif  // POLYCOND_OPNORM_HPP
