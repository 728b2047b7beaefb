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

#ifndef POLYCOND_GEOMETRY_HPP
#define POLYCOND_GEOMETRY_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace polycond {

struct CompressibilityParams {
  double delta = 0.025;
  double rho = 0.025;
  double kappa0 = 0.1;

  /// delta = rho = kappa0 / d^2.
  static CompressibilityParams for_degree(int d, double kappa0 = 0.1);
  void validate() const;
  /// ceil(delta * n), at least 1.
  int sparsity(int n) const;
};

enum class VectorClass { Sparse, Compressible, Incompressible };
std::string to_string(VectorClass c);

struct CompressibilityReport {
  VectorClass cls = VectorClass::Sparse;
  double dist_to_sparse = 0.0;
  std::optional<std::vector<int>> spread_set;
};

/// Entries with magnitude below this count as zero.
inline constexpr double kSupportThreshold = 1e-12;

CompressibilityReport classify(std::span<const double> x, const CompressibilityParams& p);

/// {k : rho / sqrt(2n) <= |x_k| <= 1 / sqrt(delta n)}. Throws PreconditionError
/// unless x is incompressible and InvariantViolation if the set has fewer than
/// rho^2 delta n / 2 elements.
std::vector<int> spread_set(std::span<const double> x, const CompressibilityParams& p);

}  // namespace polycond

#endif  // POLYCOND_GEOMETRY_HPP
