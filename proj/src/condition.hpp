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

#ifndef POLYCOND_CONDITION_HPP
#define POLYCOND_CONDITION_HPP

#include <cstdint>

#include "manifold.hpp"
#include "random.hpp"
#include "system.hpp"

namespace polycond {

/// Orthonormal pair; construction checks ||x|| = ||y|| = 1 and x.y = 0 to 1e-10.
class UnitPair {
 public:
  static UnitPair make(std::span<const double> x, std::span<const double> y);
  static UnitPair from(const PairPoint& p);

  const Vector& x() const { return x_; }
  const Vector& y() const { return y_; }

 private:
  Vector x_, y_;
};

/// Non-negative real or +infinity, with the infinity carried as a flag.
struct ExtendedReal {
  double value = 0.0;
  bool infinite = false;

  static ExtendedReal inf() { return {0.0, true}; }
  bool operator<=(const ExtendedReal& o) const {
    return o.infinite || (!infinite && value <= o.value);
  }
};

struct CondReport {
  ExtendedReal mu1;
  ExtendedReal mu2;
  double sigma_min_tangent = 0.0;
  double weyl_total = 0.0;
};

struct LMinResult {
  double value = 0.0;
  UnitPair argmin;
  int restarts_used = 0;
  bool converged = false;
};

struct LMinOptions {
  int restarts = 50;
  int max_iters = 200;
  double tol = 1e-12;
  SeedPolicy seeds;
  std::uint64_t trial = 0;
};

/// d^(9/2) n, the normalizer inside L(x, y).
double l_scale(const SystemShape& shape);

/// L(x, y) = sqrt(||f(x)|| / (d^(9/2) n)^(1/2) + ||D_x(y)||^2 / (d^(9/2) n)).
double l_pair(const PolynomialSystem& sys, const UnitPair& p);

/// Multistart minimization of L(x, y) over orthonormal pairs. The returned
/// value is L recomputed at the best pair, an upper bound on the minimum.
LMinResult l_min(const PolynomialSystem& sys, const LMinOptions& options);

/// L^2 and its least-squares majorizer for the pair optimizer.
PairObjective l_squared_objective(const SymmetricEvaluator& eval);
PairModel l_squared_model(const SymmetricEvaluator& eval);

/// Pointwise mu^(1) and mu^(2) on the combined real system with Delta = sqrt(d) I.
/// When the Weyl norm is zero both are reported as 0.
CondReport cond_at(const PolynomialSystem& sys, std::span<const double> x);

double sigma_min_tangent(const PolynomialSystem& sys, std::span<const double> x);

/// Random system with f(x) = 0 and D_x(y) = 0: every form of a sampled tensor
/// is projected onto the orthogonal complement of the two linear functionals
/// a -> f_l(x) and a -> D_{l,x}(y).
PolynomialSystem plant_double_root(SystemShape shape, const UnitPair& p, const DistributionSpec& dist,
                                   const SeedPolicy& seeds, std::uint64_t trial = 0);

struct GrowthResult {
  double max_ratio = 0.0;
  int samples = 0;
};

/// max over sampled |t| <= 1, ||z|| <= 1 of ||f(x + eps t y + eps^2 z)|| / (sqrt(n) eps^2).
/// Sample 0 is always t = 0, z = 0. Requires l_pair(sys, p) <= eps < 1.
GrowthResult growth_check(const PolynomialSystem& sys, const UnitPair& p, double eps, int samples,
                          const SeedPolicy& seeds, std::uint64_t trial = 0);

}  // namespace polycond

#endif  // POLYCOND_CONDITION_HPP
