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

#ifndef POLYCOND_DIOPHANTINE_HPP
#define POLYCOND_DIOPHANTINE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "random.hpp"
#include "stats.hpp"
#include "system.hpp"

namespace polycond {

/// Euclidean distance from v to the integer lattice.
double dist_to_lattice(std::span<const double> v);

/// y_x(i1, ..., id) = x_i1 * ... * x_id, row-major, length n^d.
Vector lift_monomial(std::span<const double> x, int d, std::size_t cap = kDefaultEntryCap);

/// Default alpha for the essential LCD: n^(7d/16 - 1/4) when
/// d <= log n / (3 log log n), n^(d/4) otherwise.
double alpha_policy(int n, int d);

struct LcdQuery {
  double alpha = 1.0;
  double gamma0 = 0.5;
  double d_max = 1.0;
  double coarse_step = 1e-3;
  double refine_tol = 1e-7;

  /// coarse_step = min(1e-3, 1 / (4 ||y||_inf)) and refine_tol = coarse_step / 1e4.
  static LcdQuery with_defaults(std::span<const double> y, double alpha, double gamma0, double d_max);
  void validate() const;
};

struct LcdCertificate {
  double d_star = 0.0;
  double lattice_dist = 0.0;
  double threshold = 0.0;  // min(gamma0 ||D* y||, alpha)
};

struct LcdResult {
  bool found = false;
  double lcd = 0.0;
  LcdCertificate certificate;
};

/// Whether dist(D y, Z^m) < min(gamma0 ||D y||, alpha); fills the certificate.
bool lcd_condition(std::span<const double> y, double D, const LcdQuery& q, LcdCertificate* cert = nullptr);

/// Scans D = coarse_step, 2 coarse_step, ... up to d_max; the first D meeting
/// the LCD condition is refined by bisection against the previous grid point.
LcdResult lcd_estimate(std::span<const double> y, const LcdQuery& q);

struct ConcentrationRow {
  double parameter = 0.0;  // epsilon or delta
  double estimate = 0.0;
  Interval ci;
  std::int64_t hits = 0;
  std::int64_t trials = 0;
};

/// Monte Carlo estimate of sup_v P(|sum_i a_i y_i - v| <= eps) for every eps:
/// the largest fraction of sampled sums inside a closed window of width 2 eps.
std::vector<ConcentrationRow> small_ball_estimate(std::span<const double> y, const DistributionSpec& dist,
                                                  std::span<const double> eps_grid, std::int64_t trials,
                                                  const SeedPolicy& seeds, int threads = 1);

/// Empirical P(eta_1^2 + ... + eta_n^2 < delta^2 n). eta_l is a raw draw of
/// `dist`, or |sum_i a_i w_i| when weights are given.
std::vector<ConcentrationRow> tensorization_check(const DistributionSpec& dist, int n,
                                                  std::span<const double> delta_grid, std::int64_t trials,
                                                  const SeedPolicy& seeds,
                                                  const std::optional<Vector>& weights = {}, int threads = 1);

/// Smallest C with estimate <= C (eps / gamma0 + exp(-2 alpha^2)) over rows
/// with eps >= 1 / lcd.
double fitted_c1(const std::vector<ConcentrationRow>& rows, double lcd, double gamma0, double alpha);

}  // namespace polycond

#endif  // POLYCOND_DIOPHANTINE_HPP
