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

#include "diophantine.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "parallel.hpp"

namespace polycond {

double dist_to_lattice(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) {
    const double frac = e - std::floor(e);
    const double r = std::min(frac, 1.0 - frac);
    s += r * r;
  }
  return std::sqrt(s);
}

Vector lift_monomial(std::span<const double> x, int d, std::size_t cap) {
  if (d < 1) throw ArgumentError("lift_monomial: d must be >= 1");
  const SystemShape probe{static_cast<int>(x.size()), d};
  if (probe.per_form() > cap) throw AllocationCapError("lift_monomial: n^d exceeds the entry cap");
  Vector out(x.begin(), x.end());
  for (int k = 1; k < d; ++k) {
    Vector next(out.size() * x.size());
    std::size_t p = 0;
    for (double a : out)
      for (double b : x) next[p++] = a * b;
    out = std::move(next);
  }
  return out;
}

double alpha_policy(int n, int d) {
  if (n < 3 || d < 1) throw ArgumentError("alpha_policy: need n >= 3 and d >= 1");
  const double ln = std::log(static_cast<double>(n));
  const double lln = std::log(ln);
  const bool slow_degree = d >= 2 && lln > 0.0 && d <= ln / (3.0 * lln);
  const double exponent = slow_degree ? 7.0 * d / 16.0 - 0.25 : d / 4.0;
  return std::pow(static_cast<double>(n), exponent);
}

LcdQuery LcdQuery::with_defaults(std::span<const double> y, double alpha, double gamma0, double d_max) {
  double inf_norm = 0.0;
  for (double e : y) inf_norm = std::max(inf_norm, std::abs(e));
  LcdQuery q;
  q.alpha = alpha;
  q.gamma0 = gamma0;
  q.d_max = d_max;
  q.coarse_step = inf_norm > 0 ? std::min(1e-3, 1.0 / (4.0 * inf_norm)) : 1e-3;
  q.refine_tol = q.coarse_step * 1e-4;
  return q;
}

void LcdQuery::validate() const {
  if (!(alpha > 0)) throw ArgumentError("lcd: alpha must be positive");
  if (!(gamma0 > 0 && gamma0 < 1)) throw ArgumentError("lcd: gamma0 must lie in (0, 1)");
  if (!(d_max > 0)) throw ArgumentError("lcd: d_max must be positive");
  if (!(coarse_step > 0 && coarse_step < 0.5)) throw ArgumentError("lcd: coarse_step must lie in (0, 1/2)");
  if (!(refine_tol > 0 && refine_tol < coarse_step)) throw ArgumentError("lcd: refine_tol must lie in (0, coarse_step)");
}

bool lcd_condition(std::span<const double> y, double D, const LcdQuery& q, LcdCertificate* cert) {
  Vector scaled(y.begin(), y.end());
  double norm_sq = 0.0;
  for (auto& e : scaled) {
    e *= D;
    norm_sq += e * e;
  }
  const double dist = dist_to_lattice(scaled);
  const double threshold = std::min(q.gamma0 * std::sqrt(norm_sq), q.alpha);
  if (cert) *cert = {D, dist, threshold};
  return dist < threshold;
}

LcdResult lcd_estimate(std::span<const double> y, const LcdQuery& q) {
  q.validate();
  double norm_sq = 0.0;
  for (double e : y) norm_sq += e * e;
  if (!(norm_sq > 0.0)) throw PreconditionError("lcd_estimate: y must be nonzero");

  LcdResult res;
  double lo = 0.0;
  for (std::int64_t k = 1;; ++k) {
    const double D = static_cast<double>(k) * q.coarse_step;
    if (D > q.d_max) return res;
    if (!lcd_condition(y, D, q)) {
      lo = D;
      continue;
    }
    double hi = D;
    while (hi - lo > q.refine_tol) {
      const double mid = 0.5 * (lo + hi);
      if (lcd_condition(y, mid, q)) hi = mid; else lo = mid;
    }
    res.found = true;
    res.lcd = hi;
    lcd_condition(y, hi, q, &res.certificate);
    return res;
  }
}

std::vector<ConcentrationRow> small_ball_estimate(std::span<const double> y, const DistributionSpec& dist,
                                                  std::span<const double> eps_grid, std::int64_t trials,
                                                  const SeedPolicy& seeds, int threads) {
  double norm_sq = 0.0;
  for (double e : y) norm_sq += e * e;
  if (norm_sq < 1.0 - 1e-12) throw PreconditionError("small_ball_estimate: requires ||y|| >= 1");
  if (trials < 10'000) throw PreconditionError("small_ball_estimate: requires at least 1e4 trials");
  dist.validate();

  std::vector<double> sums(static_cast<std::size_t>(trials));
  parallel_for(sums.size(), threads, [&](std::size_t t) {
    const CounterStream stream(seeds, t, purpose::kSmallBall);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += dist.draw(stream, i) * y[i];
    sums[t] = s;
  });
  std::sort(sums.begin(), sums.end());

  std::vector<ConcentrationRow> rows;
  for (double eps : eps_grid) {
    if (!(eps >= 0.0)) throw ArgumentError("small_ball_estimate: eps must be >= 0");
    std::size_t best = 0, hi = 0;
    for (std::size_t lo = 0; lo < sums.size(); ++lo) {
      if (hi < lo) hi = lo;
      while (hi < sums.size() && sums[hi] - sums[lo] <= 2.0 * eps) ++hi;
      best = std::max(best, hi - lo);
    }
    ConcentrationRow row;
    row.parameter = eps;
    row.hits = static_cast<std::int64_t>(best);
    row.trials = trials;
    row.estimate = static_cast<double>(best) / static_cast<double>(trials);
    row.ci = wilson_interval(row.hits, trials);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ConcentrationRow> tensorization_check(const DistributionSpec& dist, int n,
                                                  std::span<const double> delta_grid, std::int64_t trials,
                                                  const SeedPolicy& seeds, const std::optional<Vector>& weights,
                                                  int threads) {
  if (n < 1) throw ArgumentError("tensorization_check: n must be >= 1");
  if (trials < 100'000) throw PreconditionError("tensorization_check: requires at least 1e5 trials");
  dist.validate();
  std::vector<double> bounds;
  for (double delta : delta_grid) {
    if (!(delta >= 0.0)) throw ArgumentError("tensorization_check: delta must be >= 0");
    bounds.push_back(delta * delta * n);
  }

  constexpr std::size_t kBlocks = 256;
  const auto total = static_cast<std::size_t>(trials);
  std::vector<std::vector<std::int64_t>> block_hits(kBlocks, std::vector<std::int64_t>(bounds.size(), 0));
  parallel_for(kBlocks, threads, [&](std::size_t b) {
    const std::size_t begin = total * b / kBlocks, end = total * (b + 1) / kBlocks;
    auto& hits = block_hits[b];
    for (std::size_t t = begin; t < end; ++t) {
      const CounterStream stream(seeds, t, purpose::kTensorization);
      double s = 0.0;
      for (int l = 0; l < n; ++l) {
        double eta;
        if (weights) {
          eta = 0.0;
          const std::size_t base = static_cast<std::size_t>(l) * weights->size();
          for (std::size_t i = 0; i < weights->size(); ++i) eta += dist.draw(stream, base + i) * (*weights)[i];
        } else {
          eta = dist.draw(stream, static_cast<std::uint64_t>(l));
        }
        s += eta * eta;
      }
      for (std::size_t j = 0; j < bounds.size(); ++j)
        if (s < bounds[j]) ++hits[j];
    }
  });

  std::vector<ConcentrationRow> rows;
  for (std::size_t j = 0; j < bounds.size(); ++j) {
    ConcentrationRow row;
    row.parameter = delta_grid[j];
    for (const auto& h : block_hits) row.hits += h[j];
    row.trials = trials;
    row.estimate = static_cast<double>(row.hits) / static_cast<double>(trials);
    row.ci = wilson_interval(row.hits, trials);
    rows.push_back(row);
  }
  return rows;
}

double fitted_c1(const std::vector<ConcentrationRow>& rows, double lcd, double gamma0, double alpha) {
  double c = 0.0;
  for (const auto& r : rows) {
    if (r.parameter < 1.0 / lcd) continue;
    c = std::max(c, r.estimate / (r.parameter / gamma0 + std::exp(-2.0 * alpha * alpha)));
  }
  return c;
}

}  // namespace polycond
