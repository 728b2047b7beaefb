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

#include "stats.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace polycond {

Interval wilson_interval(std::int64_t hits, std::int64_t trials, double z) {
  if (trials <= 0 || hits < 0 || hits > trials) throw ArgumentError("wilson_interval: need 0 <= hits <= trials, trials > 0");
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double center = (p + z2 / (2.0 * nt)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
  // The exact bounds at p = 0 and p = 1 are 0 and 1; pin them against roundoff.
  const double low = hits == 0 ? 0.0 : std::max(0.0, center - half);
  const double high = hits == trials ? 1.0 : std::min(1.0, center + half);
  return {low, high};
}

double loglog_slope(const std::vector<double>& eps, const std::vector<double>& p) {
  if (eps.size() != p.size()) throw ArgumentError("loglog_slope: length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(p[i] > 0.0) || !(eps[i] > 0.0)) continue;
    const double lx = std::log(eps[i]), ly = std::log(p[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  if (k < 2) throw ArgumentError("loglog_slope: need at least two positive points");
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace polycond
