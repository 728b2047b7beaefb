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

#ifndef POLYCOND_STATS_HPP
#define POLYCOND_STATS_HPP

#include <cstdint>
#include <vector>

namespace polycond {

struct Interval {
  double low = 0.0;
  double high = 1.0;
  bool contains(double p) const { return low <= p && p <= high; }
};

/// Wilson score interval for a binomial proportion; z = 1.96 gives 95%.
Interval wilson_interval(std::int64_t hits, std::int64_t trials, double z = 1.959963984540054);

/// Least-squares slope of log(p) against log(eps) over points with p > 0.
double loglog_slope(const std::vector<double>& eps, const std::vector<double>& p);

}  // namespace polycond

#endif  // POLYCOND_STATS_HPP
