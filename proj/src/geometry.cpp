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

#include "geometry.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace polycond {
namespace {

void require_unit(std::span<const double> x) {
  double s = 0.0;
  for (double e : x) s += e * e;
  if (x.empty() || std::abs(std::sqrt(s) - 1.0) > 1e-10)
    throw ContractViolation("compressibility: x must be a unit vector");
}

std::vector<int> band(std::span<const double> x, const CompressibilityParams& p) {
  const double n = static_cast<double>(x.size());
  const double lo = p.rho / std::sqrt(2.0 * n);
  const double hi = 1.0 / std::sqrt(p.delta * n);
  std::vector<int> sigma;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double a = std::abs(x[k]);
    if (lo <= a && a <= hi) sigma.push_back(static_cast<int>(k));
  }
  return sigma;
}

}  // namespace

CompressibilityParams CompressibilityParams::for_degree(int d, double kappa0) {
  if (d < 1) throw ArgumentError("compressibility: d must be >= 1");
  const double v = kappa0 / (static_cast<double>(d) * d);
  CompressibilityParams p{v, v, kappa0};
  p.validate();
  return p;
}

void CompressibilityParams::validate() const {
  if (!(delta > 0 && delta < 1) || !(rho > 0 && rho < 1))
    throw ArgumentError("compressibility: delta and rho must lie in (0, 1)");
  if (!(kappa0 > 0)) throw ArgumentError("compressibility: kappa0 must be positive");
}

int CompressibilityParams::sparsity(int n) const {
  // The small slack keeps exact products such as 0.25 * 8 from rounding up.
  return std::max(1, static_cast<int>(std::ceil(delta * n - 1e-9)));
}

std::string to_string(VectorClass c) {
  switch (c) {
    case VectorClass::Sparse: return "sparse";
    case VectorClass::Compressible: return "compressible";
    case VectorClass::Incompressible: return "incompressible";
  }
  return "unknown";
}

CompressibilityReport classify(std::span<const double> x, const CompressibilityParams& p) {
  p.validate();
  require_unit(x);
  const int n = static_cast<int>(x.size());
  const int k = p.sparsity(n);

  std::vector<double> mags(x.size());
  std::transform(x.begin(), x.end(), mags.begin(), [](double v) { return std::abs(v); });
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double tail = 0.0;
  for (std::size_t i = static_cast<std::size_t>(std::min(k, n)); i < mags.size(); ++i) tail += mags[i] * mags[i];

  CompressibilityReport rep;
  rep.dist_to_sparse = std::sqrt(tail);
  const auto support = std::count_if(mags.begin(), mags.end(), [](double a) { return a >= kSupportThreshold; });
  if (support <= k) {
    rep.cls = VectorClass::Sparse;
  } else if (rep.dist_to_sparse <= p.rho) {
    rep.cls = VectorClass::Compressible;
  } else {
    rep.cls = VectorClass::Incompressible;
    rep.spread_set = spread_set(x, p);
  }
  return rep;
}

std::vector<int> spread_set(std::span<const double> x, const CompressibilityParams& p) {
  p.validate();
  require_unit(x);
  const int n = static_cast<int>(x.size());
  const int k = p.sparsity(n);
  std::vector<double> mags(x.size());
  std::transform(x.begin(), x.end(), mags.begin(), [](double v) { return std::abs(v); });
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double tail = 0.0;
  for (std::size_t i = static_cast<std::size_t>(std::min(k, n)); i < mags.size(); ++i) tail += mags[i] * mags[i];
  const auto support = std::count_if(mags.begin(), mags.end(), [](double a) { return a >= kSupportThreshold; });
  if (support <= k || std::sqrt(tail) <= p.rho)
    throw PreconditionError("spread_set: x is not incompressible");

  std::vector<int> sigma = band(x, p);
  const double required = p.rho * p.rho * p.delta * n / 2.0;
  if (static_cast<double>(sigma.size()) < required)
    throw InvariantViolation("spread_set: only " + std::to_string(sigma.size()) + " coordinates in the band, need " +
                             std::to_string(required));
  return sigma;
}

}  // namespace polycond
