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

#include "random.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "errors.hpp"

namespace polycond {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterStream::CounterStream(const SeedPolicy& seeds, std::uint64_t trial,
                             std::uint64_t purpose) {
  std::uint64_t k = mix64(seeds.master_seed + kGolden);
  k = mix64(k ^ (trial * kGolden + 0x632BE59BD9B4E019ULL));
  k = mix64(k ^ (purpose * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
  key0_ = k;
  key1_ = mix64(k ^ 0xA0761D6478BD642FULL);
}

std::uint64_t CounterStream::bits(std::uint64_t counter) const {
  return mix64(key1_ ^ mix64(key0_ + (counter + 1) * kGolden));
}

double CounterStream::uniform(std::uint64_t counter) const {
  return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
}

double CounterStream::gaussian(std::uint64_t index) const {
  const double u1 = uniform(2 * index);
  const double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

CounterStream CounterStream::substream(std::uint64_t index) const {
  const std::uint64_t k = mix64(key0_ ^ mix64(index + 0x2545F4914F6CDD1DULL));
  return CounterStream(k, mix64(k ^ key1_));
}

std::uint64_t StreamCursor::below(std::uint64_t bound) {
  if (bound == 0) throw ArgumentError("below: bound must be positive");
  // Rejection removes modulo bias.
  const std::uint64_t limit = (~std::uint64_t{0} / bound) * bound;
  for (;;) {
    const std::uint64_t b = bits();
    if (b < limit) return b % bound;
  }
}

std::vector<double> StreamCursor::gaussian_vector(std::size_t len) {
  std::vector<double> v(len);
  for (auto& e : v) e = gaussian();
  return v;
}

DistributionSpec DistributionSpec::table(std::vector<double> values, std::vector<double> probs,
                                         double t0) {
  DistributionSpec spec{Kind::Table, std::move(values), std::move(probs), t0};
  spec.validate();
  return spec;
}

void DistributionSpec::validate() const {
  if (!(t0 > 0.0)) throw ArgumentError("distribution: T0 must be positive");
  if (kind != Kind::Table) return;
  if (values.empty() || values.size() != probs.size())
    throw ArgumentError("distribution table: values and probs must be non-empty and of equal length");
  double total = 0.0, mean = 0.0, second = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(probs[i] >= 0.0) || !std::isfinite(values[i]))
      throw ArgumentError("distribution table: probabilities must be >= 0 and values finite");
    total += probs[i];
    mean += probs[i] * values[i];
    second += probs[i] * values[i] * values[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ArgumentError("distribution table: probabilities must sum to 1");
  if (std::abs(mean) > 1e-12) throw ArgumentError("distribution table: mean must be 0");
  if (std::abs(second - mean * mean - 1.0) > 1e-12)
    throw ArgumentError("distribution table: variance must be 1");
}

double DistributionSpec::draw(const CounterStream& stream, std::uint64_t index) const {
  switch (kind) {
    case Kind::Gaussian:
      return stream.gaussian(index);
    case Kind::Rademacher:
      return (stream.bits(index) >> 63) ? 1.0 : -1.0;
    case Kind::UniformPm:
      return std::sqrt(3.0) * (2.0 * stream.uniform(index) - 1.0);
    case Kind::Table: {
      const double u = stream.uniform(index);
      double acc = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        acc += probs[i];
        if (u <= acc) return values[i];
      }
      return values.back();
    }
  }
  return 0.0;
}

std::string to_string(DistributionSpec::Kind kind) {
  switch (kind) {
    case DistributionSpec::Kind::Gaussian: return "gaussian";
    case DistributionSpec::Kind::Rademacher: return "rademacher";
    case DistributionSpec::Kind::UniformPm: return "uniform_pm";
    case DistributionSpec::Kind::Table: return "table";
  }
  return "unknown";
}

DistributionSpec::Kind kind_from_string(const std::string& name) {
  if (name == "gaussian") return DistributionSpec::Kind::Gaussian;
  if (name == "rademacher") return DistributionSpec::Kind::Rademacher;
  if (name == "uniform_pm") return DistributionSpec::Kind::UniformPm;
  if (name == "table") return DistributionSpec::Kind::Table;
  throw ConfigError("unknown distribution kind '" + name + "'");
}

}  // namespace polycond
