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

#ifndef POLYCOND_RANDOM_HPP
#define POLYCOND_RANDOM_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace polycond {

/// Master seed of an experiment. Every random draw in the library is a pure
/// function of (master_seed, trial, purpose, counter), so results never depend
/// on evaluation order or on the number of worker threads.
struct SeedPolicy {
  std::uint64_t master_seed = 0;

  friend bool operator==(const SeedPolicy&, const SeedPolicy&) = default;
};

/// Well-separated purpose tags so that different consumers of one trial never
/// share a stream.
namespace purpose {
inline constexpr std::uint64_t kRandomPart = 1;
inline constexpr std::uint64_t kKssMonomials = 2;
inline constexpr std::uint64_t kRestarts = 3;
inline constexpr std::uint64_t kGrowthSamples = 4;
inline constexpr std::uint64_t kSmallBall = 5;
inline constexpr std::uint64_t kTensorization = 6;
inline constexpr std::uint64_t kCompressible = 7;
inline constexpr std::uint64_t kWitness = 8;
inline constexpr std::uint64_t kPerturbation = 9;
inline constexpr std::uint64_t kUser = 100;
}  // namespace purpose

/// Counter-based generator: draw(counter) is a stateless hash of the key and
/// the counter.
class CounterStream {
 public:
  CounterStream(const SeedPolicy& seeds, std::uint64_t trial, std::uint64_t purpose);

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on (0, 1].
  double uniform(std::uint64_t counter) const;
  /// Standard normal built from counters 2*index and 2*index + 1.
  double gaussian(std::uint64_t index) const;

  /// Child stream for sub-task `index` (one restart, one sample, ...).
  CounterStream substream(std::uint64_t index) const;

 private:
  CounterStream(std::uint64_t k0, std::uint64_t k1) : key0_(k0), key1_(k1) {}
  std::uint64_t key0_;
  std::uint64_t key1_;
};

/// Sequential view of a CounterStream.
class StreamCursor {
 public:
  explicit StreamCursor(CounterStream stream) : stream_(stream) {}

  double uniform() { return stream_.uniform(next_++); }
  double gaussian() { return stream_.gaussian(next_++); }
  std::uint64_t bits() { return stream_.bits(next_++); }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  std::vector<double> gaussian_vector(std::size_t len);

 private:
  CounterStream stream_;
  std::uint64_t next_ = 0;
};

/// Mean-zero, variance-one coefficient law.
struct DistributionSpec {
  enum class Kind { Gaussian, Rademacher, UniformPm, Table };

  Kind kind = Kind::Gaussian;
  /// Support and probabilities, only for Kind::Table.
  std::vector<double> values;
  std::vector<double> probs;
  /// Subgaussian tail parameter; reported, never used in sampling.
  double t0 = 1.0;

  static DistributionSpec gaussian() { return {}; }
  static DistributionSpec rademacher() { return {Kind::Rademacher, {}, {}, 1.0}; }
  static DistributionSpec uniform_pm() { return {Kind::UniformPm, {}, {}, 1.0}; }
  /// Validates mean 0 and variance 1 to 1e-12; throws ArgumentError.
  static DistributionSpec table(std::vector<double> values, std::vector<double> probs,
                                double t0 = 1.0);

  /// Draw number `index` of `stream`.
  double draw(const CounterStream& stream, std::uint64_t index) const;

  void validate() const;

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

std::string to_string(DistributionSpec::Kind kind);
DistributionSpec::Kind kind_from_string(const std::string& name);

}  // namespace polycond

#endif  // POLYCOND_RANDOM_HPP
