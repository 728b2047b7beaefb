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

#ifndef POLYCOND_HARNESS_HPP
#define POLYCOND_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "condition.hpp"
#include "diophantine.hpp"
#include "geometry.hpp"
#include "opnorm.hpp"
#include "random.hpp"
#include "stats.hpp"
#include "system.hpp"

namespace polycond {

enum class Model { Iid, Kss };

struct OptimizerKnobs {
  int restarts = 20;
  int max_iters = 200;
  double tol = 1e-12;

  friend bool operator==(const OptimizerKnobs&, const OptimizerKnobs&) = default;
};

struct ExperimentConfig {
  SystemShape shape{5, 2};
  DistributionSpec dist;
  Model model = Model::Iid;
  std::optional<std::string> det_source;
  /// Growth exponent the deterministic part must be certified against.
  double gamma = 1.0;
  SeedPolicy seeds;
  std::int64_t trials = 100;
  std::vector<double> eps_grid{1e-3, 1e-2, 1e-1};
  OptimizerKnobs optimizer;
  std::string output;
  /// Worker count; never changes results.
  int threads = 1;

  /// Throws ConfigError.
  void validate() const;
};

/// Shape bookkeeping reported with every run.
struct RunMetadata {
  int n = 0;
  int d = 0;
  std::string distribution;
  std::uint64_t master_seed = 0;
  double bezout = 0.0;          // d^(n-1)
  double monomial_count = 0.0;  // (n-1) * binom(n-1+d, d)
};

RunMetadata metadata_for(const ExperimentConfig& cfg);

/// Deterministic part named by cfg.det_source, after its gamma-control check.
/// Throws IoError on a malformed file and ConfigError when the check fails.
std::optional<CoefficientTensor> load_deterministic_part(const ExperimentConfig& cfg);

/// System of trial `trial`: iid or KSS random part plus the optional det part.
PolynomialSystem trial_system(const ExperimentConfig& cfg, const std::optional<CoefficientTensor>& det,
                              std::uint64_t trial);

struct TailCurve {
  std::vector<double> eps_grid;
  std::vector<std::int64_t> hits;
  std::int64_t trials = 0;
  std::vector<Interval> ci;
  RunMetadata metadata;
  /// L_min estimate of every trial, in trial order.
  std::vector<double> values;
};

/// Per trial: sample, run l_min, count {L_min <= eps} for every eps.
TailCurve run_tail(const ExperimentConfig& cfg);

struct Estimate {
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  double p = 0.0;
  Interval ci;
};

Estimate make_estimate(std::int64_t hits, std::int64_t trials);

struct Example1Result {
  int n = 0;
  Estimate p_f_zero;
  Estimate p_joint;
  double exact_p_f_zero = 0.0;
};

/// d = 2, Rademacher coefficients, x0 = (1, 1, 0, ..., 0). f(x0) = 0 is tested
/// in integer arithmetic; the joint event adds sigma_min_tangent(x0/|x0|) < 1e-10.
Example1Result run_example1(int n, std::int64_t trials, const SeedPolicy& seeds, int threads = 1);

enum class CorollaryEvent {
  DoubleRoot,       // f(x) = 0 and D_x(y) = 0
  RegularRoot,      // f(x) = 0 and ||D_x(y)|| <= d^(9/4) sqrt(n) eps
  CriticalValue,    // D_x(y) = 0 and ||f(x)|| <= d^(9/8) n^(1/4) eps^2
  SimultaneousSmall // ||f(x)||, ||f(y)|| <= (d^(9/2) n)^(1/4) eps
};
inline constexpr int kCorollaryEventCount = 4;
std::string to_string(CorollaryEvent e);

/// Per-trial witness values: event e holds at eps iff witness[e] <= eps
/// (DoubleRoot is 0 when a witness was found, +inf otherwise).
struct CorollaryWitness {
  double double_root = 0.0;
  double regular_root = 0.0;
  double critical_value = 0.0;
  double simultaneous = 0.0;
};

struct EventEstimates {
  std::vector<double> eps_grid;
  /// hits[event][eps index]
  std::vector<std::vector<std::int64_t>> hits;
  std::int64_t trials = 0;
  RunMetadata metadata;
  std::vector<CorollaryWitness> witnesses;

  Interval ci(int event, std::size_t eps_index) const;
};

/// Witness search on one system. Every found witness is genuine, so the
/// estimated probabilities are lower bounds on the existential ones.
CorollaryWitness corollary_witness(const PolynomialSystem& sys, const OptimizerKnobs& knobs,
                                   const SeedPolicy& seeds, std::uint64_t trial);

EventEstimates run_corollary_events(const ExperimentConfig& cfg);

struct CompressibleOptions {
  CompressibilityParams params;
  double c_sparse = 0.01;
  /// Only the support {0, ..., k-1} (the rectangular setting).
  bool fixed_support = false;
};

struct CompressibleResult {
  /// min ||f(x)||^2 / n found per trial.
  std::vector<double> infimum;
  std::int64_t below = 0;
  std::int64_t trials = 0;
  double fraction_below = 0.0;
  Interval ci;
  RunMetadata metadata;
};

/// Minimizes ||f(x)||^2 over x within distance rho of a ceil(delta n)-sparse
/// vector. The first `restarts` starts always use the support {0..k-1}; the
/// full search adds the same number of random supports, so its estimate never
/// exceeds the fixed-support one.
CompressibleResult run_compressible_infimum(const ExperimentConfig& cfg, const CompressibleOptions& options);

double compressible_infimum(const PolynomialSystem& sys, const CompressibleOptions& options,
                            const OptimizerKnobs& knobs, const SeedPolicy& seeds, std::uint64_t trial);

}  // namespace polycond

#endif  // POLYCOND_HARNESS_HPP
