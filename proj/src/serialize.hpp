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

#ifndef POLYCOND_SERIALIZE_HPP
#define POLYCOND_SERIALIZE_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "harness.hpp"

namespace polycond {

using Json = nlohmann::json;

/// Everything a CLI or C API run can be driven by: the shared experiment
/// config plus the optional per-experiment blocks.
struct RunConfig {
  ExperimentConfig experiment;
  CompressibleOptions compressible;

  struct OpnormBlock {
    std::vector<int> n_list{6, 12, 24};
    OpnormOptions options;
    std::optional<double> restrict_fraction;
  } opnorm;

  struct LcdBlock {
    std::vector<double> y{1.0};
    double alpha = 0.4;
    double gamma0 = 0.5;
    double d_max = 10.0;
  } lcd;

  struct SmallBallBlock {
    std::vector<double> y{0.7071067811865476, 0.7071067811865476};
    std::vector<double> eps_grid{0.1};
  } small_ball;

  struct TensorizationBlock {
    int n = 6;
    std::vector<double> delta_grid{0.1};
    std::optional<std::vector<double>> weights;
  } tensorization;

  int example1_n = 4;
};

Json to_json(const DistributionSpec& d);
DistributionSpec distribution_from_json(const Json& j);

/// Throws ConfigError on unknown keys, wrong types or invalid values.
RunConfig config_from_json(const Json& j);
RunConfig config_from_file(const std::string& path);
/// Canonical echo. The worker count is left out because it never affects results.
Json to_json(const RunConfig& cfg);

Json to_json(const RunMetadata& m);
Json to_json(const LMinResult& r);
Json to_json(const CondReport& r);
Json to_json(const OpnormResult& r);
Json to_json(const LcdResult& r);
Json to_json(const CorollaryWitness& w);

/// Shortest text that parses back to the same double ("inf" for infinity).
std::string format_double(double v);
double parse_double(const std::string& s);

/// Long-format table persisted as <base>.csv plus a <base>.json sidecar.
struct Table {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  Json meta;

  friend bool operator==(const Table&, const Table&) = default;
};

/// Column orders, fixed:
///   tail          epsilon, hits, trials, estimate, ci_low, ci_high
///   tail_values   trial, l_min
///   events        event, epsilon, hits, trials, estimate, ci_low, ci_high
///   example1      quantity, hits, trials, estimate, ci_low, ci_high, exact
///   compressible  trial, infimum, below
///   concentration epsilon_or_delta, estimate, ci_low, ci_high, trials
///   opnorm        n, d, trial, value
///   lcd           case, alpha, gamma0, found, lcd, d_star, lattice_dist, threshold
Table tail_table(const TailCurve& curve, const Json& config_echo);
Table tail_values_table(const TailCurve& curve, const Json& config_echo);
Table events_table(const EventEstimates& est, const Json& config_echo);
Table example1_table(const Example1Result& r, const Json& config_echo);
Table compressible_table(const CompressibleResult& r, double c_sparse, const Json& config_echo);
Table concentration_table(const std::vector<ConcentrationRow>& rows, const std::string& quantity,
                          const Json& config_echo);
Table opnorm_table(const std::vector<OpnormScalingRow>& rows, const Json& config_echo);
Table lcd_table(const std::vector<std::pair<std::string, LcdResult>>& cases, const LcdQuery& q,
                const Json& config_echo);

/// Rebuilds the aggregate tail curve (values excluded) from a tail table.
TailCurve tail_from_table(const Table& t);

/// Writes <base>.csv and <base>.json ("base.csv" is accepted as well). Throws
/// IoError naming the path.
void write_outputs(const Table& t, const std::string& base);
Table read_outputs(const std::string& base);

/// Library version string reported in sidecars.
const char* library_version();

}  // namespace polycond

#endif  // POLYCOND_SERIALIZE_HPP
