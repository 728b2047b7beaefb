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

#include "serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace polycond {
namespace {

constexpr const char* kVersion = "0.1.0";

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
T field(const Json& j, const std::string& key, const T& fallback, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError(where + "." + key + ": expected a number");
    }
    return it->get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

Json interval_json(const Interval& ci) { return Json{{"low", ci.low}, {"high", ci.high}}; }

Json base_meta(const std::string& kind, const Json& config_echo) {
  return Json{{"kind", kind}, {"version", kVersion}, {"config", config_echo}};
}

std::string str(std::int64_t v) { return std::to_string(v); }

std::string strip_csv(const std::string& base) {
  const std::string ext = ".csv";
  if (base.size() > ext.size() && base.compare(base.size() - ext.size(), ext.size(), ext) == 0)
    return base.substr(0, base.size() - ext.size());
  return base;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

const char* library_version() { return kVersion; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError("not a number: '" + s + "'");
  return v;
}

Json to_json(const DistributionSpec& d) {
  Json j{{"kind", to_string(d.kind)}, {"t0", d.t0}};
  if (d.kind == DistributionSpec::Kind::Table) j["table"] = Json{{"values", d.values}, {"probs", d.probs}};
  return j;
}

DistributionSpec distribution_from_json(const Json& in) {
  Json j = in;
  if (j.is_string()) j = Json{{"kind", j}};
  check_keys(j, {"kind", "table", "t0"}, "distribution");
  DistributionSpec d;
  d.kind = kind_from_string(field<std::string>(j, "kind", "gaussian", "distribution"));
  d.t0 = field<double>(j, "t0", 1.0, "distribution");
  if (d.kind == DistributionSpec::Kind::Table) {
    if (!j.contains("table")) throw ConfigError("distribution: kind 'table' needs a 'table' block");
    const Json& t = j["table"];
    check_keys(t, {"values", "probs"}, "distribution.table");
    d.values = field<std::vector<double>>(t, "values", {}, "distribution.table");
    d.probs = field<std::vector<double>>(t, "probs", {}, "distribution.table");
  }
  try {
    d.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("distribution: ") + e.what());
  }
  return d;
}

RunConfig config_from_json(const Json& j) {
  check_keys(j,
             {"n", "d", "distribution", "model", "det_source", "gamma", "master_seed", "trials", "eps_grid",
              "optimizer", "output", "threads", "compressible", "opnorm", "lcd", "small_ball", "tensorization",
              "example1"},
             "config");
  RunConfig rc;
  ExperimentConfig& c = rc.experiment;
  c.shape = SystemShape{field<int>(j, "n", c.shape.n, "config"), field<int>(j, "d", c.shape.d, "config")};
  if (j.contains("distribution")) c.dist = distribution_from_json(j["distribution"]);
  const std::string model = field<std::string>(j, "model", "iid", "config");
  if (model == "iid") {
    c.model = Model::Iid;
  } else if (model == "kss") {
    c.model = Model::Kss;
  } else {
    throw ConfigError("config.model: expected 'iid' or 'kss', got '" + model + "'");
  }
  if (j.contains("det_source") && !j["det_source"].is_null())
    c.det_source = field<std::string>(j, "det_source", "", "config");
  c.gamma = field<double>(j, "gamma", c.gamma, "config");
  c.seeds.master_seed = field<std::uint64_t>(j, "master_seed", 0, "config");
  c.trials = field<std::int64_t>(j, "trials", c.trials, "config");
  c.eps_grid = field<std::vector<double>>(j, "eps_grid", c.eps_grid, "config");
  if (j.contains("optimizer")) {
    const Json& o = j["optimizer"];
    check_keys(o, {"restarts", "max_iters", "tol"}, "config.optimizer");
    c.optimizer.restarts = field<int>(o, "restarts", c.optimizer.restarts, "config.optimizer");
    c.optimizer.max_iters = field<int>(o, "max_iters", c.optimizer.max_iters, "config.optimizer");
    c.optimizer.tol = field<double>(o, "tol", c.optimizer.tol, "config.optimizer");
  }
  c.output = field<std::string>(j, "output", "", "config");
  c.threads = field<int>(j, "threads", 1, "config");

  if (j.contains("compressible")) {
    const Json& b = j["compressible"];
    check_keys(b, {"delta", "rho", "kappa0", "c_sparse", "fixed_support"}, "config.compressible");
    auto& p = rc.compressible.params;
    // Explicit delta or rho override the kappa0-derived defaults.
    p = CompressibilityParams::for_degree(c.shape.d, field<double>(b, "kappa0", 0.1, "config.compressible"));
    p.delta = field<double>(b, "delta", p.delta, "config.compressible");
    p.rho = field<double>(b, "rho", p.rho, "config.compressible");
    rc.compressible.c_sparse = field<double>(b, "c_sparse", rc.compressible.c_sparse, "config.compressible");
    rc.compressible.fixed_support = field<bool>(b, "fixed_support", false, "config.compressible");
  } else {
    rc.compressible.params = CompressibilityParams::for_degree(c.shape.d);
  }
  if (j.contains("opnorm")) {
    const Json& b = j["opnorm"];
    check_keys(b, {"n_list", "restarts", "max_sweeps", "tol", "restrict_fraction"}, "config.opnorm");
    rc.opnorm.n_list = field<std::vector<int>>(b, "n_list", rc.opnorm.n_list, "config.opnorm");
    rc.opnorm.options.restarts = field<int>(b, "restarts", rc.opnorm.options.restarts, "config.opnorm");
    rc.opnorm.options.max_sweeps = field<int>(b, "max_sweeps", rc.opnorm.options.max_sweeps, "config.opnorm");
    rc.opnorm.options.tol = field<double>(b, "tol", rc.opnorm.options.tol, "config.opnorm");
    if (b.contains("restrict_fraction") && !b["restrict_fraction"].is_null())
      rc.opnorm.restrict_fraction = field<double>(b, "restrict_fraction", 1.0, "config.opnorm");
  }
  if (j.contains("lcd")) {
    const Json& b = j["lcd"];
    check_keys(b, {"y", "alpha", "gamma0", "d_max"}, "config.lcd");
    rc.lcd.y = field<std::vector<double>>(b, "y", rc.lcd.y, "config.lcd");
    rc.lcd.alpha = field<double>(b, "alpha", rc.lcd.alpha, "config.lcd");
    rc.lcd.gamma0 = field<double>(b, "gamma0", rc.lcd.gamma0, "config.lcd");
    rc.lcd.d_max = field<double>(b, "d_max", rc.lcd.d_max, "config.lcd");
  }
  if (j.contains("small_ball")) {
    const Json& b = j["small_ball"];
    check_keys(b, {"y", "eps_grid"}, "config.small_ball");
    rc.small_ball.y = field<std::vector<double>>(b, "y", rc.small_ball.y, "config.small_ball");
    rc.small_ball.eps_grid = field<std::vector<double>>(b, "eps_grid", rc.small_ball.eps_grid, "config.small_ball");
  }
  if (j.contains("tensorization")) {
    const Json& b = j["tensorization"];
    check_keys(b, {"n", "delta_grid", "weights"}, "config.tensorization");
    rc.tensorization.n = field<int>(b, "n", rc.tensorization.n, "config.tensorization");
    rc.tensorization.delta_grid =
        field<std::vector<double>>(b, "delta_grid", rc.tensorization.delta_grid, "config.tensorization");
    if (b.contains("weights") && !b["weights"].is_null())
      rc.tensorization.weights = field<std::vector<double>>(b, "weights", {}, "config.tensorization");
  }
  if (j.contains("example1")) {
    const Json& b = j["example1"];
    check_keys(b, {"n"}, "config.example1");
    rc.example1_n = field<int>(b, "n", rc.example1_n, "config.example1");
  }
  c.validate();
  return rc;
}

RunConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

Json to_json(const RunConfig& rc) {
  const ExperimentConfig& c = rc.experiment;
  Json j;
  j["n"] = c.shape.n;
  j["d"] = c.shape.d;
  j["distribution"] = to_json(c.dist);
  j["model"] = c.model == Model::Kss ? "kss" : "iid";
  j["det_source"] = c.det_source ? Json(*c.det_source) : Json(nullptr);
  j["gamma"] = c.gamma;
  j["master_seed"] = c.seeds.master_seed;
  j["trials"] = c.trials;
  j["eps_grid"] = c.eps_grid;
  j["optimizer"] = {{"restarts", c.optimizer.restarts}, {"max_iters", c.optimizer.max_iters}, {"tol", c.optimizer.tol}};
  j["output"] = c.output;
  const auto& p = rc.compressible.params;
  j["compressible"] = {{"delta", p.delta},
                       {"rho", p.rho},
                       {"kappa0", p.kappa0},
                       {"c_sparse", rc.compressible.c_sparse},
                       {"fixed_support", rc.compressible.fixed_support}};
  j["opnorm"] = {{"n_list", rc.opnorm.n_list},
                 {"restarts", rc.opnorm.options.restarts},
                 {"max_sweeps", rc.opnorm.options.max_sweeps},
                 {"tol", rc.opnorm.options.tol},
                 {"restrict_fraction",
                  rc.opnorm.restrict_fraction ? Json(*rc.opnorm.restrict_fraction) : Json(nullptr)}};
  j["lcd"] = {{"y", rc.lcd.y}, {"alpha", rc.lcd.alpha}, {"gamma0", rc.lcd.gamma0}, {"d_max", rc.lcd.d_max}};
  j["small_ball"] = {{"y", rc.small_ball.y}, {"eps_grid", rc.small_ball.eps_grid}};
  j["tensorization"] = {
      {"n", rc.tensorization.n},
      {"delta_grid", rc.tensorization.delta_grid},
      {"weights", rc.tensorization.weights ? Json(*rc.tensorization.weights) : Json(nullptr)}};
  j["example1"] = {{"n", rc.example1_n}};
  return j;
}

Json to_json(const RunMetadata& m) {
  return Json{{"n", m.n},
              {"d", m.d},
              {"distribution", m.distribution},
              {"master_seed", m.master_seed},
              {"bezout", m.bezout},
              {"monomial_count", m.monomial_count}};
}

Json to_json(const LMinResult& r) {
  return Json{{"value", r.value},
              {"x", r.argmin.x()},
              {"y", r.argmin.y()},
              {"restarts_used", r.restarts_used},
              {"converged", r.converged}};
}

namespace {
Json extended(const ExtendedReal& v) { return v.infinite ? Json("inf") : Json(v.value); }
Json finite_or_string(double v) { return std::isfinite(v) ? Json(v) : Json(format_double(v)); }
}  // namespace

Json to_json(const CondReport& r) {
  return Json{{"mu1", extended(r.mu1)},
              {"mu2", extended(r.mu2)},
              {"sigma_min_tangent", r.sigma_min_tangent},
              {"weyl_total", r.weyl_total}};
}

Json to_json(const OpnormResult& r) {
  return Json{{"value", r.value},
              {"norm", r.norm()},
              {"arg", r.arg},
              {"sweeps", r.sweeps},
              {"restarts", r.restarts},
              {"converged", r.converged}};
}

Json to_json(const LcdResult& r) {
  Json j{{"found", r.found}};
  if (r.found)
    j.update(Json{{"lcd", r.lcd},
                  {"d_star", r.certificate.d_star},
                  {"lattice_dist", r.certificate.lattice_dist},
                  {"threshold", r.certificate.threshold}});
  return j;
}

Json to_json(const CorollaryWitness& w) {
  return Json{{"double_root", finite_or_string(w.double_root)},
              {"regular_root", finite_or_string(w.regular_root)},
              {"critical_value", finite_or_string(w.critical_value)},
              {"simultaneous_small", finite_or_string(w.simultaneous)}};
}

Table tail_table(const TailCurve& curve, const Json& config_echo) {
  Table t{"tail", {"epsilon", "hits", "trials", "estimate", "ci_low", "ci_high"}, {}, base_meta("tail", config_echo)};
  t.meta["metadata"] = to_json(curve.metadata);
  t.meta["note"] =
      "Monte Carlo over the moderate-epsilon regime; only the linear-in-epsilon shape of the tail is checked.";
  for (std::size_t j = 0; j < curve.eps_grid.size(); ++j) {
    const double p = static_cast<double>(curve.hits[j]) / static_cast<double>(curve.trials);
    t.rows.push_back({format_double(curve.eps_grid[j]), str(curve.hits[j]), str(curve.trials), format_double(p),
                      format_double(curve.ci[j].low), format_double(curve.ci[j].high)});
  }
  return t;
}

Table tail_values_table(const TailCurve& curve, const Json& config_echo) {
  Table t{"tail_values", {"trial", "l_min"}, {}, base_meta("tail_values", config_echo)};
  t.meta["metadata"] = to_json(curve.metadata);
  for (std::size_t i = 0; i < curve.values.size(); ++i)
    t.rows.push_back({std::to_string(i), format_double(curve.values[i])});
  return t;
}

TailCurve tail_from_table(const Table& t) {
  if (t.kind != "tail") throw IoError("expected a tail table, got '" + t.kind + "'");
  TailCurve c;
  const Json& m = t.meta.at("metadata");
  c.metadata = RunMetadata{m.at("n").get<int>(),          m.at("d").get<int>(),
                           m.at("distribution").get<std::string>(), m.at("master_seed").get<std::uint64_t>(),
                           m.at("bezout").get<double>(),  m.at("monomial_count").get<double>()};
  for (const auto& row : t.rows) {
    c.eps_grid.push_back(parse_double(row.at(0)));
    c.hits.push_back(std::stoll(row.at(1)));
    c.trials = std::stoll(row.at(2));
    c.ci.push_back(Interval{parse_double(row.at(4)), parse_double(row.at(5))});
  }
  return c;
}

Table events_table(const EventEstimates& est, const Json& config_echo) {
  Table t{"events",
          {"event", "epsilon", "hits", "trials", "estimate", "ci_low", "ci_high"},
          {},
          base_meta("events", config_echo)};
  t.meta["metadata"] = to_json(est.metadata);
  t.meta["note"] = "Witness search may miss witnesses: every estimate is a lower bound on the existential probability.";
  for (int e = 0; e < kCorollaryEventCount; ++e)
    for (std::size_t j = 0; j < est.eps_grid.size(); ++j) {
      const auto hits = est.hits[static_cast<std::size_t>(e)][j];
      const Interval ci = est.ci(e, j);
      t.rows.push_back({to_string(static_cast<CorollaryEvent>(e)), format_double(est.eps_grid[j]), str(hits),
                        str(est.trials), format_double(static_cast<double>(hits) / static_cast<double>(est.trials)),
                        format_double(ci.low), format_double(ci.high)});
    }
  return t;
}

Table example1_table(const Example1Result& r, const Json& config_echo) {
  Table t{"example1",
          {"quantity", "hits", "trials", "estimate", "ci_low", "ci_high", "exact"},
          {},
          base_meta("example1", config_echo)};
  t.meta["n"] = r.n;
  auto row = [&](const std::string& name, const Estimate& e, const std::string& exact) {
    t.rows.push_back({name, str(e.hits), str(e.trials), format_double(e.p), format_double(e.ci.low),
                      format_double(e.ci.high), exact});
  };
  row("p_f_zero", r.p_f_zero, format_double(r.exact_p_f_zero));
  row("p_joint", r.p_joint, "");
  return t;
}

Table compressible_table(const CompressibleResult& r, double c_sparse, const Json& config_echo) {
  Table t{"compressible", {"trial", "infimum", "below"}, {}, base_meta("compressible", config_echo)};
  t.meta["metadata"] = to_json(r.metadata);
  t.meta["c_sparse"] = c_sparse;
  t.meta["fraction_below"] = r.fraction_below;
  t.meta["ci"] = interval_json(r.ci);
  for (std::size_t i = 0; i < r.infimum.size(); ++i)
    t.rows.push_back({std::to_string(i), format_double(r.infimum[i]), r.infimum[i] <= c_sparse ? "1" : "0"});
  return t;
}

Table concentration_table(const std::vector<ConcentrationRow>& rows, const std::string& quantity,
                          const Json& config_echo) {
  Table t{"concentration",
          {"epsilon_or_delta", "estimate", "ci_low", "ci_high", "trials"},
          {},
          base_meta("concentration", config_echo)};
  t.meta["quantity"] = quantity;
  for (const auto& r : rows)
    t.rows.push_back({format_double(r.parameter), format_double(r.estimate), format_double(r.ci.low),
                      format_double(r.ci.high), str(r.trials)});
  return t;
}

Table opnorm_table(const std::vector<OpnormScalingRow>& rows, const Json& config_echo) {
  Table t{"opnorm", {"n", "d", "trial", "value"}, {}, base_meta("opnorm", config_echo)};
  Json medians = Json::array();
  for (const auto& r : rows) {
    medians.push_back(Json{{"n", r.n}, {"k", r.k}, {"median", r.median}, {"median_over_n", r.median_over_n}});
    for (std::size_t i = 0; i < r.values.size(); ++i)
      t.rows.push_back({std::to_string(r.n), std::to_string(r.d), std::to_string(i), format_double(r.values[i])});
  }
  t.meta["medians"] = medians;
  return t;
}

Table lcd_table(const std::vector<std::pair<std::string, LcdResult>>& cases, const LcdQuery& q,
                const Json& config_echo) {
  Table t{"lcd",
          {"case", "alpha", "gamma0", "found", "lcd", "d_star", "lattice_dist", "threshold"},
          {},
          base_meta("lcd", config_echo)};
  t.meta["d_max"] = q.d_max;
  for (const auto& [name, r] : cases)
    t.rows.push_back({name, format_double(q.alpha), format_double(q.gamma0), r.found ? "1" : "0",
                      r.found ? format_double(r.lcd) : "inf", format_double(r.certificate.d_star),
                      format_double(r.certificate.lattice_dist), format_double(r.certificate.threshold)});
  return t;
}

void write_outputs(const Table& t, const std::string& base_in) {
  const std::string base = strip_csv(base_in);
  for (const auto& row : t.rows)
    if (row.size() != t.columns.size()) throw InvariantViolation("table row width differs from the header");
  {
    std::ofstream csv(base + ".csv", std::ios::binary);
    if (!csv) throw IoError("cannot write '" + base + ".csv'");
    for (std::size_t c = 0; c < t.columns.size(); ++c) csv << (c ? "," : "") << t.columns[c];
    csv << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << row[c];
      csv << '\n';
    }
    if (!csv) throw IoError("write failed for '" + base + ".csv'");
  }
  Json side = t.meta;
  side["kind"] = t.kind;
  side["columns"] = t.columns;
  std::ofstream js(base + ".json");
  if (!js) throw IoError("cannot write '" + base + ".json'");
  js << side.dump(2) << '\n';
  if (!js) throw IoError("write failed for '" + base + ".json'");
}

Table read_outputs(const std::string& base_in) {
  const std::string base = strip_csv(base_in);
  Table t;
  std::ifstream js(base + ".json");
  if (!js) throw IoError("cannot read '" + base + ".json'");
  try {
    t.meta = Json::parse(js);
  } catch (const Json::exception& e) {
    throw IoError("'" + base + ".json': " + e.what());
  }
  t.kind = t.meta.value("kind", "");
  t.columns = t.meta.value("columns", std::vector<std::string>{});
  t.meta.erase("columns");
  std::ifstream csv(base + ".csv", std::ios::binary);
  if (!csv) throw IoError("cannot read '" + base + ".csv'");
  std::string line;
  if (!std::getline(csv, line) || split_csv_line(line) != t.columns)
    throw IoError("'" + base + ".csv': header does not match the sidecar columns");
  while (std::getline(csv, line)) {
    auto row = split_csv_line(line);
    if (row.size() != t.columns.size()) throw IoError("'" + base + ".csv': ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace polycond
