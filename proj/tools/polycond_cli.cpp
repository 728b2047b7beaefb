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

// Command-line front end. Everything numeric goes through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polycond/polycond.h"

namespace {

using Json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct CliError {
  pc_status status;
  std::string message;
};

int exit_code(pc_status s) {
  switch (s) {
    case PC_OK: return kExitOk;
    case PC_ERR_INVARIANT:
    case PC_ERR_CONTRACT: return kExitInvariant;
    case PC_ERR_INTERNAL: return kExitFailure;
    default: return kExitConfig;
  }
}

void check(pc_status s) {
  if (s != PC_OK) throw CliError{s, pc_last_error()};
}

Json take_json(char* s) {
  Json j = Json::parse(s);
  pc_string_free(s);
  return j;
}

class SystemHandle {
 public:
  explicit SystemHandle(const std::string& path) { check(pc_system_load(path.c_str(), &sys_)); }
  SystemHandle(pc_system* s) : sys_(s) {}
  SystemHandle(const SystemHandle&) = delete;
  SystemHandle& operator=(const SystemHandle&) = delete;
  ~SystemHandle() { pc_system_destroy(sys_); }
  pc_system* get() const { return sys_; }
  int n() const {
    int n = 0;
    check(pc_system_shape(sys_, &n, nullptr, nullptr));
    return n;
  }
  int m() const {
    int m = 0;
    check(pc_system_shape(sys_, nullptr, nullptr, &m));
    return m;
  }

 private:
  pc_system* sys_ = nullptr;
};

std::vector<double> point_arg(const std::vector<double>& x, int n) {
  if (static_cast<int>(x.size()) != n)
    throw CliError{PC_ERR_ARGUMENT, "--x needs " + std::to_string(n) + " coordinates"};
  return x;
}

Json read_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw CliError{PC_ERR_CONFIG, "cannot open config '" + path + "'"};
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw CliError{PC_ERR_CONFIG, "config '" + path + "': " + e.what()};
  }
}

// Flags shared by every experiment subcommand.
struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::int64_t> trials;
  int threads = 1;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON experiment config");
    app->add_option("--seed", seed, "master seed (overrides the config)");
    app->add_option("--out", out, "output base path (directory for report-data)");
    app->add_option("--trials", trials, "trial count (overrides the config)");
    app->add_option("--threads", threads, "worker threads; never changes results")->check(CLI::PositiveNumber);
  }

  Json merged() const {
    Json j = read_config(config);
    if (seed) j["master_seed"] = *seed;
    if (trials) j["trials"] = *trials;
    if (!out.empty()) j["output"] = out;
    return j;
  }
};

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

int run_experiment(const std::string& name, const Json& cfg, int threads) {
  char* raw = nullptr;
  check(pc_run(name.c_str(), cfg.dump().c_str(), threads, &raw));
  Json result = take_json(raw);
  // Per-trial tables can be huge; the files under --out keep every row.
  constexpr std::size_t kMaxPrintedRows = 50;
  for (Json& t : result["tables"]) {
    Json& rows = t["rows"];
    if (rows.size() > kMaxPrintedRows) {
      t["row_count"] = rows.size();
      rows.erase(rows.begin() + kMaxPrintedRows, rows.end());
      t["truncated"] = true;
    }
  }
  print(result);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polycond: random polynomial systems, condition functionals and Monte Carlo experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pc_version()));

  // gen
  auto* gen = app.add_subcommand("gen", "sample a system and save it");
  Common gen_c;
  gen_c.attach(gen);
  std::optional<int> gen_n, gen_d;
  std::uint64_t gen_trial = 0;
  bool gen_json = false;
  gen->add_option("--n", gen_n, "variables");
  gen->add_option("--d", gen_d, "degree");
  gen->add_option("--trial", gen_trial, "trial index of the stream");
  gen->add_flag("--json", gen_json, "write the pure-JSON tensor format");

  // eval / cond / lmin / opnorm on a saved system
  auto* eval = app.add_subcommand("eval", "evaluate a saved system at x");
  std::string eval_sys;
  std::vector<double> eval_x;
  eval->add_option("--system", eval_sys, "tensor file")->required();
  eval->add_option("--x", eval_x, "point, comma separated")->required()->delimiter(',');

  auto* cond = app.add_subcommand("cond", "condition numbers of a saved system at unit x");
  std::string cond_sys;
  std::vector<double> cond_x;
  cond->add_option("--system", cond_sys, "tensor file")->required();
  cond->add_option("--x", cond_x, "unit point, comma separated")->required()->delimiter(',');

  auto* lmin = app.add_subcommand("lmin", "minimize L over orthonormal pairs (saved system or sampled from config)");
  Common lmin_c;
  lmin_c.attach(lmin);
  std::string lmin_sys;
  lmin->add_option("--system", lmin_sys, "tensor file");

  auto* opn = app.add_subcommand("opnorm", "opnorm of a saved system, or the scaling experiment from a config");
  Common opn_c;
  opn_c.attach(opn);
  std::string opn_sys;
  opn->add_option("--system", opn_sys, "tensor file");

  // LCD: config driven, with direct overrides.
  auto* lcd = app.add_subcommand("lcd", "essential LCD of a vector");
  Common lcd_c;
  lcd_c.attach(lcd);
  std::vector<double> lcd_y;
  std::optional<double> lcd_alpha, lcd_gamma0, lcd_dmax;
  lcd->add_option("--y", lcd_y, "vector, comma separated")->delimiter(',');
  lcd->add_option("--alpha", lcd_alpha);
  lcd->add_option("--gamma0", lcd_gamma0);
  lcd->add_option("--dmax", lcd_dmax);

  // Experiments driven purely by the config.
  struct Experiment {
    const char* name;
    const char* help;
    CLI::App* app = nullptr;
    Common common;
  };
  std::vector<Experiment> experiments = {
      {"tail", "tail curve of L_min", nullptr, {}},
      {"example1", "Rademacher d = 2 example at x0 = (1, 1, 0, ...)", nullptr, {}},
      {"corollary", "witness frequencies of the four corollary events", nullptr, {}},
      {"compressible", "infimum of ||f||^2 / n over compressible vectors", nullptr, {}},
      {"small-ball", "small-ball probability of a weighted sum", nullptr, {}},
      {"tensorization", "P(sum of squares < delta^2 n)", nullptr, {}},
      {"report-data", "write the CSV/JSON inputs of the report into --out", nullptr, {}},
  };
  for (auto& e : experiments) {
    e.app = app.add_subcommand(e.name, e.help);
    e.common.attach(e.app);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) {
      Json cfg = gen_c.merged();
      const int n = gen_n.value_or(cfg.value("n", 5));
      const int d = gen_d.value_or(cfg.value("d", 2));
      const std::uint64_t seed = cfg.value("master_seed", std::uint64_t{0});
      if (gen_c.out.empty()) throw CliError{PC_ERR_ARGUMENT, "gen needs --out"};
      pc_system* raw = nullptr;
      if (cfg.value("model", std::string("iid")) == "kss") {
        check(pc_system_create_kss(n, d, seed, gen_trial, &raw));
      } else {
        const std::string dist = cfg.contains("distribution") ? cfg["distribution"].dump() : "{}";
        check(pc_system_sample(n, d, dist.c_str(), seed, gen_trial, &raw));
      }
      SystemHandle sys(raw);
      check(pc_system_save(sys.get(), gen_c.out.c_str(), gen_json ? 1 : 0));
      print(Json{{"written", gen_c.out}, {"n", n}, {"d", d}});
      return kExitOk;
    }
    if (*eval) {
      SystemHandle sys(eval_sys);
      const auto x = point_arg(eval_x, sys.n());
      std::vector<double> f(static_cast<std::size_t>(sys.m()));
      check(pc_evaluate(sys.get(), x.data(), f.data()));
      print(Json{{"f", f}});
      return kExitOk;
    }
    if (*cond) {
      SystemHandle sys(cond_sys);
      const auto x = point_arg(cond_x, sys.n());
      char* raw = nullptr;
      check(pc_cond_at(sys.get(), x.data(), &raw));
      print(take_json(raw));
      return kExitOk;
    }
    if (*lmin) {
      const Json cfg = lmin_c.merged();
      const Json opt = cfg.value("optimizer", Json::object());
      const std::uint64_t seed = cfg.value("master_seed", std::uint64_t{0});
      pc_system* raw_sys = nullptr;
      if (!lmin_sys.empty()) {
        check(pc_system_load(lmin_sys.c_str(), &raw_sys));
      } else if (cfg.value("model", std::string("iid")) == "kss") {
        check(pc_system_create_kss(cfg.value("n", 5), cfg.value("d", 2), seed, 0, &raw_sys));
      } else {
        const std::string dist = cfg.contains("distribution") ? cfg["distribution"].dump() : "{}";
        check(pc_system_sample(cfg.value("n", 5), cfg.value("d", 2), dist.c_str(), seed, 0, &raw_sys));
      }
      SystemHandle sys(raw_sys);
      char* raw = nullptr;
      check(pc_lmin(sys.get(), opt.value("restarts", 50), opt.value("max_iters", 200), opt.value("tol", 1e-12), seed,
                    0, &raw));
      print(take_json(raw));
      return kExitOk;
    }
    if (*opn) {
      if (opn_sys.empty()) return run_experiment("opnorm", opn_c.merged(), opn_c.threads);
      const Json cfg = opn_c.merged();
      const Json o = cfg.value("opnorm", Json::object());
      SystemHandle sys(opn_sys);
      double value = 0.0;
      check(pc_opnorm(sys.get(), o.value("restarts", 20), o.value("max_sweeps", 200), o.value("tol", 1e-10),
                      cfg.value("master_seed", std::uint64_t{0}), &value));
      print(Json{{"squared_opnorm", value}});
      return kExitOk;
    }
    if (*lcd) {
      Json cfg = lcd_c.merged();
      Json& block = cfg["lcd"];
      if (block.is_null()) block = Json::object();
      if (!lcd_y.empty()) block["y"] = lcd_y;
      if (lcd_alpha) block["alpha"] = *lcd_alpha;
      if (lcd_gamma0) block["gamma0"] = *lcd_gamma0;
      if (lcd_dmax) block["d_max"] = *lcd_dmax;
      return run_experiment("lcd", cfg, lcd_c.threads);
    }
    for (auto& e : experiments) {
      if (!*e.app) continue;
      std::string name = e.name;
      if (name == "small-ball") name = "small_ball";
      return run_experiment(name, e.common.merged(), e.common.threads);
    }
  } catch (const CliError& e) {
    std::cerr << "error (" << pc_status_name(e.status) << "): " << e.message << '\n';
    return exit_code(e.status);
  } catch (const Json::exception& e) {
    std::cerr << "error (config error): " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitFailure;
}
