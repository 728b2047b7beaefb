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

#include <doctest.h>
#include <polycond/polycond.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include <json.hpp>

namespace {

using Json = nlohmann::json;

Json take_json(char* s) {
  REQUIRE(s != nullptr);
  Json j = Json::parse(s);
  pc_string_free(s);
  return j;
}

std::string scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "polycond_test_capi";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(POLYCOND_CLI_PATH) + " " + args + " > " + scratch("cli.log") + " 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(pc_version()) == "0.1.0");
  CHECK(std::string(pc_status_name(PC_OK)) == "ok");
  CHECK(std::string(pc_status_name(PC_ERR_CONFIG)) != std::string(pc_status_name(PC_ERR_IO)));
}

TEST_CASE("null and invalid arguments are rejected") {
  pc_system* s = nullptr;
  CHECK(pc_system_create_kss(4, 2, 1, 0, nullptr) == PC_ERR_ARGUMENT);
  CHECK(pc_system_create_kss(1, 2, 1, 0, &s) != PC_OK);
  CHECK(s == nullptr);
  CHECK(std::string(pc_last_error()).size() > 0);
  CHECK(pc_evaluate(nullptr, nullptr, nullptr) == PC_ERR_ARGUMENT);
  CHECK(pc_system_sample(3, 2, "\"nope\"", 1, 0, &s) == PC_ERR_CONFIG);
  CHECK(pc_system_sample(3, 2, "{not json", 1, 0, &s) == PC_ERR_CONFIG);
  CHECK(pc_system_load("/nonexistent/file.bin", &s) == PC_ERR_IO);
  pc_system_destroy(nullptr);
}

TEST_CASE("handle lifecycle and numerics agree with the core") {
  const int n = 4, d = 3;
  pc_system* s = nullptr;
  REQUIRE(pc_system_sample(n, d, "\"gaussian\"", 11, 2, &s) == PC_OK);
  int gn = 0, gd = 0, gm = 0;
  REQUIRE(pc_system_shape(s, &gn, &gd, &gm) == PC_OK);
  CHECK(gn == n);
  CHECK(gd == d);
  CHECK(gm == n - 1);

  const std::size_t len = static_cast<std::size_t>(gm) * 64;
  std::vector<double> tensor(len);
  REQUIRE(pc_system_tensor(s, tensor.data(), len) == PC_OK);
  CHECK(pc_system_tensor(s, tensor.data(), len - 1) == PC_ERR_ARGUMENT);

  const auto x = oracle::gaussian_vec(n);
  std::vector<double> f(static_cast<std::size_t>(gm));
  REQUIRE(pc_evaluate(s, x.data(), f.data()) == PC_OK);
  const auto ref = oracle::naive_eval(tensor, gm, n, d, x);
  CHECK(oracle::max_abs_diff(f, ref) < 1e-12 * (1 + oracle::max_abs(ref)));

  // Rebuilding from the raw tensor gives the same values.
  pc_system* t = nullptr;
  REQUIRE(pc_system_from_tensor(n, d, tensor.data(), nullptr, &t) == PC_OK);
  std::vector<double> g(f.size());
  REQUIRE(pc_evaluate(t, x.data(), g.data()) == PC_OK);
  CHECK(g == f);

  // First derivative along e_0 matches the directional oracle.
  std::vector<double> e0(static_cast<std::size_t>(n), 0.0);
  e0[0] = 1.0;
  std::vector<double> df(f.size());
  REQUIRE(pc_derivative_contract(s, x.data(), e0.data(), 1, df.data()) == PC_OK);
  const auto dref = oracle::naive_directional(tensor, gm, n, d, x, {e0});
  CHECK(oracle::max_abs_diff(df, dref) < 1e-11 * (1 + oracle::max_abs(dref)));

  std::vector<double> per(f.size());
  double total = 0;
  REQUIRE(pc_weyl_norm(s, per.data(), &total) == PC_OK);
  double sq = 0;
  for (double v : per) sq += v * v;
  CHECK(total == doctest::Approx(std::sqrt(sq)));

  // Save and reload in both formats.
  for (int json : {0, 1}) {
    const auto path = scratch(json ? "sys.json" : "sys.bin");
    REQUIRE(pc_system_save(s, path.c_str(), json) == PC_OK);
    pc_system* r = nullptr;
    REQUIRE(pc_system_load(path.c_str(), &r) == PC_OK);
    std::vector<double> back(len);
    REQUIRE(pc_system_tensor(r, back.data(), len) == PC_OK);
    CHECK(back == tensor);
    pc_system_destroy(r);
  }

  const auto u = oracle::unit_vec(n);
  char* out = nullptr;
  REQUIRE(pc_cond_at(s, u.data(), &out) == PC_OK);
  const Json cond = take_json(out);
  CHECK(cond.contains("weyl_total"));
  CHECK(pc_cond_at(s, x.data(), &out) == PC_ERR_CONTRACT);

  REQUIRE(pc_lmin(s, 3, 100, 1e-12, 5, 0, &out) == PC_OK);
  const Json lm = take_json(out);
  CHECK(lm.at("value").get<double>() >= 0.0);
  double op = 0;
  REQUIRE(pc_opnorm(s, 5, 100, 1e-10, 5, &op) == PC_OK);
  CHECK(op > 0.0);
  // Squared value; the raw tensor is not symmetrized, so its squared
  // Frobenius norm bounds it, and any single entry squared is a lower bound.
  double fro = 0, top = 0;
  for (double v : tensor) {
    fro += v * v;
    top = std::max(top, v * v);
  }
  CHECK(op <= fro * (1 + 1e-12));
  CHECK(op >= top * (1 - 1e-12));

  pc_system_destroy(t);
  pc_system_destroy(s);
}

TEST_CASE("LCD through the C API") {
  const double y[] = {1.0};
  char* out = nullptr;
  REQUIRE(pc_lcd_estimate(y, 1, 0.4, 0.5, 2.0, &out) == PC_OK);
  const Json r = take_json(out);
  CHECK(r.at("found").get<bool>());
  CHECK(r.at("lcd").get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  CHECK(pc_lcd_estimate(nullptr, 1, 0.4, 0.5, 10.0, &out) == PC_ERR_ARGUMENT);
}

TEST_CASE("pc_run experiments and config errors") {
  char* out = nullptr;
  const std::string cfg = R"({"n": 3, "d": 2, "trials": 8, "eps_grid": [0.01, 1e9], "optimizer": {"restarts": 2}})";
  REQUIRE(pc_run("tail", cfg.c_str(), 1, &out) == PC_OK);
  const Json a = take_json(out);
  REQUIRE(pc_run("tail", cfg.c_str(), 3, &out) == PC_OK);
  const Json b = take_json(out);
  CHECK(a.at("tables") == b.at("tables"));
  CHECK(a.at("tables")[0].at("rows")[1][1] == "8");

  CHECK(pc_run("tail", R"({"n": 3, "unknown": 1})", 1, &out) == PC_ERR_CONFIG);
  CHECK(pc_run("tail", R"({"trials": 0})", 1, &out) == PC_ERR_CONFIG);
  CHECK(pc_run("no-such-experiment", "{}", 1, &out) == PC_ERR_CONFIG);
  CHECK(pc_run("tail", "{", 1, &out) == PC_ERR_CONFIG);
}

TEST_CASE("CLI exit codes") {
  const auto sys = scratch("cli_sys.bin");
  CHECK(run_cli("gen --n 3 --d 2 --seed 4 --out " + sys) == 0);
  CHECK(run_cli("eval --system " + sys + " --x 1,2,3") == 0);
  CHECK(run_cli("cond --system " + sys + " --x 1,0,0") == 0);
  // A non-unit point breaks the condition-number contract.
  CHECK(run_cli("cond --system " + sys + " --x 1,2,3") == 3);
  CHECK(run_cli("lcd --y 0.5,0.5") == 0);

  const auto bad = scratch("bad.json");
  std::ofstream(bad) << R"({"n": 3, "trials": -1})";
  CHECK(run_cli("tail --config " + bad) == 2);
  std::ofstream(bad) << R"({"n": 3, "typo": 1})";
  CHECK(run_cli("tail --config " + bad) == 2);
  CHECK(run_cli("tail --config /nonexistent.json") == 2);
  CHECK(run_cli("--bogus-flag") == 2);

  const auto good = scratch("good.json");
  std::ofstream(good) << R"({"n": 3, "d": 2, "trials": 5, "optimizer": {"restarts": 2}})";
  const auto base = scratch("cli_tail");
  CHECK(run_cli("tail --config " + good + " --out " + base + " --threads 2") == 0);
  CHECK(std::filesystem::exists(base + ".csv"));
  CHECK(std::filesystem::exists(base + ".json"));
}
