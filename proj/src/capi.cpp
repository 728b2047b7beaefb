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

#include "polycond/polycond.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "condition.hpp"
#include "diophantine.hpp"
#include "ensembles.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "opnorm.hpp"
#include "serialize.hpp"
#include "system.hpp"
#include "tensor_io.hpp"

struct pc_system {
  polycond::PolynomialSystem sys;
};

namespace {

using namespace polycond;

thread_local std::string g_last_error;

pc_status fail(pc_status s, const std::string& what) {
  g_last_error = what;
  return s;
}

// Runs body and turns every library exception into its status code.
template <typename F>
pc_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return PC_OK;
  } catch (const ShapeError& e) {
    return fail(PC_ERR_SHAPE, e.what());
  } catch (const ArgumentError& e) {
    return fail(PC_ERR_ARGUMENT, e.what());
  } catch (const ConfigError& e) {
    return fail(PC_ERR_CONFIG, e.what());
  } catch (const IoError& e) {
    return fail(PC_ERR_IO, e.what());
  } catch (const InvariantViolation& e) {
    return fail(PC_ERR_INVARIANT, e.what());
  } catch (const AllocationCapError& e) {
    return fail(PC_ERR_ALLOC_CAP, e.what());
  } catch (const PreconditionError& e) {
    return fail(PC_ERR_PRECONDITION, e.what());
  } catch (const ContractViolation& e) {
    return fail(PC_ERR_CONTRACT, e.what());
  } catch (const Json::exception& e) {
    return fail(PC_ERR_CONFIG, std::string("json: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(PC_ERR_ALLOC_CAP, "out of memory");
  } catch (const std::exception& e) {
    return fail(PC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PC_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw ArgumentError(std::string(name) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Json table_json(const Table& t) { return Json{{"kind", t.kind}, {"columns", t.columns}, {"rows", t.rows}}; }

// Writes a table when an output base is configured and records the paths.
void emit(const Table& t, const std::string& base, Json& result) {
  result["tables"].push_back(table_json(t));
  if (base.empty()) return;
  write_outputs(t, base);
  result["outputs"].push_back(base + ".csv");
}

std::string sibling(const std::string& base, const std::string& suffix) {
  return base.empty() ? base : base + suffix;
}

Json run_experiment(const std::string& experiment, RunConfig rc, int threads) {
  if (threads > 0) rc.experiment.threads = threads;
  const ExperimentConfig& cfg = rc.experiment;
  const Json echo = to_json(rc);
  Json result{{"experiment", experiment}, {"tables", Json::array()}, {"outputs", Json::array()}};
  const std::string& out = cfg.output;

  if (experiment == "tail") {
    const TailCurve curve = run_tail(cfg);
    emit(tail_table(curve, echo), out, result);
    emit(tail_values_table(curve, echo), sibling(out, "_values"), result);
    result["metadata"] = to_json(curve.metadata);
  } else if (experiment == "example1") {
    const Example1Result r = run_example1(rc.example1_n, cfg.trials, cfg.seeds, cfg.threads);
    emit(example1_table(r, echo), out, result);
    result["exact_p_f_zero"] = r.exact_p_f_zero;
    result["within_3_wilson_sigmas"] = wilson_interval(r.p_f_zero.hits, r.p_f_zero.trials, 3.0).contains(r.exact_p_f_zero);
  } else if (experiment == "corollary") {
    const EventEstimates est = run_corollary_events(cfg);
    emit(events_table(est, echo), out, result);
    result["metadata"] = to_json(est.metadata);
  } else if (experiment == "compressible") {
    const CompressibleResult r = run_compressible_infimum(cfg, rc.compressible);
    emit(compressible_table(r, rc.compressible.c_sparse, echo), out, result);
    result["fraction_below"] = r.fraction_below;
  } else if (experiment == "opnorm") {
    OpnormScalingConfig oc;
    oc.d = cfg.shape.d;
    oc.n_list = rc.opnorm.n_list;
    oc.dist = cfg.dist;
    oc.trials = static_cast<int>(cfg.trials);
    oc.seeds = cfg.seeds;
    oc.options = rc.opnorm.options;
    oc.restrict_fraction = rc.opnorm.restrict_fraction;
    oc.threads = cfg.threads;
    emit(opnorm_table(opnorm_scaling(oc), echo), out, result);
  } else if (experiment == "lcd") {
    const LcdQuery q = LcdQuery::with_defaults(rc.lcd.y, rc.lcd.alpha, rc.lcd.gamma0, rc.lcd.d_max);
    const LcdResult r = lcd_estimate(rc.lcd.y, q);
    emit(lcd_table({{"config", r}}, q, echo), out, result);
    result["lcd"] = to_json(r);
  } else if (experiment == "small_ball") {
    const auto rows = small_ball_estimate(rc.small_ball.y, cfg.dist, rc.small_ball.eps_grid, cfg.trials,
                                          cfg.seeds, cfg.threads);
    emit(concentration_table(rows, "small_ball", echo), out, result);
  } else if (experiment == "tensorization") {
    std::optional<Vector> weights;
    if (rc.tensorization.weights) weights = *rc.tensorization.weights;
    const auto rows = tensorization_check(cfg.dist, rc.tensorization.n, rc.tensorization.delta_grid, cfg.trials,
                                          cfg.seeds, weights, cfg.threads);
    emit(concentration_table(rows, "tensorization", echo), out, result);
  } else if (experiment == "report-data") {
    if (out.empty()) throw ConfigError("report-data needs an output directory");
    std::filesystem::create_directories(out);
    for (const char* sub : {"tail", "opnorm", "lcd", "small_ball"}) {
      RunConfig sub_cfg = rc;
      sub_cfg.experiment.output = (std::filesystem::path(out) / sub).string();
      const Json r = run_experiment(sub, sub_cfg, threads);
      for (const auto& t : r["tables"]) result["tables"].push_back(t);
      for (const auto& p : r["outputs"]) result["outputs"].push_back(p);
    }
  } else {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  return result;
}

}  // namespace

extern "C" {

const char* pc_version(void) { return library_version(); }

const char* pc_last_error(void) { return g_last_error.c_str(); }

const char* pc_status_name(pc_status s) {
  switch (s) {
    case PC_OK: return "ok";
    case PC_ERR_SHAPE: return "shape error";
    case PC_ERR_ARGUMENT: return "argument error";
    case PC_ERR_CONFIG: return "config error";
    case PC_ERR_IO: return "io error";
    case PC_ERR_INVARIANT: return "invariant violation";
    case PC_ERR_ALLOC_CAP: return "allocation cap exceeded";
    case PC_ERR_PRECONDITION: return "precondition failed";
    case PC_ERR_CONTRACT: return "contract violation";
    case PC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void pc_string_free(char* s) { std::free(s); }

pc_status pc_system_sample(int n, int d, const char* dist_json, uint64_t master_seed, uint64_t trial,
                           pc_system** out) {
  return guarded([&] {
    require(out, "out");
    const DistributionSpec dist =
        dist_json ? distribution_from_json(Json::parse(dist_json)) : DistributionSpec::gaussian();
    *out = new pc_system{PolynomialSystem(
        sample_system(SystemShape::make(n, d), dist, SeedPolicy{master_seed}, trial))};
  });
}

pc_status pc_system_create_kss(int n, int d, uint64_t master_seed, uint64_t trial, pc_system** out) {
  return guarded([&] {
    require(out, "out");
    *out = new pc_system{make_kss(SystemShape::make(n, d), SeedPolicy{master_seed}, trial)};
  });
}

pc_status pc_system_from_tensor(int n, int d, const double* rand, const double* det, pc_system** out) {
  return guarded([&] {
    require(out, "out");
    require(rand, "rand");
    const SystemShape shape = SystemShape::make(n, d);
    shape.check_cap();
    const std::size_t len = shape.entries();
    CoefficientTensor r(shape, Vector(rand, rand + len));
    std::optional<CoefficientTensor> dt;
    if (det) dt.emplace(shape, Vector(det, det + len));
    *out = new pc_system{PolynomialSystem(std::move(r), std::move(dt))};
  });
}

pc_status pc_system_load(const char* path, pc_system** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new pc_system{PolynomialSystem(load_tensor(path))};
  });
}

pc_status pc_system_save(const pc_system* sys, const char* path, int json_format) {
  return guarded([&] {
    require(sys, "sys");
    require(path, "path");
    save_tensor(path, sys->sys.combined(), json_format ? TensorFormat::Json : TensorFormat::Binary);
  });
}

void pc_system_destroy(pc_system* sys) { delete sys; }

pc_status pc_system_shape(const pc_system* sys, int* n, int* d, int* m) {
  return guarded([&] {
    require(sys, "sys");
    if (n) *n = sys->sys.shape().n;
    if (d) *d = sys->sys.shape().d;
    if (m) *m = sys->sys.shape().m();
  });
}

pc_status pc_system_tensor(const pc_system* sys, double* out, size_t len) {
  return guarded([&] {
    require(sys, "sys");
    require(out, "out");
    const auto data = sys->sys.combined().data();
    if (len != data.size()) throw ArgumentError("buffer length must equal the tensor entry count");
    std::copy(data.begin(), data.end(), out);
  });
}

pc_status pc_evaluate(const pc_system* sys, const double* x, double* out_f) {
  return guarded([&] {
    require(sys, "sys");
    require(x, "x");
    require(out_f, "out_f");
    const Vector f = evaluate(sys->sys, std::span<const double>(x, static_cast<std::size_t>(sys->sys.shape().n)));
    std::copy(f.begin(), f.end(), out_f);
  });
}

pc_status pc_derivative_contract(const pc_system* sys, const double* x, const double* dirs, int k, double* out) {
  return guarded([&] {
    require(sys, "sys");
    require(x, "x");
    require(out, "out");
    if (k < 0) throw ArgumentError("k must be >= 0");
    if (k > 0) require(dirs, "dirs");
    const auto n = static_cast<std::size_t>(sys->sys.shape().n);
    std::vector<Vector> ds;
    for (int j = 0; j < k; ++j) ds.emplace_back(dirs + j * n, dirs + (j + 1) * n);
    const Vector r = derivative_contract(sys->sys, std::span<const double>(x, n), ds);
    std::copy(r.begin(), r.end(), out);
  });
}

pc_status pc_weyl_norm(const pc_system* sys, double* per_form, double* total) {
  return guarded([&] {
    require(sys, "sys");
    const WeylNorm w = weyl_norm(sys->sys);
    if (per_form) std::copy(w.per_form.begin(), w.per_form.end(), per_form);
    if (total) *total = w.total;
  });
}

pc_status pc_cond_at(const pc_system* sys, const double* x, char** result_json) {
  return guarded([&] {
    require(sys, "sys");
    require(x, "x");
    require(result_json, "result_json");
    const auto n = static_cast<std::size_t>(sys->sys.shape().n);
    *result_json = dup_string(to_json(cond_at(sys->sys, std::span<const double>(x, n))).dump());
  });
}

pc_status pc_lmin(const pc_system* sys, int restarts, int max_iters, double tol, uint64_t master_seed,
                  uint64_t trial, char** result_json) {
  return guarded([&] {
    require(sys, "sys");
    require(result_json, "result_json");
    if (restarts < 1 || max_iters < 1 || !(tol > 0)) throw ArgumentError("need restarts, max_iters >= 1, tol > 0");
    const LMinResult r = l_min(sys->sys, LMinOptions{restarts, max_iters, tol, SeedPolicy{master_seed}, trial});
    *result_json = dup_string(to_json(r).dump());
  });
}

pc_status pc_opnorm(const pc_system* sys, int restarts, int max_sweeps, double tol, uint64_t master_seed,
                    double* value) {
  return guarded([&] {
    require(sys, "sys");
    require(value, "value");
    *value = opnorm(sys->sys.combined(), OpnormOptions{restarts, max_sweeps, tol}, SeedPolicy{master_seed}).value;
  });
}

pc_status pc_lcd_estimate(const double* y, size_t len, double alpha, double gamma0, double d_max,
                          char** result_json) {
  return guarded([&] {
    require(y, "y");
    require(result_json, "result_json");
    const std::span<const double> ys(y, len);
    *result_json = dup_string(to_json(lcd_estimate(ys, LcdQuery::with_defaults(ys, alpha, gamma0, d_max))).dump());
  });
}

pc_status pc_run(const char* experiment, const char* config_json, int threads, char** result_json) {
  return guarded([&] {
    require(experiment, "experiment");
    require(result_json, "result_json");
    Json j = config_json ? Json::parse(config_json) : Json::object();
    *result_json = dup_string(run_experiment(experiment, config_from_json(j), threads).dump());
  });
}

}  // extern "C"
