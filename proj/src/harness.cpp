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

#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ensembles.hpp"
#include "errors.hpp"
#include "manifold.hpp"
#include "parallel.hpp"
#include "tensor_io.hpp"

namespace polycond {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

LMinOptions lmin_options(const OptimizerKnobs& knobs, const SeedPolicy& seeds, std::uint64_t trial) {
  return LMinOptions{knobs.restarts, knobs.max_iters, knobs.tol, seeds, trial};
}

std::vector<std::int64_t> count_at_or_below(const std::vector<double>& values, const std::vector<double>& grid) {
  std::vector<std::int64_t> hits(grid.size(), 0);
  for (double v : values)
    for (std::size_t j = 0; j < grid.size(); ++j)
      if (v <= grid[j]) ++hits[j];
  return hits;
}

// Nearest point of {unit x : ||x off the support|| <= rho} to z / ||z||.
Eigen::VectorXd project_near_support(const Eigen::VectorXd& z, const std::vector<bool>& on, double rho) {
  Eigen::VectorXd in = Eigen::VectorXd::Zero(z.size()), out = Eigen::VectorXd::Zero(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) (on[static_cast<std::size_t>(i)] ? in : out)(i) = z(i);
  const double ni = in.norm(), no = out.norm();
  const double total = std::hypot(ni, no);
  if (no <= rho * total) return z / total;
  if (ni == 0.0) {
    // Degenerate: all mass off the support. Keep the direction of the largest
    // on-support coordinate slot.
    for (Eigen::Index i = 0; i < z.size(); ++i)
      if (on[static_cast<std::size_t>(i)]) {
        in(i) = 1.0;
        break;
      }
    return std::sqrt(1.0 - rho * rho) * in + rho * out / no;
  }
  return std::sqrt(1.0 - rho * rho) * in / ni + (no > 0 ? rho * out / no : out);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (shape.n < 2 || shape.d < 1) throw ConfigError("config: need n >= 2 and d >= 1");
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (eps_grid.empty()) throw ConfigError("config: eps_grid must not be empty");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0)) throw ConfigError("config: eps_grid entries must be positive");
    if (i > 0 && !(eps_grid[i] > eps_grid[i - 1])) throw ConfigError("config: eps_grid must be ascending");
  }
  if (optimizer.restarts < 1 || optimizer.max_iters < 1 || !(optimizer.tol > 0))
    throw ConfigError("config: optimizer needs restarts >= 1, max_iters >= 1, tol > 0");
  if (threads < 1) throw ConfigError("config: threads must be >= 1");
  if (model == Model::Kss && dist.kind != DistributionSpec::Kind::Gaussian)
    throw ConfigError("config: the KSS model requires the gaussian distribution");
  try {
    dist.validate();
    shape.check_cap();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunMetadata metadata_for(const ExperimentConfig& cfg) {
  RunMetadata m;
  m.n = cfg.shape.n;
  m.d = cfg.shape.d;
  m.distribution = to_string(cfg.dist.kind);
  m.master_seed = cfg.seeds.master_seed;
  m.bezout = std::pow(static_cast<double>(cfg.shape.d), cfg.shape.n - 1);
  m.monomial_count = (cfg.shape.n - 1) * binomial(cfg.shape.n - 1 + cfg.shape.d, cfg.shape.d);
  return m;
}

std::optional<CoefficientTensor> load_deterministic_part(const ExperimentConfig& cfg) {
  if (!cfg.det_source) return std::nullopt;
  CoefficientTensor det = load_tensor(*cfg.det_source);
  if (!(det.shape() == cfg.shape)) throw ConfigError("config: deterministic part has the wrong shape");
  const GammaReport rep = gamma_control_estimate(det, cfg.gamma, 50, 200, cfg.seeds);
  if (!rep.passed) {
    std::ostringstream msg;
    msg << "deterministic part is not " << cfg.gamma << "-controlled: sup estimates [";
    for (std::size_t k = 0; k < rep.sup_estimates.size(); ++k) msg << (k ? ", " : "") << rep.sup_estimates[k];
    msg << "] exceed n^gamma = " << rep.threshold;
    throw ConfigError(msg.str());
  }
  return det;
}

PolynomialSystem trial_system(const ExperimentConfig& cfg, const std::optional<CoefficientTensor>& det,
                              std::uint64_t trial) {
  CoefficientTensor rand = cfg.model == Model::Kss ? make_kss(cfg.shape, cfg.seeds, trial).rand()
                                                   : sample_system(cfg.shape, cfg.dist, cfg.seeds, trial);
  return PolynomialSystem(std::move(rand), det);
}

Estimate make_estimate(std::int64_t hits, std::int64_t trials) {
  return Estimate{hits, trials, static_cast<double>(hits) / static_cast<double>(trials),
                  wilson_interval(hits, trials)};
}

TailCurve run_tail(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto det = load_deterministic_part(cfg);
  TailCurve curve;
  curve.eps_grid = cfg.eps_grid;
  curve.trials = cfg.trials;
  curve.metadata = metadata_for(cfg);
  curve.values.assign(static_cast<std::size_t>(cfg.trials), 0.0);
  parallel_for(curve.values.size(), cfg.threads, [&](std::size_t t) {
    const PolynomialSystem sys = trial_system(cfg, det, t);
    curve.values[t] = l_min(sys, lmin_options(cfg.optimizer, cfg.seeds, t)).value;
  });
  curve.hits = count_at_or_below(curve.values, curve.eps_grid);
  for (auto h : curve.hits) curve.ci.push_back(wilson_interval(h, curve.trials));
  return curve;
}

Example1Result run_example1(int n, std::int64_t trials, const SeedPolicy& seeds, int threads) {
  if (n < 3) throw ArgumentError("example1: n must be >= 3");
  if (trials < 1) throw ArgumentError("example1: trials must be >= 1");
  const SystemShape shape = SystemShape::make(n, 2);
  const DistributionSpec dist = DistributionSpec::rademacher();
  Vector x0(static_cast<std::size_t>(n), 0.0);
  x0[0] = x0[1] = 1.0 / std::sqrt(2.0);

  std::vector<char> f_zero(static_cast<std::size_t>(trials), 0), joint(static_cast<std::size_t>(trials), 0);
  parallel_for(f_zero.size(), threads, [&](std::size_t t) {
    const CoefficientTensor a = sample_system(shape, dist, seeds, t);
    bool zero = true;
    for (int l = 0; l < shape.m() && zero; ++l) {
      const auto form = a.form(l);
      // f_l(1, 1, 0, ...) = a11 + a12 + a21 + a22, an integer.
      const long long sum = std::llround(form[0]) + std::llround(form[1]) +
                            std::llround(form[static_cast<std::size_t>(n)]) +
                            std::llround(form[static_cast<std::size_t>(n) + 1]);
      zero = sum == 0;
    }
    f_zero[t] = zero;
    if (zero) joint[t] = sigma_min_tangent(PolynomialSystem(a), x0) < 1e-10;
  });

  Example1Result r;
  r.n = n;
  r.p_f_zero = make_estimate(std::count(f_zero.begin(), f_zero.end(), 1), trials);
  r.p_joint = make_estimate(std::count(joint.begin(), joint.end(), 1), trials);
  r.exact_p_f_zero = std::pow(3.0 / 8.0, n - 1);
  return r;
}

std::string to_string(CorollaryEvent e) {
  switch (e) {
    case CorollaryEvent::DoubleRoot: return "double_root";
    case CorollaryEvent::RegularRoot: return "regular_root";
    case CorollaryEvent::CriticalValue: return "critical_value";
    case CorollaryEvent::SimultaneousSmall: return "simultaneous_small";
  }
  return "unknown";
}

Interval EventEstimates::ci(int event, std::size_t eps_index) const {
  return wilson_interval(hits.at(static_cast<std::size_t>(event)).at(eps_index), trials);
}

CorollaryWitness corollary_witness(const PolynomialSystem& sys, const OptimizerKnobs& knobs,
                                   const SeedPolicy& seeds, std::uint64_t trial) {
  const SymmetricEvaluator eval(sys);
  const auto& shape = sys.shape();
  const int m = shape.m(), n = shape.n;
  const double d = shape.d;
  const double s = l_scale(shape);
  // Numerical zero for "f(x) = 0" style constraints, relative to the system size.
  const double tau = 1e-10 * weyl_norm(sys).total;

  CorollaryWitness w;
  const LMinResult best = l_min(sys, lmin_options(knobs, seeds, trial));
  PairPoint start;
  start.x = Eigen::Map<const Eigen::VectorXd>(best.argmin.x().data(), n);
  start.y = Eigen::Map<const Eigen::VectorXd>(best.argmin.y().data(), n);

  // f(x) = 0 and D_x(y) = 0 together.
  const PairModel both = [&](const PairPoint& p) {
    const auto loc = eval.local(p.x, &p.y);
    PairResidual r;
    r.r.resize(2 * m);
    r.r << loc.f, loc.J * p.y;
    r.dx.resize(2 * m, n);
    r.dx << loc.J, loc.Hdir;
    r.dy.resize(2 * m, n);
    r.dy << Eigen::MatrixXd::Zero(m, n), loc.J;
    return r;
  };
  w.double_root = project_pair(start, both, 100, tau).objective <= tau ? 0.0 : kInf;

  // D_x(y) = 0, then read off ||f(x)||.
  const PairModel critical = [&](const PairPoint& p) {
    const auto loc = eval.local(p.x, &p.y);
    return PairResidual{loc.J * p.y, loc.Hdir, loc.J};
  };
  const PairOutcome crit = project_pair(start, critical, 100, tau);
  w.critical_value = crit.objective <= tau
                         ? std::sqrt(eval.value(crit.point.x).norm() / (std::pow(d, 9.0 / 8.0) * std::pow(n, 0.25)))
                         : kInf;

  // Roots of f on the sphere, then the best tangent direction at each.
  const SphereModel roots = [&](const Eigen::VectorXd& x) {
    const auto loc = eval.local(x);
    return SphereResidual{loc.f, loc.J};
  };
  const CounterStream witness_stream(seeds, trial, purpose::kWitness);
  w.regular_root = kInf;
  for (int r = 0; r < knobs.restarts; ++r) {
    StreamCursor cursor(witness_stream.substream(static_cast<std::uint64_t>(r)));
    const SphereOutcome root = project_sphere(random_unit_vector(cursor, n), roots, 100, tau);
    if (root.objective > tau) continue;
    const Vector x(root.x.data(), root.x.data() + n);
    w.regular_root = std::min(w.regular_root, sigma_min_tangent(sys, x) / (std::pow(d, 9.0 / 4.0) * std::sqrt(n)));
  }

  // ||f(x)|| and ||f(y)|| small together.
  const PairModel simultaneous = [&](const PairPoint& p) {
    const auto lx = eval.local(p.x);
    const auto ly = eval.local(p.y);
    PairResidual r;
    r.r.resize(2 * m);
    r.r << lx.f, ly.f;
    r.dx.resize(2 * m, n);
    r.dx << lx.J, Eigen::MatrixXd::Zero(m, n);
    r.dy.resize(2 * m, n);
    r.dy << Eigen::MatrixXd::Zero(m, n), ly.J;
    return r;
  };
  const PairObjective simultaneous_objective = [&](const PairPoint& p) {
    return eval.value(p.x).squaredNorm() + eval.value(p.y).squaredNorm();
  };
  w.simultaneous = kInf;
  const LmOptions lm{knobs.max_iters, knobs.tol};
  for (int r = 0; r < knobs.restarts; ++r) {
    StreamCursor cursor(witness_stream.substream(static_cast<std::uint64_t>(knobs.restarts + r)));
    const PairOutcome out = minimize_pair(random_pair(cursor, n), simultaneous, simultaneous_objective, lm);
    const double worst = std::max(eval.value(out.point.x).norm(), eval.value(out.point.y).norm());
    w.simultaneous = std::min(w.simultaneous, worst / std::pow(s, 0.25));
  }
  return w;
}

EventEstimates run_corollary_events(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto det = load_deterministic_part(cfg);
  EventEstimates est;
  est.eps_grid = cfg.eps_grid;
  est.trials = cfg.trials;
  est.metadata = metadata_for(cfg);
  est.witnesses.resize(static_cast<std::size_t>(cfg.trials));
  parallel_for(est.witnesses.size(), cfg.threads, [&](std::size_t t) {
    est.witnesses[t] = corollary_witness(trial_system(cfg, det, t), cfg.optimizer, cfg.seeds, t);
  });
  est.hits.assign(kCorollaryEventCount, std::vector<std::int64_t>(est.eps_grid.size(), 0));
  for (const auto& w : est.witnesses) {
    const double values[kCorollaryEventCount] = {w.double_root, w.regular_root, w.critical_value, w.simultaneous};
    for (int e = 0; e < kCorollaryEventCount; ++e)
      for (std::size_t j = 0; j < est.eps_grid.size(); ++j)
        if (values[e] <= est.eps_grid[j]) ++est.hits[static_cast<std::size_t>(e)][j];
  }
  return est;
}

double compressible_infimum(const PolynomialSystem& sys, const CompressibleOptions& options,
                            const OptimizerKnobs& knobs, const SeedPolicy& seeds, std::uint64_t trial) {
  options.params.validate();
  const SymmetricEvaluator eval(sys);
  const int n = sys.shape().n;
  const int k = std::min(options.params.sparsity(n), n);
  const double rho = options.params.rho;
  const CounterStream stream(seeds, trial, purpose::kCompressible);

  double best = kInf;
  const int starts = options.fixed_support ? knobs.restarts : 2 * knobs.restarts;
  for (int j = 0; j < starts; ++j) {
    StreamCursor cursor(stream.substream(static_cast<std::uint64_t>(j)));
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    if (j >= knobs.restarts) {
      for (int i = 0; i < k; ++i) {
        const auto pick = static_cast<std::size_t>(i) + cursor.below(static_cast<std::uint64_t>(n - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[pick]);
      }
    }
    std::vector<bool> on(static_cast<std::size_t>(n), false);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < k; ++i) {
      on[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = true;
      x(idx[static_cast<std::size_t>(i)]) = cursor.gaussian();
    }
    if (x.norm() == 0.0) x(idx[0]) = 1.0;
    x = project_near_support(x, on, rho);

    double g = eval.value(x).squaredNorm();
    double step = 0.5;
    for (int it = 0; it < knobs.max_iters && g > 0.0; ++it) {
      const auto loc = eval.local(x);
      Eigen::VectorXd grad = 2.0 * loc.J.transpose() * loc.f;
      grad -= x.dot(grad) * x;
      if (!(grad.norm() > 0.0)) break;
      const Eigen::VectorXd dir = -grad.normalized();
      bool accepted = false;
      for (step = std::min(0.5, 2.0 * step); step > knobs.tol; step *= 0.5) {
        const Eigen::VectorXd cand = project_near_support(x + step * dir, on, rho);
        const double gc = eval.value(cand).squaredNorm();
        if (gc < g) {
          x = cand;
          g = gc;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    best = std::min(best, g / n);
  }
  return best;
}

CompressibleResult run_compressible_infimum(const ExperimentConfig& cfg, const CompressibleOptions& options) {
  cfg.validate();
  const auto det = load_deterministic_part(cfg);
  CompressibleResult res;
  res.trials = cfg.trials;
  res.metadata = metadata_for(cfg);
  res.infimum.assign(static_cast<std::size_t>(cfg.trials), 0.0);
  parallel_for(res.infimum.size(), cfg.threads, [&](std::size_t t) {
    res.infimum[t] = compressible_infimum(trial_system(cfg, det, t), options, cfg.optimizer, cfg.seeds, t);
  });
  res.below = std::count_if(res.infimum.begin(), res.infimum.end(), [&](double v) { return v <= options.c_sparse; });
  res.fraction_below = static_cast<double>(res.below) / static_cast<double>(res.trials);
  res.ci = wilson_interval(res.below, res.trials);
  return res;
}

}  // namespace polycond
