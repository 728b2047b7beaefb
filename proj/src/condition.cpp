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

#include "condition.hpp"

#include <algorithm>
#include <cmath>

#include "ensembles.hpp"
#include "errors.hpp"

namespace polycond {
namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Row-major outer product v1 (x) v2 (x) ... (x) vd.
Vector outer(const std::vector<const Vector*>& factors) {
  Vector out{1.0};
  for (const Vector* f : factors) {
    Vector next(out.size() * f->size());
    std::size_t k = 0;
    for (double a : out)
      for (double b : *f) next[k++] = a * b;
    out = std::move(next);
  }
  return out;
}

}  // namespace

UnitPair UnitPair::make(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ShapeError("unit pair: x and y must share a length >= 2");
  if (std::abs(norm2(x) - 1.0) > 1e-10 || std::abs(norm2(y) - 1.0) > 1e-10 ||
      std::abs(dot(x, y)) > 1e-10)
    throw ContractViolation("unit pair: x and y must be orthonormal");
  UnitPair p;
  p.x_.assign(x.begin(), x.end());
  p.y_.assign(y.begin(), y.end());
  return p;
}

UnitPair UnitPair::from(const PairPoint& p) {
  return make(std::span<const double>(p.x.data(), static_cast<std::size_t>(p.x.size())),
              std::span<const double>(p.y.data(), static_cast<std::size_t>(p.y.size())));
}

double l_scale(const SystemShape& shape) { return std::pow(shape.d, 4.5) * shape.n; }

double l_pair(const PolynomialSystem& sys, const UnitPair& p) {
  if (p.x().size() != static_cast<std::size_t>(sys.shape().n)) throw ShapeError("l_pair: dimension mismatch");
  const double s = l_scale(sys.shape());
  const Vector f = evaluate(sys, p.x());
  const std::vector<Vector> dirs{p.y()};
  const Vector dy = derivative_contract(sys, p.x(), dirs);
  const double nd = norm2(dy);
  return std::sqrt(norm2(f) / std::sqrt(s) + nd * nd / s);
}

PairObjective l_squared_objective(const SymmetricEvaluator& eval) {
  const double s = std::pow(eval.d(), 4.5) * eval.n();
  return [&eval, s](const PairPoint& p) {
    const auto loc = eval.local(p.x);
    return loc.f.norm() / std::sqrt(s) + (loc.J * p.y).squaredNorm() / s;
  };
}

PairModel l_squared_model(const SymmetricEvaluator& eval) {
  const double s = std::pow(eval.d(), 4.5) * eval.n();
  return [&eval, s](const PairPoint& p) {
    const auto loc = eval.local(p.x, &p.y);
    const Eigen::Index m = loc.f.size(), n = p.x.size();
    // ||f'|| <= (||f'||^2 + ||f||^2) / (2 ||f||): majorizes the kink at f = 0.
    const double nf = std::max(loc.f.norm(), 1e-150);
    const double w = 1.0 / std::sqrt(2.0 * nf * std::sqrt(s));
    const double v = 1.0 / std::sqrt(s);
    PairResidual res;
    res.r.resize(2 * m);
    res.r << w * loc.f, v * (loc.J * p.y);
    res.dx.resize(2 * m, n);
    res.dx << w * loc.J, v * loc.Hdir;
    res.dy.resize(2 * m, n);
    res.dy << Eigen::MatrixXd::Zero(m, n), v * loc.J;
    return res;
  };
}

LMinResult l_min(const PolynomialSystem& sys, const LMinOptions& options) {
  if (options.restarts < 1) throw ArgumentError("l_min: restarts must be >= 1");
  const SymmetricEvaluator eval(sys);
  const auto objective = l_squared_objective(eval);
  const auto model = l_squared_model(eval);
  const CounterStream stream(options.seeds, options.trial, purpose::kRestarts);
  const LmOptions lm{options.max_iters, options.tol};

  LMinResult best;
  bool have = false;
  for (int r = 0; r < options.restarts; ++r) {
    StreamCursor cursor(stream.substream(static_cast<std::uint64_t>(r)));
    const PairPoint start = random_pair(cursor, sys.shape().n);
    const PairOutcome out = minimize_pair(start, model, objective, lm);
    const UnitPair pair = UnitPair::from(out.point);
    const double value = l_pair(sys, pair);
    if (!have || value < best.value) {
      best.value = value;
      best.argmin = pair;
      have = true;
    }
    best.converged = out.converged;
  }
  best.restarts_used = options.restarts;
  return best;
}

CondReport cond_at(const PolynomialSystem& sys, std::span<const double> x) {
  const TangentFrame frame = TangentFrame::at(x);
  const TangentJacobian tj = jacobian_tangent(sys, frame);
  const WeylNorm weyl = weyl_norm(sys);
  const Vector f = evaluate(sys, frame.x);
  const auto& shape = sys.shape();

  CondReport rep;
  rep.sigma_min_tangent = tj.sigma_min;
  rep.weyl_total = weyl.total;
  if (weyl.total == 0.0) return rep;

  const double max_weyl = *std::max_element(weyl.per_form.begin(), weyl.per_form.end());
  double max_f = 0.0;
  for (double v : f) max_f = std::max(max_f, std::abs(v));

  // ||(D_x|T_x)^{-1} Delta|| = sqrt(d) / sigma_min for Delta = sqrt(d) I.
  ExtendedReal jac_term1, jac_term2;
  if (tj.sigma_min == 0.0) {
    jac_term1 = jac_term2 = ExtendedReal::inf();
  } else {
    const double inv = std::sqrt(static_cast<double>(shape.d)) / tj.sigma_min;
    jac_term1 = {weyl.total * inv, false};
    jac_term2 = {std::sqrt(static_cast<double>(shape.n)) * max_weyl * inv, false};
  }
  const ExtendedReal value_term = max_f == 0.0 ? ExtendedReal::inf() : ExtendedReal{max_weyl / max_f, false};
  rep.mu1 = jac_term1;
  rep.mu2 = jac_term2 <= value_term ? jac_term2 : value_term;
  return rep;
}

double sigma_min_tangent(const PolynomialSystem& sys, std::span<const double> x) {
  return jacobian_tangent(sys, TangentFrame::at(x)).sigma_min;
}

PolynomialSystem plant_double_root(SystemShape shape, const UnitPair& p, const DistributionSpec& dist,
                                   const SeedPolicy& seeds, std::uint64_t trial) {
  if (p.x().size() != static_cast<std::size_t>(shape.n)) throw ShapeError("plant_double_root: dimension mismatch");
  const CoefficientTensor sampled = sample_system(shape, dist, seeds, trial);
  const int d = shape.d;

  // f_l(x) = <a_l, u>, D_{l,x}(y) = <a_l, w>.
  std::vector<const Vector*> factors(static_cast<std::size_t>(d), &p.x());
  const Vector u = outer(factors);
  Vector w(u.size(), 0.0);
  for (int s = 0; s < d; ++s) {
    factors[static_cast<std::size_t>(s)] = &p.y();
    const Vector term = outer(factors);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += term[i];
    factors[static_cast<std::size_t>(s)] = &p.x();
  }
  const double uu = dot(u, u), uw = dot(u, w), ww = dot(w, w);
  const double det = uu * ww - uw * uw;
  if (!(det > 1e-12 * uu * ww)) throw ContractViolation("plant_double_root: degenerate constraint pair");

  std::vector<double> data(sampled.data().begin(), sampled.data().end());
  const std::size_t pf = shape.per_form();
  for (int l = 0; l < shape.m(); ++l) {
    std::span<double> a(data.data() + static_cast<std::size_t>(l) * pf, pf);
    // Two passes to clean up roundoff.
    for (int pass = 0; pass < 2; ++pass) {
      const double bu = dot(a, u), bw = dot(a, w);
      const double cu = (ww * bu - uw * bw) / det;
      const double cw = (uu * bw - uw * bu) / det;
      for (std::size_t i = 0; i < pf; ++i) a[i] -= cu * u[i] + cw * w[i];
    }
  }
  return PolynomialSystem(CoefficientTensor(shape, std::move(data)));
}

GrowthResult growth_check(const PolynomialSystem& sys, const UnitPair& p, double eps, int samples,
                          const SeedPolicy& seeds, std::uint64_t trial) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("growth_check: eps must lie in (0, 1)");
  if (samples < 1) throw ArgumentError("growth_check: samples must be >= 1");
  const double lval = l_pair(sys, p);
  if (lval > eps)
    throw PreconditionError("growth_check: hypothesis L(x, y) <= eps violated (L = " + std::to_string(lval) + ")");

  const int n = sys.shape().n;
  StreamCursor cursor(CounterStream(seeds, trial, purpose::kGrowthSamples));
  GrowthResult out;
  out.samples = samples;
  Vector point(static_cast<std::size_t>(n));
  for (int i = 0; i < samples; ++i) {
    double t = 0.0;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    if (i > 0) {
      t = 2.0 * cursor.uniform() - 1.0;
      z = random_unit_vector(cursor, n) * std::pow(cursor.uniform(), 1.0 / n);
    }
    for (int j = 0; j < n; ++j)
      point[static_cast<std::size_t>(j)] =
          p.x()[static_cast<std::size_t>(j)] + eps * t * p.y()[static_cast<std::size_t>(j)] + eps * eps * z(j);
    const double ratio = norm2(evaluate(sys, point)) / (std::sqrt(static_cast<double>(n)) * eps * eps);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

}  // namespace polycond
