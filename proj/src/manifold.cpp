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

#include "manifold.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace polycond {
namespace {

// Tangent coordinates theta = (a, w, v):
//   dx = a*y + P*w,  dy = -a*x + P*v,
// which spans the 2n - 3 dimensional tangent space of V_2(R^n).
Eigen::MatrixXd tangent_matrix(const PairPoint& p, const Eigen::MatrixXd& P, const PairResidual& res) {
  const Eigen::Index k = P.cols();
  Eigen::MatrixXd A(res.r.size(), 1 + 2 * k);
  A.col(0) = res.dx * p.y - res.dy * p.x;
  A.middleCols(1, k) = res.dx * P;
  A.middleCols(1 + k, k) = res.dy * P;
  return A;
}

PairPoint apply_step(const PairPoint& p, const Eigen::MatrixXd& P, const Eigen::VectorXd& theta) {
  const Eigen::Index k = P.cols();
  const double a = theta(0);
  Eigen::VectorXd dx = a * p.y;
  Eigen::VectorXd dy = -a * p.x;
  if (k > 0) {
    dx += P * theta.segment(1, k);
    dy += P * theta.segment(1 + k, k);
  }
  return retract(p.x + dx, p.y + dy);
}

Eigen::MatrixXd sphere_basis(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return Q.rightCols(n - 1);
}

Eigen::VectorXd sphere_step(const Eigen::VectorXd& x, const Eigen::MatrixXd& B, const Eigen::VectorXd& theta) {
  return (x + B * theta).normalized();
}

}  // namespace

PairPoint retract(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  PairPoint p;
  p.x = x.normalized();
  Eigen::VectorXd v = y - p.x.dot(y) * p.x;
  v -= p.x.dot(v) * p.x;
  const double nv = v.norm();
  if (!(nv > 1e-300)) throw ArgumentError("retract: y is parallel to x");
  p.y = v / nv;
  return p;
}

Eigen::VectorXd random_unit_vector(StreamCursor& cursor, int n) {
  for (;;) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = cursor.gaussian();
    const double nv = v.norm();
    if (nv > 1e-12) return v / nv;
  }
}

PairPoint random_pair(StreamCursor& cursor, int n) {
  for (;;) {
    Eigen::VectorXd x(n), y(n);
    for (int i = 0; i < n; ++i) x(i) = cursor.gaussian();
    for (int i = 0; i < n; ++i) y(i) = cursor.gaussian();
    if (x.norm() < 1e-12) continue;
    const Eigen::VectorXd u = x.normalized();
    if ((y - u.dot(y) * u).norm() < 1e-12) continue;
    return retract(x, y);
  }
}

Eigen::MatrixXd complement_basis(const PairPoint& p) {
  const Eigen::Index n = p.x.size();
  Eigen::MatrixXd xy(n, 2);
  xy.col(0) = p.x;
  xy.col(1) = p.y;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(xy);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return Q.rightCols(n - 2);
}

PairOutcome minimize_pair(PairPoint start, const PairModel& model, const PairObjective& objective,
                          const LmOptions& options) {
  PairOutcome out;
  out.point = retract(start.x, start.y);
  out.objective = objective(out.point);
  out.last_step = 0.0;
  double lambda = -1.0;
  int it = 0;
  while (it < options.max_iters) {
    if (out.objective == 0.0) {
      out.converged = true;
      break;
    }
    const PairResidual res = model(out.point);
    const Eigen::MatrixXd P = complement_basis(out.point);
    const Eigen::MatrixXd A = tangent_matrix(out.point, P, res);
    const Eigen::VectorXd g = A.transpose() * res.r;
    const Eigen::MatrixXd H = A.transpose() * A;
    if (!(g.norm() > 0.0)) {
      out.converged = true;
      break;
    }
    if (lambda < 0) lambda = 1e-3 * std::max(H.diagonal().maxCoeff(), 1e-300);

    bool accepted = false;
    while (it < options.max_iters) {
      ++it;
      Eigen::MatrixXd damped = H;
      damped.diagonal().array() += lambda;
      const Eigen::VectorXd theta = damped.ldlt().solve(-g);
      const PairPoint trial = apply_step(out.point, P, theta);
      const double value = objective(trial);
      if (value < out.objective) {
        out.point = trial;
        out.objective = value;
        out.last_step = theta.norm();
        lambda = std::max(lambda / 3.0, 1e-300);
        accepted = true;
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e300) break;
    }
    if (!accepted) {
      out.converged = true;  // no descent at any damping
      out.last_step = 0.0;
      break;
    }
    if (out.last_step < options.tol) {
      out.converged = true;
      break;
    }
  }
  out.iterations = it;
  return out;
}

SphereOutcome minimize_sphere(Eigen::VectorXd start, const SphereModel& model,
                              const SphereObjective& objective, const LmOptions& options) {
  SphereOutcome out;
  out.x = start.normalized();
  out.objective = objective(out.x);
  double lambda = -1.0;
  int it = 0;
  while (it < options.max_iters) {
    if (out.objective == 0.0) {
      out.converged = true;
      break;
    }
    const SphereResidual res = model(out.x);
    const Eigen::MatrixXd B = sphere_basis(out.x);
    const Eigen::MatrixXd A = res.dx * B;
    const Eigen::VectorXd g = A.transpose() * res.r;
    const Eigen::MatrixXd H = A.transpose() * A;
    if (!(g.norm() > 0.0)) {
      out.converged = true;
      break;
    }
    if (lambda < 0) lambda = 1e-3 * std::max(H.diagonal().maxCoeff(), 1e-300);
    bool accepted = false;
    double step = 0.0;
    while (it < options.max_iters) {
      ++it;
      Eigen::MatrixXd damped = H;
      damped.diagonal().array() += lambda;
      const Eigen::VectorXd theta = damped.ldlt().solve(-g);
      const Eigen::VectorXd trial = sphere_step(out.x, B, theta);
      const double value = objective(trial);
      if (value < out.objective) {
        out.x = trial;
        out.objective = value;
        step = theta.norm();
        lambda = std::max(lambda / 3.0, 1e-300);
        accepted = true;
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e300) break;
    }
    if (!accepted || step < options.tol) {
      out.converged = true;
      break;
    }
  }
  out.iterations = it;
  return out;
}

PairOutcome project_pair(PairPoint start, const PairModel& model, int max_iters, double tol) {
  PairOutcome out;
  out.point = retract(start.x, start.y);
  PairResidual res = model(out.point);
  out.objective = res.r.norm();
  for (int it = 0; it < max_iters && out.objective > tol; ++it) {
    out.iterations = it + 1;
    const Eigen::MatrixXd P = complement_basis(out.point);
    const Eigen::MatrixXd A = tangent_matrix(out.point, P, res);
    const Eigen::VectorXd theta = A.completeOrthogonalDecomposition().solve(-res.r);
    bool improved = false;
    for (double scale = 1.0; scale > 1e-6; scale *= 0.5) {
      const PairPoint trial = apply_step(out.point, P, scale * theta);
      PairResidual trial_res = model(trial);
      const double norm = trial_res.r.norm();
      if (norm < out.objective) {
        out.point = trial;
        res = std::move(trial_res);
        out.objective = norm;
        out.last_step = scale * theta.norm();
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  out.converged = out.objective <= tol;
  return out;
}

SphereOutcome project_sphere(Eigen::VectorXd start, const SphereModel& model, int max_iters, double tol) {
  SphereOutcome out;
  out.x = start.normalized();
  SphereResidual res = model(out.x);
  out.objective = res.r.norm();
  for (int it = 0; it < max_iters && out.objective > tol; ++it) {
    out.iterations = it + 1;
    const Eigen::MatrixXd B = sphere_basis(out.x);
    const Eigen::MatrixXd A = res.dx * B;
    const Eigen::VectorXd theta = A.completeOrthogonalDecomposition().solve(-res.r);
    bool improved = false;
    for (double scale = 1.0; scale > 1e-6; scale *= 0.5) {
      const Eigen::VectorXd trial = sphere_step(out.x, B, scale * theta);
      SphereResidual trial_res = model(trial);
      const double norm = trial_res.r.norm();
      if (norm < out.objective) {
        out.x = trial;
        res = std::move(trial_res);
        out.objective = norm;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  out.converged = out.objective <= tol;
  return out;
}

}  // namespace polycond
