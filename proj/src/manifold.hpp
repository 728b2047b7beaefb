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

#ifndef POLYCOND_MANIFOLD_HPP
#define POLYCOND_MANIFOLD_HPP

#include <functional>

#include <Eigen/Dense>

#include "random.hpp"

namespace polycond {

/// Orthonormal pair (x, y): a point of the Stiefel manifold V_2(R^n).
struct PairPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

/// Residual r(x, y) with its ambient partial Jacobians. A least-squares model
/// of an objective: ||r||^2 must majorize objective(x, y) - c near the point
/// and touch it at the point, for some constant c.
struct PairResidual {
  Eigen::VectorXd r;
  Eigen::MatrixXd dx;  // rows(r) x n
  Eigen::MatrixXd dy;  // rows(r) x n
};

struct SphereResidual {
  Eigen::VectorXd r;
  Eigen::MatrixXd dx;
};

struct LmOptions {
  int max_iters = 200;
  double tol = 1e-12;
};

struct PairOutcome {
  PairPoint point;
  double objective = 0.0;
  int iterations = 0;
  double last_step = 0.0;
  bool converged = false;
};

struct SphereOutcome {
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

using PairModel = std::function<PairResidual(const PairPoint&)>;
using PairObjective = std::function<double(const PairPoint&)>;
using SphereModel = std::function<SphereResidual(const Eigen::VectorXd&)>;
using SphereObjective = std::function<double(const Eigen::VectorXd&)>;

/// Normalize x, Gram-Schmidt y against x, normalize y.
PairPoint retract(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
/// Orthonormalized Gaussian pair.
PairPoint random_pair(StreamCursor& cursor, int n);
Eigen::VectorXd random_unit_vector(StreamCursor& cursor, int n);

/// n x (n - 2) orthonormal basis of span{x, y}^perp.
Eigen::MatrixXd complement_basis(const PairPoint& p);

/// Levenberg-Marquardt in tangent coordinates of V_2(R^n). Each step solves
/// the damped normal equations of the model at the current point, moves along
/// the tangent direction and retracts; it is accepted only if `objective`
/// strictly decreases.
PairOutcome minimize_pair(PairPoint start, const PairModel& model, const PairObjective& objective,
                          const LmOptions& options);

/// Same on the unit sphere.
SphereOutcome minimize_sphere(Eigen::VectorXd start, const SphereModel& model,
                              const SphereObjective& objective, const LmOptions& options);

/// Minimum-norm Gauss-Newton iteration towards {r = 0}; returns the last
/// point and its residual norm.
PairOutcome project_pair(PairPoint start, const PairModel& model, int max_iters, double tol);
SphereOutcome project_sphere(Eigen::VectorXd start, const SphereModel& model, int max_iters,
                             double tol);

}  // namespace polycond

#endif  // POLYCOND_MANIFOLD_HPP
