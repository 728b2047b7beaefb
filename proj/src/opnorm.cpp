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

#include "opnorm.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "parallel.hpp"

namespace polycond {
namespace {

std::vector<std::span<const double>> as_spans(const std::vector<Vector>& slots) {
  return {slots.begin(), slots.end()};
}

Vector random_unit(StreamCursor& cursor, int n) {
  for (;;) {
    Vector v = cursor.gaussian_vector(static_cast<std::size_t>(n));
    double norm = 0.0;
    for (double e : v) norm += e * e;
    norm = std::sqrt(norm);
    if (norm > 1e-300) {
      for (auto& e : v) e /= norm;
      return v;
    }
  }
}

// Top right singular vector of B, sign-aligned with `previous`.
Vector top_right_singular(const Eigen::MatrixXd& B, const Vector& previous) {
  const Eigen::MatrixXd gram = B.transpose() * B;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::Index n = gram.rows();
  Eigen::VectorXd v = eig.eigenvectors().col(n - 1);
  double dot = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) dot += v(i) * previous[static_cast<std::size_t>(i)];
  if (dot < 0) v = -v;
  return Vector(v.data(), v.data() + n);
}

double relative_change(double before, double after) {
  return std::abs(after - before) / std::max(std::abs(after), 1e-300);
}

}  // namespace

double OpnormResult::norm() const { return std::sqrt(value); }

double multilinear_objective(const TensorView& t, std::span<const Vector> slots) {
  std::vector<std::span<const double>> spans(slots.begin(), slots.end());
  const Vector r = contract_all(t, spans);
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

OpnormResult opnorm(const TensorView& t, const OpnormOptions& options, const CounterStream& stream) {
  return sup_with_repeated_slot(t, 0, options, stream);
}

OpnormResult opnorm(const CoefficientTensor& t, const OpnormOptions& options, const SeedPolicy& seeds) {
  return opnorm(t.view(), options, CounterStream(seeds, 0, purpose::kRestarts));
}

OpnormResult sup_with_repeated_slot(const TensorView& t, int repeated, const OpnormOptions& options,
                                    const CounterStream& stream) {
  if (options.restarts < 1) throw ArgumentError("opnorm: restarts must be >= 1");
  if (repeated < 0 || repeated > t.d) throw ArgumentError("opnorm: bad repeated-slot count");
  const int d = t.d;
  OpnormResult best;
  best.restarts = options.restarts;
  best.value = -1.0;

  for (int r = 0; r < options.restarts; ++r) {
    StreamCursor cursor(stream.substream(static_cast<std::uint64_t>(r)));
    std::vector<Vector> slots(static_cast<std::size_t>(d));
    const Vector x0 = repeated > 0 ? random_unit(cursor, t.n) : Vector{};
    for (int s = 0; s < d; ++s)
      slots[static_cast<std::size_t>(s)] = s < repeated ? x0 : random_unit(cursor, t.n);

    auto set_x = [&](const Vector& x) {
      for (int s = 0; s < repeated; ++s) slots[static_cast<std::size_t>(s)] = x;
    };

    double value = multilinear_objective(t, slots);
    bool converged = false;
    int sweep = 0;
    for (; sweep < options.max_sweeps && !converged; ++sweep) {
      const double before = value;

      if (repeated == 1) {
        const Eigen::MatrixXd B = contract_all_but(t, 0, as_spans(slots));
        const Vector cand = top_right_singular(B, slots[0]);
        const Vector keep = slots[0];
        slots[0] = cand;
        const double v = multilinear_objective(t, slots);
        if (v >= value) value = v; else slots[0] = keep;
      } else if (repeated >= 2) {
        const Eigen::MatrixXd G = contract_all_but(t, 0, as_spans(slots));
        const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(slots[0].data(), t.n);
        const Eigen::VectorXd g = G.transpose() * (G * x);
        const Vector keep = slots[0];
        bool accepted = false;
        if (g.norm() > 0) {
          const Eigen::VectorXd cand = g.normalized();
          set_x(Vector(cand.data(), cand.data() + t.n));
          const double v = multilinear_objective(t, slots);
          if (v > value) {
            value = v;
            accepted = true;
          } else {
            set_x(keep);
          }
        }
        const Eigen::VectorXd tangent = g - x.dot(g) * x;
        if (!accepted && tangent.norm() > 0) {
          const Eigen::VectorXd dir = tangent.normalized();
          for (double step = 1.0; step > 1e-10; step *= 0.5) {
            const Eigen::VectorXd cand = (x + step * dir).normalized();
            set_x(Vector(cand.data(), cand.data() + t.n));
            const double v = multilinear_objective(t, slots);
            if (v > value) {
              value = v;
              accepted = true;
              break;
            }
          }
          if (!accepted) set_x(keep);
        }
      }

      for (int s = repeated; s < d; ++s) {
        const Eigen::MatrixXd B = contract_all_but(t, s, as_spans(slots));
        const Vector keep = slots[static_cast<std::size_t>(s)];
        slots[static_cast<std::size_t>(s)] = top_right_singular(B, keep);
        const double v = multilinear_objective(t, slots);
        // Exact argmax up to roundoff; keep the old vector on a roundoff loss.
        if (v >= value) value = v; else slots[static_cast<std::size_t>(s)] = keep;
      }
      converged = relative_change(before, value) < options.tol || value == 0.0;
    }

    best.sweeps += sweep;
    if (value > best.value) {
      best.value = value;
      best.arg = slots;
      best.converged = converged;
    }
  }
  return best;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

std::vector<OpnormScalingRow> opnorm_scaling(const OpnormScalingConfig& cfg) {
  if (!std::is_sorted(cfg.n_list.begin(), cfg.n_list.end()))
    throw ArgumentError("opnorm_scaling: n_list must be ascending");
  if (cfg.trials < 1) throw ArgumentError("opnorm_scaling: trials must be >= 1");
  cfg.dist.validate();
  std::vector<OpnormScalingRow> rows;
  for (int n : cfg.n_list) {
    const SystemShape shape = SystemShape::make(n, cfg.d);
    int k = n;
    if (cfg.restrict_fraction) {
      k = static_cast<int>(std::ceil(*cfg.restrict_fraction * n));
      k = std::clamp(k, 1, n);
    }
    const std::size_t per_form = SystemShape{k, cfg.d}.per_form();
    OpnormScalingRow row{n, cfg.d, k, std::vector<double>(static_cast<std::size_t>(cfg.trials)), 0, 0};
    parallel_for(static_cast<std::size_t>(cfg.trials), cfg.threads, [&](std::size_t trial) {
      const CounterStream entries =
          CounterStream(cfg.seeds, trial, purpose::kRandomPart).substream(static_cast<std::uint64_t>(n));
      std::vector<double> data(static_cast<std::size_t>(shape.m()) * per_form);
      for (std::size_t e = 0; e < data.size(); ++e) data[e] = cfg.dist.draw(entries, e);
      const TensorView view{shape.m(), k, cfg.d, data};
      const CounterStream restarts =
          CounterStream(cfg.seeds, trial, purpose::kRestarts).substream(static_cast<std::uint64_t>(n));
      row.values[trial] = opnorm(view, cfg.options, restarts).value;
    });
    row.median = median(row.values);
    row.median_over_n = row.median / n;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace polycond
