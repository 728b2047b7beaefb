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

#ifndef POLYCOND_SYSTEM_HPP
#define POLYCOND_SYSTEM_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace polycond {

using Vector = std::vector<double>;

inline constexpr std::size_t kDefaultEntryCap = 100'000'000;

/// n variables, n - 1 homogeneous forms of degree d.
struct SystemShape {
  int n = 2;
  int d = 1;

  /// Throws ShapeError unless n >= 2 and d >= 1.
  static SystemShape make(int n, int d);

  int m() const { return n - 1; }
  /// n^d, saturating at SIZE_MAX.
  std::size_t per_form() const;
  std::size_t entries() const;
  /// Throws AllocationCapError when entries() > cap.
  void check_cap(std::size_t cap = kDefaultEntryCap) const;

  friend bool operator==(const SystemShape&, const SystemShape&) = default;
};

/// Non-owning row-major view of m forms of n^d entries each. Used where the
/// form count is not tied to n (rectangular opnorm experiments).
struct TensorView {
  int m = 0;
  int n = 0;
  int d = 0;
  std::span<const double> data;
};

/// Dense unsymmetrized coefficient array a(l, i1, ..., id), row-major with the
/// last index fastest.
class CoefficientTensor {
 public:
  /// Validates length m * n^d and finiteness.
  CoefficientTensor(SystemShape shape, std::vector<double> data);
  static CoefficientTensor zeros(SystemShape shape, std::size_t cap = kDefaultEntryCap);

  const SystemShape& shape() const { return shape_; }
  std::span<const double> data() const { return data_; }
  std::span<const double> form(int l) const;
  double at(int l, std::span<const int> index) const;
  TensorView view() const { return {shape_.m(), shape_.n, shape_.d, data_}; }

  friend bool operator==(const CoefficientTensor&, const CoefficientTensor&) = default;

 private:
  SystemShape shape_;
  std::vector<double> data_;
};

CoefficientTensor operator+(const CoefficientTensor& a, const CoefficientTensor& b);
CoefficientTensor scaled(const CoefficientTensor& t, double factor);

/// f = f_det + f_rand. The combined tensor is formed once at construction.
class PolynomialSystem {
 public:
  explicit PolynomialSystem(CoefficientTensor rand, std::optional<CoefficientTensor> det = {});

  const SystemShape& shape() const { return combined_.shape(); }
  const CoefficientTensor& rand() const { return rand_; }
  const std::optional<CoefficientTensor>& det() const { return det_; }
  const CoefficientTensor& combined() const { return combined_; }

 private:
  CoefficientTensor rand_;
  std::optional<CoefficientTensor> det_;
  CoefficientTensor combined_;
};

// ---------------------------------------------------------------------------
// Contraction kernels on views.

/// Contracts slot `slot` of a (m, n^k) buffer with v; returns (m, n^(k-1)).
Vector contract_slot(std::span<const double> buf, int m, int n, int k, int slot,
                     std::span<const double> v);

/// sum over indices of t(l, i1..id) * v1[i1] ... vd[id], one vector per slot.
Vector contract_all(const TensorView& t, std::span<const std::span<const double>> slots);

/// Same as contract_all but leaves slot `free_slot` open; returns the m x n
/// partial contraction.
Eigen::MatrixXd contract_all_but(const TensorView& t, int free_slot,
                                 std::span<const std::span<const double>> slots);

// ---------------------------------------------------------------------------
// Evaluation.

Vector evaluate(const PolynomialSystem& sys, std::span<const double> x);
Vector evaluate(const CoefficientTensor& t, std::span<const double> x);

/// k-th derivative of every form at x applied to dirs (k = dirs.size() <= d),
/// summed over all ordered placements of the directions into distinct slots.
Vector derivative_contract(const PolynomialSystem& sys, std::span<const double> x,
                           std::span<const Vector> dirs);
Vector derivative_contract(const CoefficientTensor& t, std::span<const double> x,
                           std::span<const Vector> dirs);

/// m x n matrix of partial derivatives at x.
Eigen::MatrixXd jacobian(const CoefficientTensor& t, std::span<const double> x);
/// Per-form n x n Hessians at x.
std::vector<Eigen::MatrixXd> hessians(const CoefficientTensor& t, std::span<const double> x);

/// Orthonormal basis of the tangent space x^perp.
struct TangentFrame {
  Vector x;
  Eigen::MatrixXd basis;  // n x (n - 1)

  /// Requires |‖x‖ - 1| <= 1e-10; x is renormalized.
  static TangentFrame at(std::span<const double> x);
  /// Frame with a caller-supplied basis; checks the orthonormality invariants.
  static TangentFrame with_basis(std::span<const double> x, Eigen::MatrixXd basis);
};

struct TangentJacobian {
  Eigen::MatrixXd J;   // m x n
  Eigen::MatrixXd Jt;  // m x (n - 1)
  double sigma_min = 0.0;
};

TangentJacobian jacobian_tangent(const PolynomialSystem& sys, const TangentFrame& frame);

CoefficientTensor symmetrize(const CoefficientTensor& t);

// ---------------------------------------------------------------------------
// Monomial view and Weyl norm.

/// Coefficients c_alpha of x^alpha per form. Monomials are nondecreasing index
/// tuples of length d, enumerated in lexicographic order.
class MonomialForm {
 public:
  static MonomialForm from_tensor(const CoefficientTensor& t);

  const SystemShape& shape() const { return shape_; }
  const std::vector<std::vector<int>>& monomials() const { return monomials_; }
  double coeff(int l, std::size_t monomial) const {
    return coeffs_[static_cast<std::size_t>(l) * monomials_.size() + monomial];
  }
  /// Index of a sorted tuple, or npos.
  std::size_t find(std::span<const int> sorted_tuple) const;
  Vector evaluate(std::span<const double> x) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  SystemShape shape_;
  std::vector<std::vector<int>> monomials_;
  std::vector<double> coeffs_;
};

/// All nondecreasing tuples of length d over {0..n-1}, lexicographic.
std::vector<std::vector<int>> sorted_tuples(int n, int d);
/// Monomial ordinal (into sorted_tuples(n, d)) of every within-form offset.
std::vector<std::size_t> monomial_of_offsets(int n, int d);
/// d! / prod(alpha_i!) for the exponent vector of a sorted tuple.
double multinomial(std::span<const int> sorted_tuple);

struct WeylNorm {
  Vector per_form;
  double total = 0.0;
};

WeylNorm weyl_norm(const PolynomialSystem& sys);
WeylNorm weyl_norm(const CoefficientTensor& t);

// ---------------------------------------------------------------------------

/// Symmetrized copy of a system for repeated evaluation of f, its Jacobian and
/// Hessian-vector products at O(m n^d) per point.
class SymmetricEvaluator {
 public:
  explicit SymmetricEvaluator(const CoefficientTensor& t);
  explicit SymmetricEvaluator(const PolynomialSystem& sys) : SymmetricEvaluator(sys.combined()) {}

  int m() const { return m_; }
  int n() const { return n_; }
  int d() const { return d_; }

  struct Local {
    Eigen::VectorXd f;  // m
    Eigen::MatrixXd J;  // m x n
    /// Row l is the Hessian of f_l applied to `dir`; zero when no dir given.
    Eigen::MatrixXd Hdir;  // m x n
  };

  Eigen::VectorXd value(const Eigen::VectorXd& x) const;
  Local local(const Eigen::VectorXd& x, const Eigen::VectorXd* dir = nullptr) const;

 private:
  int m_, n_, d_;
  std::vector<double> sym_;
};

}  // namespace polycond

#endif  // POLYCOND_SYSTEM_HPP
