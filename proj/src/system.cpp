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

#include "system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace polycond {
namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::size_t>::max() / base)
      return std::numeric_limits<std::size_t>::max();
    r *= base;
  }
  return r;
}

void require_length(std::span<const double> v, int n, const char* what) {
  if (v.size() != static_cast<std::size_t>(n))
    throw ShapeError(std::string(what) + ": expected length " + std::to_string(n) + ", got " +
                     std::to_string(v.size()));
}

// Sorted index tuple of the flat within-form offset p.
std::vector<int> sorted_digits(std::size_t p, int n, int d) {
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (int s = d - 1; s >= 0; --s) {
    idx[static_cast<std::size_t>(s)] = static_cast<int>(p % static_cast<std::size_t>(n));
    p /= static_cast<std::size_t>(n);
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

SystemShape SystemShape::make(int n, int d) {
  if (n < 2) throw ShapeError("shape: n must be >= 2, got " + std::to_string(n));
  if (d < 1) throw ShapeError("shape: d must be >= 1, got " + std::to_string(d));
  return SystemShape{n, d};
}

std::size_t SystemShape::per_form() const { return ipow(static_cast<std::size_t>(n), d); }

std::size_t SystemShape::entries() const {
  const std::size_t pf = per_form();
  const auto forms = static_cast<std::size_t>(m());
  if (pf > std::numeric_limits<std::size_t>::max() / forms)
    return std::numeric_limits<std::size_t>::max();
  return pf * forms;
}

void SystemShape::check_cap(std::size_t cap) const {
  if (entries() > cap)
    throw AllocationCapError("tensor with n=" + std::to_string(n) + ", d=" + std::to_string(d) +
                             " exceeds the entry cap of " + std::to_string(cap));
}

CoefficientTensor::CoefficientTensor(SystemShape shape, std::vector<double> data)
    : shape_(SystemShape::make(shape.n, shape.d)), data_(std::move(data)) {
  if (data_.size() != shape_.entries())
    throw ShapeError("coefficient tensor: expected " + std::to_string(shape_.entries()) +
                     " entries, got " + std::to_string(data_.size()));
  for (double v : data_)
    if (!std::isfinite(v)) throw ArgumentError("coefficient tensor: non-finite entry");
}

CoefficientTensor CoefficientTensor::zeros(SystemShape shape, std::size_t cap) {
  shape.check_cap(cap);
  return CoefficientTensor(shape, std::vector<double>(shape.entries(), 0.0));
}

std::span<const double> CoefficientTensor::form(int l) const {
  if (l < 0 || l >= shape_.m()) throw ShapeError("form index out of range");
  const std::size_t pf = shape_.per_form();
  return std::span<const double>(data_).subspan(static_cast<std::size_t>(l) * pf, pf);
}

double CoefficientTensor::at(int l, std::span<const int> index) const {
  if (index.size() != static_cast<std::size_t>(shape_.d)) throw ShapeError("index arity mismatch");
  std::size_t p = 0;
  for (int i : index) {
    if (i < 0 || i >= shape_.n) throw ShapeError("index out of range");
    p = p * static_cast<std::size_t>(shape_.n) + static_cast<std::size_t>(i);
  }
  return form(l)[p];
}

CoefficientTensor operator+(const CoefficientTensor& a, const CoefficientTensor& b) {
  if (!(a.shape() == b.shape())) throw ShapeError("tensor sum: shape mismatch");
  std::vector<double> out(a.data().begin(), a.data().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.data()[i];
  return CoefficientTensor(a.shape(), std::move(out));
}

CoefficientTensor scaled(const CoefficientTensor& t, double factor) {
  std::vector<double> out(t.data().begin(), t.data().end());
  for (auto& v : out) v *= factor;
  return CoefficientTensor(t.shape(), std::move(out));
}

PolynomialSystem::PolynomialSystem(CoefficientTensor rand, std::optional<CoefficientTensor> det)
    : rand_(std::move(rand)),
      det_(std::move(det)),
      combined_(det_ ? *det_ + rand_ : rand_) {}

// ---------------------------------------------------------------------------

Vector contract_slot(std::span<const double> buf, int m, int n, int k, int slot,
                     std::span<const double> v) {
  const auto nn = static_cast<std::size_t>(n);
  const std::size_t outer = ipow(nn, slot);
  const std::size_t inner = ipow(nn, k - slot - 1);
  Vector out(static_cast<std::size_t>(m) * outer * inner, 0.0);
  std::size_t src = 0;
  for (int l = 0; l < m; ++l) {
    for (std::size_t o = 0; o < outer; ++o) {
      double* dst = out.data() + (static_cast<std::size_t>(l) * outer + o) * inner;
      for (std::size_t i = 0; i < nn; ++i) {
        const double w = v[i];
        for (std::size_t r = 0; r < inner; ++r) dst[r] += w * buf[src++];
      }
    }
  }
  return out;
}

Vector contract_all(const TensorView& t, std::span<const std::span<const double>> slots) {
  if (slots.size() != static_cast<std::size_t>(t.d)) throw ShapeError("contract_all: slot count");
  if (t.d == 0) return Vector(t.data.begin(), t.data.end());
  Vector buf = contract_slot(t.data, t.m, t.n, t.d, t.d - 1, slots[static_cast<std::size_t>(t.d - 1)]);
  for (int s = t.d - 2; s >= 0; --s)
    buf = contract_slot(buf, t.m, t.n, s + 1, s, slots[static_cast<std::size_t>(s)]);
  return buf;
}

Eigen::MatrixXd contract_all_but(const TensorView& t, int free_slot,
                                 std::span<const std::span<const double>> slots) {
  if (free_slot < 0 || free_slot >= t.d) throw ShapeError("contract_all_but: bad free slot");
  Vector buf(t.data.begin(), t.data.end());
  int k = t.d;
  for (int s = t.d - 1; s > free_slot; --s, --k)
    buf = contract_slot(buf, t.m, t.n, k, s, slots[static_cast<std::size_t>(s)]);
  for (int s = 0; s < free_slot; ++s, --k)
    buf = contract_slot(buf, t.m, t.n, k, 0, slots[static_cast<std::size_t>(s)]);
  Eigen::MatrixXd out(t.m, t.n);
  for (int l = 0; l < t.m; ++l)
    for (int j = 0; j < t.n; ++j) out(l, j) = buf[static_cast<std::size_t>(l * t.n + j)];
  return out;
}

// ---------------------------------------------------------------------------

Vector evaluate(const CoefficientTensor& t, std::span<const double> x) {
  require_length(x, t.shape().n, "evaluate");
  std::vector<std::span<const double>> slots(static_cast<std::size_t>(t.shape().d), x);
  return contract_all(t.view(), slots);
}

Vector evaluate(const PolynomialSystem& sys, std::span<const double> x) {
  return evaluate(sys.combined(), x);
}

Vector derivative_contract(const CoefficientTensor& t, std::span<const double> x,
                           std::span<const Vector> dirs) {
  const int n = t.shape().n;
  const int d = t.shape().d;
  require_length(x, n, "derivative_contract");
  for (const auto& v : dirs) require_length(v, n, "derivative_contract direction");
  const int k = static_cast<int>(dirs.size());
  if (k > d)
    throw ArgumentError("derivative_contract: order " + std::to_string(k) + " exceeds degree " +
                        std::to_string(d));

  Vector total(static_cast<std::size_t>(t.shape().m()), 0.0);
  std::vector<std::span<const double>> slots(static_cast<std::size_t>(d), x);
  std::vector<bool> used(static_cast<std::size_t>(d), false);

  // Place direction j into every free slot, recursively.
  auto place = [&](auto&& self, int j) -> void {
    if (j == k) {
      const Vector term = contract_all(t.view(), slots);
      for (std::size_t l = 0; l < total.size(); ++l) total[l] += term[l];
      return;
    }
    for (int s = 0; s < d; ++s) {
      if (used[static_cast<std::size_t>(s)]) continue;
      used[static_cast<std::size_t>(s)] = true;
      slots[static_cast<std::size_t>(s)] = dirs[static_cast<std::size_t>(j)];
      self(self, j + 1);
      slots[static_cast<std::size_t>(s)] = x;
      used[static_cast<std::size_t>(s)] = false;
    }
  };
  place(place, 0);
  return total;
}

Vector derivative_contract(const PolynomialSystem& sys, std::span<const double> x,
                           std::span<const Vector> dirs) {
  return derivative_contract(sys.combined(), x, dirs);
}

Eigen::MatrixXd jacobian(const CoefficientTensor& t, std::span<const double> x) {
  require_length(x, t.shape().n, "jacobian");
  std::vector<std::span<const double>> slots(static_cast<std::size_t>(t.shape().d), x);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(t.shape().m(), t.shape().n);
  for (int s = 0; s < t.shape().d; ++s) J += contract_all_but(t.view(), s, slots);
  return J;
}

std::vector<Eigen::MatrixXd> hessians(const CoefficientTensor& t, std::span<const double> x) {
  require_length(x, t.shape().n, "hessians");
  const int m = t.shape().m(), n = t.shape().n, d = t.shape().d;
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(m), Eigen::MatrixXd::Zero(n, n));
  if (d < 2) return out;
  const CoefficientTensor sym = symmetrize(t);
  Vector buf(sym.data().begin(), sym.data().end());
  for (int k = d; k > 2; --k) buf = contract_slot(buf, m, n, k, k - 1, x);
  const double scale = static_cast<double>(d) * (d - 1);
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out[static_cast<std::size_t>(l)](i, j) =
            scale * buf[static_cast<std::size_t>((l * n + i) * n + j)];
  return out;
}

// ---------------------------------------------------------------------------

TangentFrame TangentFrame::at(std::span<const double> x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < 2) throw ShapeError("tangent frame: dimension must be >= 2");
  Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(x.data(), n);
  const double norm = u.norm();
  if (std::abs(norm - 1.0) > 1e-10) throw ContractViolation("tangent frame: x must be a unit vector");
  u /= norm;

  Eigen::Index pivot = 0;
  u.cwiseAbs().maxCoeff(&pivot);
  Eigen::MatrixXd basis(n, n - 1);
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == pivot) continue;
    Eigen::VectorXd v = Eigen::VectorXd::Unit(n, j);
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      v -= u.dot(v) * u;
      for (Eigen::Index c = 0; c < col; ++c) v -= basis.col(c).dot(v) * basis.col(c);
    }
    basis.col(col++) = v.normalized();
  }
  return TangentFrame{Vector(u.data(), u.data() + n), std::move(basis)};
}

TangentFrame TangentFrame::with_basis(std::span<const double> x, Eigen::MatrixXd basis) {
  TangentFrame frame = at(x);
  const auto n = static_cast<Eigen::Index>(x.size());
  if (basis.rows() != n || basis.cols() != n - 1) throw ShapeError("tangent frame: basis shape");
  const Eigen::Map<const Eigen::VectorXd> u(frame.x.data(), n);
  if ((basis.transpose() * basis - Eigen::MatrixXd::Identity(n - 1, n - 1)).cwiseAbs().maxCoeff() >
          1e-10 ||
      (basis.transpose() * u).cwiseAbs().maxCoeff() > 1e-10)
    throw ContractViolation("tangent frame: basis is not an orthonormal basis of x-perp");
  frame.basis = std::move(basis);
  return frame;
}

TangentJacobian jacobian_tangent(const PolynomialSystem& sys, const TangentFrame& frame) {
  TangentJacobian out;
  out.J = jacobian(sys.combined(), frame.x);
  out.Jt = out.J * frame.basis;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.Jt);
  out.sigma_min = svd.singularValues().size() ? svd.singularValues().minCoeff() : 0.0;
  return out;
}

CoefficientTensor symmetrize(const CoefficientTensor& t) {
  const MonomialForm mf = MonomialForm::from_tensor(t);
  const int n = t.shape().n, d = t.shape().d;
  const auto offset_mono = monomial_of_offsets(n, d);
  std::vector<double> weight(mf.monomials().size());
  for (std::size_t i = 0; i < weight.size(); ++i) weight[i] = multinomial(mf.monomials()[i]);
  const std::size_t pf = t.shape().per_form();
  std::vector<double> out(t.data().size());
  for (int l = 0; l < t.shape().m(); ++l)
    for (std::size_t p = 0; p < pf; ++p) {
      const std::size_t a = offset_mono[p];
      out[static_cast<std::size_t>(l) * pf + p] = mf.coeff(l, a) / weight[a];
    }
  return CoefficientTensor(t.shape(), std::move(out));
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> monomial_of_offsets(int n, int d) {
  const auto monomials = sorted_tuples(n, d);
  const std::size_t per_form = ipow(static_cast<std::size_t>(n), d);
  std::vector<std::size_t> out(per_form);
  for (std::size_t p = 0; p < per_form; ++p) {
    const auto key = sorted_digits(p, n, d);
    out[p] = static_cast<std::size_t>(
        std::lower_bound(monomials.begin(), monomials.end(), key) - monomials.begin());
  }
  return out;
}

std::vector<std::vector<int>> sorted_tuples(int n, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(d), 0);
  for (;;) {
    out.push_back(cur);
    int pos = d - 1;
    while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == n - 1) --pos;
    if (pos < 0) break;
    const int next = cur[static_cast<std::size_t>(pos)] + 1;
    for (int j = pos; j < d; ++j) cur[static_cast<std::size_t>(j)] = next;
  }
  return out;
}

double multinomial(std::span<const int> sorted_tuple) {
  double r = std::tgamma(static_cast<double>(sorted_tuple.size()) + 1.0);
  std::size_t i = 0;
  while (i < sorted_tuple.size()) {
    std::size_t j = i;
    while (j < sorted_tuple.size() && sorted_tuple[j] == sorted_tuple[i]) ++j;
    r /= std::tgamma(static_cast<double>(j - i) + 1.0);
    i = j;
  }
  return std::round(r);
}

MonomialForm MonomialForm::from_tensor(const CoefficientTensor& t) {
  MonomialForm mf;
  mf.shape_ = t.shape();
  const int n = t.shape().n, d = t.shape().d, m = t.shape().m();
  mf.monomials_ = sorted_tuples(n, d);
  const auto offset_mono = monomial_of_offsets(n, d);
  const std::size_t pf = t.shape().per_form();
  mf.coeffs_.assign(static_cast<std::size_t>(m) * mf.monomials_.size(), 0.0);
  for (int l = 0; l < m; ++l) {
    const auto f = t.form(l);
    double* dst = mf.coeffs_.data() + static_cast<std::size_t>(l) * mf.monomials_.size();
    for (std::size_t p = 0; p < pf; ++p) dst[offset_mono[p]] += f[p];
  }
  return mf;
}

std::size_t MonomialForm::find(std::span<const int> sorted_tuple) const {
  const std::vector<int> key(sorted_tuple.begin(), sorted_tuple.end());
  const auto it = std::lower_bound(monomials_.begin(), monomials_.end(), key);
  if (it == monomials_.end() || *it != key) return npos;
  return static_cast<std::size_t>(it - monomials_.begin());
}

Vector MonomialForm::evaluate(std::span<const double> x) const {
  require_length(x, shape_.n, "monomial evaluate");
  Vector out(static_cast<std::size_t>(shape_.m()), 0.0);
  for (std::size_t a = 0; a < monomials_.size(); ++a) {
    double xa = 1.0;
    for (int i : monomials_[a]) xa *= x[static_cast<std::size_t>(i)];
    for (int l = 0; l < shape_.m(); ++l) out[static_cast<std::size_t>(l)] += coeff(l, a) * xa;
  }
  return out;
}

WeylNorm weyl_norm(const CoefficientTensor& t) {
  const MonomialForm mf = MonomialForm::from_tensor(t);
  WeylNorm w;
  w.per_form.assign(static_cast<std::size_t>(t.shape().m()), 0.0);
  double total_sq = 0.0;
  for (int l = 0; l < t.shape().m(); ++l) {
    double sq = 0.0;
    for (std::size_t a = 0; a < mf.monomials().size(); ++a) {
      const double c = mf.coeff(l, a);
      sq += c * c / multinomial(mf.monomials()[a]);
    }
    w.per_form[static_cast<std::size_t>(l)] = std::sqrt(sq);
    total_sq += sq;
  }
  w.total = std::sqrt(total_sq);
  return w;
}

WeylNorm weyl_norm(const PolynomialSystem& sys) { return weyl_norm(sys.combined()); }

// ---------------------------------------------------------------------------

SymmetricEvaluator::SymmetricEvaluator(const CoefficientTensor& t)
    : m_(t.shape().m()), n_(t.shape().n), d_(t.shape().d) {
  const CoefficientTensor s = symmetrize(t);
  sym_.assign(s.data().begin(), s.data().end());
}

Eigen::VectorXd SymmetricEvaluator::value(const Eigen::VectorXd& x) const {
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(n_));
  Vector buf = contract_slot(sym_, m_, n_, d_, d_ - 1, xs);
  for (int k = d_ - 1; k >= 1; --k) buf = contract_slot(buf, m_, n_, k, k - 1, xs);
  return Eigen::Map<Eigen::VectorXd>(buf.data(), m_);
}

SymmetricEvaluator::Local SymmetricEvaluator::local(const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd* dir) const {
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(n_));
  Local out;
  out.Hdir = Eigen::MatrixXd::Zero(m_, n_);
  Vector t1;
  if (d_ == 1) {
    t1 = sym_;
  } else {
    Vector t2 = sym_;
    for (int k = d_; k > 2; --k) t2 = contract_slot(t2, m_, n_, k, k - 1, xs);
    if (dir) {
      const double scale = static_cast<double>(d_) * (d_ - 1);
      for (int l = 0; l < m_; ++l)
        for (int i = 0; i < n_; ++i) {
          double acc = 0.0;
          const double* row = t2.data() + (static_cast<std::size_t>(l) * n_ + i) * n_;
          for (int j = 0; j < n_; ++j) acc += row[j] * (*dir)(j);
          out.Hdir(l, i) = scale * acc;
        }
    }
    t1 = contract_slot(t2, m_, n_, 2, 1, xs);
  }
  out.J.resize(m_, n_);
  out.f.resize(m_);
  for (int l = 0; l < m_; ++l) {
    double acc = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double v = t1[static_cast<std::size_t>(l * n_ + i)];
      out.J(l, i) = d_ * v;
      acc += v * x(i);
    }
    out.f(l) = acc;
  }
  return out;
}

}  // namespace polycond
