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

#include <sstream>

#include "ensembles.hpp"
#include "errors.hpp"
#include "oracles.hpp"
#include "system.hpp"
#include "tensor_io.hpp"

using namespace polycond;

namespace {

CoefficientTensor gaussian_tensor(int n, int d, std::uint64_t seed = 1) {
  return sample_system(SystemShape::make(n, d), DistributionSpec::gaussian(), SeedPolicy{seed});
}

Vector to_std(const Eigen::VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

}  // namespace

TEST_CASE("shape validation and allocation cap") {
  CHECK_THROWS_AS(SystemShape::make(1, 2), ShapeError);
  CHECK_THROWS_AS(SystemShape::make(3, 0), ShapeError);
  const auto s = SystemShape::make(4, 3);
  CHECK(s.m() == 3);
  CHECK(s.entries() == 3u * 64u);
  CHECK_THROWS_AS(s.check_cap(100), AllocationCapError);
  CHECK_THROWS_AS(CoefficientTensor::zeros(SystemShape::make(100, 4), 1000), AllocationCapError);
  CHECK_THROWS_AS(CoefficientTensor(s, Vector(5, 0.0)), ShapeError);
  Vector bad(s.entries(), 0.0);
  bad[7] = std::nan("");
  CHECK_THROWS(CoefficientTensor(s, bad));
}

TEST_CASE("evaluate: zero, identity forms and naive oracle") {
  const auto zero = PolynomialSystem(CoefficientTensor::zeros(SystemShape::make(4, 3)));
  CHECK(oracle::max_abs(evaluate(zero, Vector{1, -2, 3, 0.5})) == 0.0);

  // a(l, i, j) = delta_ij, so f_l(x) = ||x||^2.
  const auto shape = SystemShape::make(3, 2);
  Vector data(shape.entries(), 0.0);
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < 3; ++i) data[static_cast<std::size_t>(l * 9 + i * 3 + i)] = 1.0;
  const auto f = evaluate(PolynomialSystem(CoefficientTensor(shape, data)), Vector{1, 2, 2});
  CHECK(f[0] == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(f[1] == doctest::Approx(9.0).epsilon(1e-15));

  const auto t = gaussian_tensor(4, 3, 7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = oracle::gaussian_vec(4);
    const auto ref = oracle::naive_eval(Vector(t.data().begin(), t.data().end()), 3, 4, 3, x);
    CHECK(oracle::rel_err(evaluate(t, x), ref) < 1e-12);
  }
  CHECK_THROWS_AS(evaluate(t, Vector{1, 2, 3}), ShapeError);
}

TEST_CASE("homogeneity of evaluation") {
  const auto t = gaussian_tensor(5, 3, 3);
  const auto x = oracle::gaussian_vec(5);
  Vector cx = x;
  for (auto& e : cx) e *= -1.7;
  auto fx = evaluate(t, x);
  for (auto& e : fx) e *= std::pow(-1.7, 3);
  CHECK(oracle::rel_err(evaluate(t, cx), fx) < 1e-12);
}

TEST_CASE("derivative_contract: finite differences, Euler chain, multilinearity, symmetry") {
  const auto t = gaussian_tensor(4, 3, 11);
  const PolynomialSystem sys(t);
  const auto eval = [&](const Vector& z) { return evaluate(sys, z); };

  for (int trial = 0; trial < 5; ++trial) {
    const auto x = oracle::gaussian_vec(4);
    const auto y = oracle::unit_vec(4);
    const auto fd = oracle::central_difference(eval, x, y, 1e-5);
    CHECK(oracle::rel_err(derivative_contract(sys, x, std::vector<Vector>{y}), fd) < 1e-5);

    // Second derivative along (y, z) against a difference of first derivatives.
    const auto z = oracle::unit_vec(4);
    const auto grad_y = [&](const Vector& p) { return derivative_contract(sys, p, std::vector<Vector>{y}); };
    const auto fd2 = oracle::central_difference(grad_y, x, z, 1e-5);
    CHECK(oracle::rel_err(derivative_contract(sys, x, std::vector<Vector>{y, z}), fd2) < 1e-5);
    CHECK(oracle::rel_err(derivative_contract(sys, x, std::vector<Vector>{y, z}),
                          derivative_contract(sys, x, std::vector<Vector>{z, y})) < 1e-12);
  }

  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 4;
    const auto s = gaussian_tensor(2 + trial % 6, d, 100 + trial);
    const int n = s.shape().n;
    auto x = oracle::gaussian_vec(static_cast<std::size_t>(n));
    const double nx = oracle::norm(x);
    for (auto& e : x) e *= 1.5 / nx;
    const auto f = evaluate(s, x);
    for (int k = 0; k <= d; ++k) {
      const std::vector<Vector> dirs(static_cast<std::size_t>(k), x);
      auto expect = f;
      const double c = oracle::factorial(d) / oracle::factorial(d - k);
      for (auto& e : expect) e *= c;
      CHECK(oracle::rel_err(derivative_contract(s, x, dirs), expect) < 1e-10);
    }
    CHECK_THROWS_AS(derivative_contract(s, x, std::vector<Vector>(static_cast<std::size_t>(d + 1), x)),
                    ArgumentError);
  }

  // Linear in each direction.
  const auto x = oracle::gaussian_vec(4);
  const auto a = oracle::gaussian_vec(4), b = oracle::gaussian_vec(4), w = oracle::gaussian_vec(4);
  Vector comb(4);
  for (int i = 0; i < 4; ++i) comb[static_cast<std::size_t>(i)] = 2.0 * a[static_cast<std::size_t>(i)] - 0.5 * b[static_cast<std::size_t>(i)];
  const auto lhs = derivative_contract(t, x, std::vector<Vector>{w, comb});
  const auto da = derivative_contract(t, x, std::vector<Vector>{w, a});
  const auto db = derivative_contract(t, x, std::vector<Vector>{w, b});
  Vector rhs(da.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = 2.0 * da[i] - 0.5 * db[i];
  CHECK(oracle::rel_err(lhs, rhs) < 1e-10);
}

TEST_CASE("jacobian_tangent: zero, linear, columns and frame independence") {
  const auto x = oracle::unit_vec(5);
  const PolynomialSystem zero(CoefficientTensor::zeros(SystemShape::make(5, 2)));
  const auto jz = jacobian_tangent(zero, TangentFrame::at(x));
  CHECK(jz.J.norm() == 0.0);
  CHECK(jz.sigma_min == 0.0);

  const auto lin = gaussian_tensor(5, 1, 4);
  const auto jl = jacobian_tangent(PolynomialSystem(lin), TangentFrame::at(x));
  const auto A = oracle::to_matrix(Vector(lin.data().begin(), lin.data().end()), 4, 5);
  CHECK((jl.J - A).norm() < 1e-13);

  const PolynomialSystem sys(gaussian_tensor(5, 2, 9));
  const auto frame = TangentFrame::at(x);
  const auto jt = jacobian_tangent(sys, frame);
  for (int j = 0; j < 5; ++j) {
    Vector e(5, 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    const auto col = derivative_contract(sys, x, std::vector<Vector>{e});
    for (int l = 0; l < 4; ++l) CHECK(std::abs(jt.J(l, j) - col[static_cast<std::size_t>(l)]) < 1e-12);
  }

  // Frame invariants.
  const Eigen::Map<const Eigen::VectorXd> xv(frame.x.data(), 5);
  CHECK((frame.basis.transpose() * frame.basis - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-10);
  CHECK((frame.basis.transpose() * xv).norm() < 1e-10);

  // sigma_min does not depend on the choice of tangent basis.
  const Eigen::MatrixXd G = Eigen::MatrixXd::NullaryExpr(4, 4, [] { return oracle::gaussian_vec(1)[0]; });
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
  const auto rotated = jacobian_tangent(sys, TangentFrame::with_basis(x, frame.basis * Q));
  CHECK(std::abs(rotated.sigma_min - jt.sigma_min) < 1e-9);
  // Oracle: smallest singular value of J restricted to the basis.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jt.J * frame.basis);
  CHECK(std::abs(svd.singularValues().minCoeff() - jt.sigma_min) < 1e-12);

  // Near a coordinate axis the frame stays well conditioned.
  const auto axis = TangentFrame::at(Vector{1, 0, 0, 0, 0});
  CHECK((axis.basis.transpose() * axis.basis - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-12);
  CHECK_THROWS(TangentFrame::at(Vector{2, 0, 0, 0, 0}));
}

TEST_CASE("symmetrize") {
  const auto shape = SystemShape::make(2, 2);
  CoefficientTensor t(shape, Vector{0, 1, 0, 0});
  const auto s = symmetrize(t);
  CHECK(s.data()[1] == 0.5);
  CHECK(s.data()[2] == 0.5);
  CHECK(symmetrize(s) == s);

  const auto r = gaussian_tensor(4, 3, 21);
  const auto rs = symmetrize(r);
  for (int k = 0; k < 10; ++k) {
    const auto x = oracle::gaussian_vec(4);
    CHECK(oracle::rel_err(evaluate(rs, x), evaluate(r, x)) < 1e-12);
  }
}

TEST_CASE("monomial form and Weyl norm") {
  const auto r = gaussian_tensor(4, 3, 5);
  const auto mf = MonomialForm::from_tensor(r);
  CHECK(mf.monomials().size() == 20u);  // binom(6, 3)
  for (int k = 0; k < 5; ++k) {
    const auto x = oracle::gaussian_vec(4);
    CHECK(oracle::rel_err(mf.evaluate(x), evaluate(r, x)) < 1e-12);
  }
  const std::vector<int> key{0, 1, 1};
  const auto idx = mf.find(key);
  REQUIRE(idx != MonomialForm::npos);
  // c_alpha collects the three orderings (0,1,1), (1,0,1), (1,1,0) of form 0.
  const double expect = r.data()[0 * 16 + 1 * 4 + 1] + r.data()[1 * 16 + 0 * 4 + 1] + r.data()[1 * 16 + 1 * 4 + 0];
  CHECK(mf.coeff(0, idx) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(multinomial(key) == 3.0);

  CHECK(weyl_norm(CoefficientTensor::zeros(SystemShape::make(3, 2))).total == 0.0);

  // n = 2, d = 2, one form: a11 = 1, a12 = a21 = 1. Then c_(1,1) = 2 with
  // weight binom 2, so ||f||_W^2 = 1 + 4 / 2 = 3.
  const auto w = weyl_norm(CoefficientTensor(SystemShape::make(2, 2), Vector{1, 1, 1, 0}));
  CHECK(w.per_form[0] * w.per_form[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(w.total == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("symmetric evaluator matches the direct kernels") {
  const auto t = gaussian_tensor(5, 3, 17);
  const SymmetricEvaluator ev(t);
  const auto x = oracle::gaussian_vec(5);
  const auto dir = oracle::gaussian_vec(5);
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), 5), dv(dir.data(), 5);
  const Eigen::VectorXd dcopy = dv;
  const auto loc = ev.local(xv, &dcopy);
  CHECK(oracle::rel_err(to_std(loc.f), evaluate(t, x)) < 1e-12);
  CHECK((loc.J - jacobian(t, x)).norm() <= 1e-12 * jacobian(t, x).norm());
  const auto hs = hessians(t, x);
  for (int l = 0; l < 4; ++l) CHECK((loc.Hdir.row(l).transpose() - hs[static_cast<std::size_t>(l)] * dv).norm() < 1e-10);
}

TEST_CASE("tensor file round trip") {
  const auto t = gaussian_tensor(4, 3, 2);
  for (auto fmt : {TensorFormat::Binary, TensorFormat::Json}) {
    std::stringstream buf;
    write_tensor(buf, t, fmt);
    CHECK(read_tensor(buf) == t);
  }
  std::stringstream header;
  write_tensor(header, t, TensorFormat::Binary);
  std::string line;
  std::getline(header, line);
  CHECK(line.find("\"layout\":\"row-major\"") != std::string::npos);
  CHECK(line.find("\"dtype\":\"f64\"") != std::string::npos);

  std::stringstream truncated(line + "\n" + std::string(16, '\0'));
  CHECK_THROWS_AS(read_tensor(truncated), IoError);
  std::stringstream garbage("not a header\n");
  CHECK_THROWS_AS(read_tensor(garbage), IoError);
  CHECK_THROWS_AS(load_tensor("/nonexistent/dir/file.bin"), IoError);
}
