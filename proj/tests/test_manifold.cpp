#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rdpg/errors.hpp"
#include "rdpg/manifold.hpp"
#include "rdpg/numerics.hpp"
#include "test_utils.hpp"

#include <cmath>

using namespace rdpg;
using namespace rdpg::testing;

namespace {

// Basis of the symmetric hollow d x d matrices.
std::vector<Matrix> hollow_symmetric_basis(Index d) {
  std::vector<Matrix> basis;
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      Matrix b = Matrix::Zero(d, d);
      b(i, j) = 1.0;
      b(j, i) = 1.0;
      basis.push_back(std::move(b));
    }
  }
  return basis;
}

// Independent oracle for the normal projection: least squares over the span
// of {X B : B symmetric hollow}.
Matrix normal_projection_ls_oracle(const Matrix& x, const Matrix& z) {
  const auto basis = hollow_symmetric_basis(x.cols());
  const auto k = static_cast<Index>(basis.size());
  Matrix gram(k, k);
  Vector rhs(k);
  for (Index a = 0; a < k; ++a) {
    const Matrix xa = x * basis[static_cast<size_t>(a)];
    rhs[a] = (xa.array() * z.array()).sum();
    for (Index b = 0; b < k; ++b) {
      const Matrix xb = x * basis[static_cast<size_t>(b)];
      gram(a, b) = (xa.array() * xb.array()).sum();
    }
  }
  const Vector coef = gram.ldlt().solve(rhs);
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (Index a = 0; a < k; ++a) out += coef[a] * x * basis[static_cast<size_t>(a)];
  return out;
}

double tangent_residual(const Matrix& x, const Matrix& zeta) {
  Matrix c = zeta.transpose() * x + x.transpose() * zeta;
  c.diagonal().setZero();
  return c.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("is_on_manifold accepts identity blocks and rejects degenerate input") {
  Matrix x = Matrix::Identity(5, 3);
  CHECK(is_on_manifold(x));

  Matrix equal_cols = Matrix::Zero(5, 2);
  equal_cols.col(0) << 1, 1, 0, 0, 0;
  equal_cols.col(1) = equal_cols.col(0);
  CHECK_FALSE(is_on_manifold(equal_cols));

  Matrix zero_col = Matrix::Identity(5, 2);
  zero_col.col(1).setZero();
  CHECK_FALSE(is_on_manifold(zero_col));
}

TEST_CASE("project_normal matches the hand-evaluated formula") {
  Matrix x = Matrix::Zero(3, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 1.0;
  Matrix z = Matrix::Zero(3, 2);
  z(0, 0) = 1.0;
  z(0, 1) = 2.0;
  z(1, 0) = 3.0;
  z(1, 1) = 4.0;
  const Matrix n = project_normal(x, z);
  Matrix expected = Matrix::Zero(3, 2);
  expected(0, 1) = 2.5;
  expected(1, 0) = 2.5;
  CHECK((n - expected).norm() < 1e-14);
}

TEST_CASE("project_normal agrees with the least-squares oracle") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Matrix x = random_manifold_matrix(8, 3, 10 + seed);
    const Matrix z = random_matrix(8, 3, 60 + seed);
    const Matrix fast = project_normal(x, z);
    const Matrix slow = normal_projection_ls_oracle(x, z);
    CHECK((fast - slow).norm() <= 1e-9 * std::max(1.0, slow.norm()));
  }
}

TEST_CASE("projections decompose, annihilate and idempote") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Matrix x = random_manifold_matrix(9, 3, 100 + seed);
    const Matrix z = random_matrix(9, 3, 200 + seed);
    const Matrix zn = project_normal(x, z);
    const Matrix zt = project_tangent(x, z);
    const double scale = std::max(1.0, z.norm());

    CHECK((zn + zt - z).norm() <= 1e-10 * scale);                  // decomposition
    CHECK(std::abs((zn.array() * zt.array()).sum()) <= 1e-9 * z.squaredNorm());
    CHECK((project_normal(x, zn) - zn).norm() <= 1e-10 * scale);   // idempotent
    CHECK((project_tangent(x, zt) - zt).norm() <= 1e-10 * scale);
    CHECK(project_normal(x, zt).norm() <= 1e-10 * scale);          // mutual kill
    CHECK(project_tangent(x, zn).norm() <= 1e-10 * scale);
    CHECK(tangent_residual(x, zt) <= 1e-9 * x.norm() * (1.0 + zt.norm()));
  }
}

TEST_CASE("tangent vectors are fixed and normal vectors vanish") {
  const Matrix x = random_manifold_matrix(7, 3, 301);
  // Normal direction: X Lambda with Lambda symmetric hollow.
  Matrix lambda = Matrix::Zero(3, 3);
  lambda(0, 1) = lambda(1, 0) = 0.8;
  lambda(1, 2) = lambda(2, 1) = -0.3;
  const Matrix zn = x * lambda;
  CHECK(project_tangent(x, zn).norm() <= 1e-10 * zn.norm());
  CHECK((project_normal(x, zn) - zn).norm() <= 1e-10 * zn.norm());

  const Matrix zt = project_tangent(x, random_matrix(7, 3, 302));
  CHECK((project_tangent(x, zt) - zt).norm() <= 1e-10 * std::max(1.0, zt.norm()));
}

TEST_CASE("project_normal output has the X Lambda structure") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Matrix x = random_manifold_matrix(8, 3, 400 + seed);
    const Matrix zn = project_normal(x, random_matrix(8, 3, 500 + seed));
    // Recover Lambda through the diagonal Gram system and check its shape.
    const Vector g = x.colwise().squaredNorm();
    const Matrix lambda = g.cwiseInverse().asDiagonal() * (x.transpose() * zn);
    CHECK((x * lambda - zn).norm() <= 1e-9 * std::max(1.0, zn.norm()));
    CHECK((lambda - lambda.transpose()).cwiseAbs().maxCoeff() <=
          1e-9 * std::max(1.0, lambda.norm()));
    CHECK(lambda.diagonal().cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, lambda.norm()));
  }
}

TEST_CASE("project_normal rejects rank-degenerate base points") {
  Matrix x = Matrix::Identity(4, 2);
  x.col(1).setZero();
  CHECK_THROWS_AS(project_normal(x, Matrix::Ones(4, 2)), ManifoldError);
}

TEST_CASE("retract at zero is the identity") {
  const Matrix x = random_manifold_matrix(6, 3, 601);
  const Matrix r = retract(x, Matrix::Zero(6, 3));
  CHECK((r - x).norm() <= 1e-12 * x.norm());
}

TEST_CASE("retraction lands on the manifold") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Matrix x = random_manifold_matrix(8, 3, 700 + seed);
    const Matrix zeta = project_tangent(x, random_matrix(8, 3, 800 + seed));
    const Matrix r = retract(x, zeta);
    CHECK(is_on_manifold(r, 1e-9));
  }
}

TEST_CASE("retraction agrees with the step to first order") {
  const Matrix x = random_manifold_matrix(6, 2, 901);
  Matrix zeta = project_tangent(x, random_matrix(6, 2, 902));
  zeta /= zeta.norm();
  double prev_gap = -1.0;
  for (double t = 1e-2; t >= 1e-5; t *= 0.5) {
    const double gap = (retract(x, t * zeta) - (x + t * zeta)).norm();
    if (prev_gap > 0.0) {
      const double ratio = prev_gap / gap;
      CHECK(ratio > 3.5);
      CHECK(ratio < 4.5);
    }
    prev_gap = gap;
  }
}

TEST_CASE("retraction reports rank loss") {
  const Matrix x = Matrix::Identity(4, 2);
  Matrix zeta = Matrix::Zero(4, 2);
  zeta.col(1) = -x.col(1);  // step exactly kills the second column
  CHECK_THROWS_AS(retract(x, zeta), RetractionError);
}

TEST_CASE("riemannian_grad matches directional finite differences") {
  const Matrix x = random_manifold_matrix(7, 3, 1001);
  // Smooth test function f(X) = ||X - C||_F^2 with a fixed target.
  const Matrix c = random_matrix(7, 3, 1002);
  auto f = [&](const Matrix& m) { return (m - c).squaredNorm(); };
  const Matrix euclid = 2.0 * (x - c);
  const Matrix g = riemannian_grad(x, euclid);
  CHECK((g - project_tangent(x, euclid)).norm() == 0.0);
  CHECK(riemannian_grad(x, Matrix::Zero(7, 3)).norm() == 0.0);
  CHECK(riemannian_grad(x, project_normal(x, random_matrix(7, 3, 1003))).norm() <=
        1e-9);

  // d/dt f(R_X(t g)) at t=0 equals <euclid, g>.
  const double h = 1e-6;
  const double fd =
      (f(retract(x, h * g)) - f(retract(x, -h * g))) / (2.0 * h);
  const double expected = (euclid.array() * g.array()).sum();
  CHECK(fd == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("tangent space has the predicted dimension") {
  const Index n = 6, d = 3;
  const Matrix x = random_manifold_matrix(n, d, 1101);
  // Build the constraint operator zeta -> offdiag(zeta^T X + X^T zeta) as a
  // (d*d) x (n*d) matrix and count its null space.
  Matrix op(d * d, n * d);
  Index col = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) {
      Matrix e = Matrix::Zero(n, d);
      e(i, j) = 1.0;
      Matrix c = e.transpose() * x + x.transpose() * e;
      c.diagonal().setZero();
      op.col(col++) = Eigen::Map<Vector>(c.data(), d * d);
    }
  }
  Eigen::JacobiSVD<Matrix> svd(op);
  const double tol = 1e-10 * svd.singularValues().maxCoeff();
  Index rank = 0;
  for (Index k = 0; k < svd.singularValues().size(); ++k) {
    rank += svd.singularValues()[k] > tol ? 1 : 0;
  }
  const Index nullity = n * d - rank;
  CHECK(nullity == n * d - d * (d - 1) / 2);  // 15 for (6,3)
  CHECK(nullity == 15);
}
