#include "rdpg/manifold.hpp"

#include "rdpg/errors.hpp"
#include "rdpg/numerics.hpp"

#include <cmath>
#include <string>

namespace rdpg {

namespace {

void check_columns(const Matrix& x, const char* who) {
  for (Index j = 0; j < x.cols(); ++j) {
    if (x.col(j).norm() <= 1e-12) {
      throw ManifoldError(std::string(who) + ": column " + std::to_string(j) +
                          " is numerically zero");
    }
  }
}

void check_same_shape(const Matrix& x, const Matrix& z, const char* who) {
  if (x.rows() != z.rows() || x.cols() != z.cols()) {
    throw ShapeError(std::string(who) + ": X and Z shapes differ");
  }
}

}  // namespace

double manifold_violation(const Matrix& x) {
  const double scale = x.squaredNorm();
  if (scale == 0.0) return 0.0;
  Matrix gram = x.transpose() * x;
  gram.diagonal().setZero();
  return gram.cwiseAbs().maxCoeff() / scale;
}

bool is_on_manifold(const Matrix& x, double tol) {
  if (x.size() == 0) return false;
  for (Index j = 0; j < x.cols(); ++j) {
    if (x.col(j).norm() <= 1e-12) return false;
  }
  return manifold_violation(x) <= tol;
}

Matrix project_normal(const Matrix& x, const Matrix& z) {
  check_same_shape(x, z, "project_normal");
  check_columns(x, "project_normal");
  const Index d = x.cols();

  // X on the manifold makes the Gram matrix diagonal, so D^2 is just the
  // column norms squared. The D and D^{-1} factors in 2 D (D^{-1} X^T Z) o F
  // cancel entrywise, leaving b_ij = 2 c_ij / (g_i + g_j).
  const Vector g = x.colwise().squaredNorm();
  const Matrix c = x.transpose() * z;  // d x d
  Matrix b(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      b(i, j) = 2.0 * c(i, j) / (g[i] + g[j]);
    }
  }
  Matrix lambda = 0.5 * (b + b.transpose());
  lambda.diagonal().setZero();  // s() subtracts diag(B)
  return x * lambda;
}

Matrix project_tangent(const Matrix& x, const Matrix& z) {
  return z - project_normal(x, z);
}

Matrix retract(const Matrix& x, const Matrix& zeta) {
  check_same_shape(x, zeta, "retract");
  try {
    return modified_qr(x + zeta).q;
  } catch (const RankDeficiencyError& e) {
    throw RetractionError(std::string("retract: ") + e.what());
  }
}

Matrix riemannian_grad(const Matrix& x, const Matrix& euclid_grad) {
  return project_tangent(x, euclid_grad);
}

}  // namespace rdpg
