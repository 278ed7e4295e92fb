#include "rdpg/numerics.hpp"

#include "rdpg/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace rdpg {

namespace {

// Flip column signs so the largest-magnitude entry of each column is
// positive. companion (if non-null) receives the same flips.
void fix_column_signs(Matrix& vectors, Matrix* companion = nullptr) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    Index at = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&at);
    if (vectors(at, j) < 0.0) {
      vectors.col(j) = -vectors.col(j);
      if (companion != nullptr) companion->col(j) = -companion->col(j);
    }
  }
}

void check_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw ShapeError(std::string(who) + ": matrix must be square, got " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

}  // namespace

SpectralPair top_eigen(const Matrix& a, int d, EigenOrder order) {
  check_square(a, "top_eigen");
  const Index n = a.rows();
  if (d < 1 || d > n) {
    throw ShapeError("top_eigen: d must be in [1, N], got " + std::to_string(d));
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw ShapeError("top_eigen: input is not symmetric (max |A - A^T| = " +
                     std::to_string(asym) + ")");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) {
    throw SingularSystemError("top_eigen: eigendecomposition failed");
  }

  std::vector<Index> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  const Vector& w = es.eigenvalues();
  if (order == EigenOrder::magnitude) {
    std::stable_sort(idx.begin(), idx.end(), [&](Index i, Index j) {
      if (std::abs(w[i]) != std::abs(w[j])) return std::abs(w[i]) > std::abs(w[j]);
      return w[i] > w[j];
    });
  } else {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Index i, Index j) { return w[i] > w[j]; });
  }

  SpectralPair out;
  out.values.resize(d);
  out.vectors.resize(n, d);
  for (int k = 0; k < d; ++k) {
    out.values[k] = w[idx[static_cast<size_t>(k)]];
    out.vectors.col(k) = es.eigenvectors().col(idx[static_cast<size_t>(k)]);
  }
  fix_column_signs(out.vectors);
  return out;
}

SvdPair top_svd(const Matrix& a, int d) {
  const Index rank_bound = std::min(a.rows(), a.cols());
  if (d < 1 || d > rank_bound) {
    throw ShapeError("top_svd: d must be in [1, min(rows, cols)], got " +
                     std::to_string(d));
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdPair out;
  out.values = svd.singularValues().head(d);
  out.left = svd.matrixU().leftCols(d);
  out.right = svd.matrixV().leftCols(d);
  fix_column_signs(out.left, &out.right);
  return out;
}

ModifiedQr modified_qr(const Matrix& z) {
  const Index n = z.rows();
  const Index d = z.cols();
  if (d < 1 || d > n) {
    throw ShapeError("modified_qr: need a tall N x d matrix with d <= N");
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix thin_q = qr.householderQ() * Matrix::Identity(n, d);
  Matrix r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();

  const double tol = 1e-12 * z.norm();
  for (Index i = 0; i < d; ++i) {
    if (std::abs(r(i, i)) < tol) {
      throw RankDeficiencyError("modified_qr: column " + std::to_string(i) +
                                " is numerically dependent (|R_ii| < 1e-12 ||Z||)");
    }
  }

  ModifiedQr out;
  const Vector diag = r.diagonal();
  out.q = thin_q * diag.asDiagonal();
  out.r = diag.cwiseInverse().asDiagonal() * r;
  out.r.diagonal().setOnes();  // exact by construction
  return out;
}

std::pair<double, Matrix> procrustes_distance(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ShapeError("procrustes_distance: shapes differ");
  }
  const Matrix c = x.transpose() * y;
  Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix w = svd.matrixU() * svd.matrixV().transpose();
  const double dist = (x * w - y).squaredNorm();
  return {dist, std::move(w)};
}

Vector solve_spd(const Matrix& r, const Vector& b) {
  check_square(r, "solve_spd");
  if (r.rows() != b.size()) {
    throw ShapeError("solve_spd: system size mismatch");
  }
  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success) {
    throw SingularSystemError("solve_spd: matrix is not positive definite");
  }
  return llt.solve(b);
}

double spectral_norm_estimate(const Matrix& a, int iters) {
  if (a.size() == 0) return 0.0;
  // Deterministic start; the slight ramp avoids starting orthogonal to the
  // leading singular direction for structured matrices.
  Vector v = Vector::Ones(a.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] += 1e-3 * static_cast<double>(i % 7);
  v.normalize();
  double sigma = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vector av = a * v;
    sigma = av.norm();
    if (sigma == 0.0) return 0.0;
    Vector w = a.transpose() * av;
    const double wn = w.norm();
    if (wn == 0.0) return sigma;
    v = w / wn;
  }
  return (a * v).norm();
}

}  // namespace rdpg
