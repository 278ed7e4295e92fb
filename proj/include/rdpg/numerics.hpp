#pragma once

#include "rdpg/types.hpp"

#include <utility>

namespace rdpg {

enum class EigenOrder { magnitude, algebraic };

// Leading eigenpairs (or singular pairs) of a dense matrix. Vector columns
// are orthonormal; values are sorted descending under the requested order.
struct SpectralPair {
  Vector values;
  Matrix vectors;
};

struct SvdPair {
  Vector values;
  Matrix left;
  Matrix right;
};

// Z = q * r with q having orthogonal (not necessarily unit-norm) columns and
// r upper triangular with ones on the diagonal. Unique for full-rank Z.
struct ModifiedQr {
  Matrix q;
  Matrix r;
};

// d leading eigenpairs of a symmetric matrix. Sign convention: the
// largest-magnitude entry of each eigenvector is positive, which makes
// spectral embeddings reproducible across runs and platforms.
SpectralPair top_eigen(const Matrix& a, int d, EigenOrder order);

// d leading singular triplets. The sign convention of top_eigen is applied to
// the left vectors; right vectors follow their partner.
SvdPair top_svd(const Matrix& a, int d);

// QR variant with the column normalization shifted into the orthogonal
// factor: q = Q diag(R), r = diag(R)^{-1} R. Throws RankDeficiencyError when
// |R_ii| < 1e-12 * ||Z||_F for some i.
ModifiedQr modified_qr(const Matrix& z);

// Squared Frobenius distance between x and y minimized over orthonormal
// alignments, plus the minimizing w:  min_w ||x w - y||_F^2.
std::pair<double, Matrix> procrustes_distance(const Matrix& x, const Matrix& y);

// Solve r x = b for symmetric positive definite r (Cholesky). Throws
// SingularSystemError when a pivot is not positive.
Vector solve_spd(const Matrix& r, const Vector& b);

// Power-iteration estimate of the largest singular value.
double spectral_norm_estimate(const Matrix& a, int iters = 50);

}  // namespace rdpg
