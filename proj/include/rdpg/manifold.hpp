#pragma once

#include "rdpg/types.hpp"

namespace rdpg {

// Geometry of M(d,N), the matrices with mutually orthogonal nonzero columns
// (X^T X diagonal). This is not the Stiefel manifold: columns are orthogonal
// but free in norm, and its dimension is Nd - d(d-1)/2.

// Worst off-diagonal Gram entry relative to ||X||_F^2.
double manifold_violation(const Matrix& x);

// True iff x has no (numerically) zero column and X^T X is diagonal up to
// tol * ||X||_F^2.
bool is_on_manifold(const Matrix& x, double tol = 1e-9);

// Projection of z onto the normal space at x, which consists of the matrices
// X Lambda with Lambda symmetric and hollow. Computed as X s(2 D L) with
//   s(B) = (B + B^T)/2 - diag(B),   D = (X^T X)^{1/2},
//   L = (D^{-1} X^T Z) o F,         F_ij = 1 / (D^2_ii + D^2_jj).
Matrix project_normal(const Matrix& x, const Matrix& z);

// Projection onto the tangent space at x: z - project_normal(x, z). The
// result zeta satisfies  offdiag(zeta^T X + X^T zeta) = 0.
Matrix project_tangent(const Matrix& x, const Matrix& z);

// Retraction: the orthogonal factor of the modified QR of x + zeta. Throws
// RetractionError when x + zeta loses rank (callers shrink the step).
Matrix retract(const Matrix& x, const Matrix& zeta);

// Riemannian gradient = tangent projection of the Euclidean gradient.
Matrix riemannian_grad(const Matrix& x, const Matrix& euclid_grad);

}  // namespace rdpg
