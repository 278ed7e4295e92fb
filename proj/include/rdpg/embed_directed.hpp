#pragma once

#include "rdpg/types.hpp"

#include <utility>

namespace rdpg {

// ||M o (A - X_out X_in^T)||_F^2
double cost_directed(const Matrix& a, const Matrix& m, const Matrix& x_out,
                     const Matrix& x_in);

// Gradient pair of cost_directed:
//   G_out = 2 [M o (X_out X_in^T - A)] X_in
//   G_in  = 2 [M o (X_out X_in^T - A)]^T X_out
std::pair<Matrix, Matrix> grad_directed(const Matrix& a, const Matrix& m,
                                        const Matrix& x_out, const Matrix& x_in);

// SVD embedding: X_out = U sqrt(S), X_in = V sqrt(S) from the top-d singular
// triplets. Both factors have orthogonal columns with matching norms by
// construction. Throws DimensionError when sigma_d is (numerically) zero.
DirectedEmbedding ase_directed(const Matrix& a, int d);

// Feasible first-order descent for the masked directed cost, treating
// (X_out, X_in) as a point on the product of two orthogonal-column manifolds:
// project each Euclidean gradient to its tangent space, take an Armijo step
// and retract each factor. Every iterate keeps both Gram matrices diagonal.
std::pair<DirectedEmbedding, SolveReport> solve_riemannian_gd(
    const Matrix& a, const Matrix& m, const SolverConfig& cfg,
    const ArmijoConfig& armijo = {});

// Equalize per-column norms across the pair via s_i = ||out_i|| / ||in_i||,
// X_out <- X_out S^{-1/2}, X_in <- X_in S^{1/2}. The product X_out X_in^T is
// unchanged. Throws DomainError on a zero column.
DirectedEmbedding rescale_columns(const Matrix& x_out, const Matrix& x_in);

// Checks whether the transformed pair (X_out T, X_in T^{-T}) still admits the
// diagonal-and-equal Gram normal form, i.e. whether a single rotation of both
// factors restores the constraint. Equivalently: the two transformed Gram
// matrices must coincide. True exactly for orthonormal T on generic pairs.
bool verify_ambiguity_reduction(const Matrix& x_out, const Matrix& x_in,
                                const Matrix& t, double tol = 1e-6);

// Random point on the manifold: Gaussian matrix (scaled to the graph's edge
// density when scale <= 0) followed by the modified QR's orthogonal factor.
Matrix random_manifold_point(const Matrix& a, int d, double scale,
                             std::uint64_t seed);

}  // namespace rdpg
