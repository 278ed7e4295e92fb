#pragma once

#include "rdpg/types.hpp"

#include <utility>

namespace rdpg {

// ||M o (A - X X^T)||_F^2
double cost_undirected(const Matrix& a, const Matrix& m, const Matrix& x);

// Gradient of cost_undirected: 4 [M o (X X^T - A)] X.
Matrix grad_undirected(const Matrix& a, const Matrix& m, const Matrix& x);

// Spectral embedding X = V diag(sqrt(lambda)) from the d largest positive
// eigenvalues of A. Throws DimensionError (naming the usable count) when
// fewer than d eigenvalues are positive.
Matrix ase(const Matrix& a, int d);

// Constant-stepsize factored gradient descent on cost_undirected. Stops when
// the relative cost decrease of an iteration falls below cfg.tol_rel_cost or
// after cfg.max_iters. Throws StepSizeError if the cost exceeds 1e3 times the
// initial value.
std::pair<Matrix, SolveReport> solve_gd(const Matrix& a, const Matrix& m,
                                        const SolverConfig& cfg);

// Exact minimizer of the hollow-masked cost over row i with all other rows
// fixed: solves (X^T X - x_i x_i^T) x = X^T A_i^T.
Vector bcd_row_update(const Matrix& a, const Matrix& x, Index i);

// Cyclic block-coordinate descent over the rows of X, maintaining
// R = X^T X through rank-one downdates/updates. Hollow mask only.
std::pair<Matrix, SolveReport> solve_bcd(const Matrix& a, const SolverConfig& cfg);

// Index of the largest gap in the magnitude-eigenvalue scree among the top
// d_max values (a simple elbow rule for picking the embedding dimension).
int elbow_dimension(const Matrix& a, int d_max);

// Default GD stepsize 1/(8 lambda_max(A)), with lambda_max estimated by
// power iteration. The curvature of the cost near an optimum approaches
// 8 lambda_max, so this sits a factor of two inside the stability boundary.
double default_step_size(const Matrix& a);

// i.i.d. zero-mean random init. scale <= 0 selects
// sqrt(mean degree / (N d)), which matches X X^T to A's magnitude at start.
Matrix random_init(const Matrix& a, int d, double scale, std::uint64_t seed);

}  // namespace rdpg
