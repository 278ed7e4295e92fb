#include "rdpg/embed_directed.hpp"

#include "rdpg/errors.hpp"
#include "rdpg/manifold.hpp"
#include "rdpg/numerics.hpp"
#include "rdpg/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rdpg {

namespace {

void check_shapes(const Matrix& a, const Matrix& m, const Matrix& x_out,
                  const Matrix& x_in, const char* who) {
  if (a.rows() != a.cols() || m.rows() != m.cols()) {
    throw ShapeError(std::string(who) + ": A and M must be square");
  }
  if (a.rows() != m.rows() || a.rows() != x_out.rows() || a.rows() != x_in.rows()) {
    throw ShapeError(std::string(who) + ": row counts differ");
  }
  if (x_out.cols() != x_in.cols()) {
    throw ShapeError(std::string(who) + ": factor dimensions differ");
  }
}

std::pair<Matrix, Matrix> initial_pair(const Matrix& a, const SolverConfig& cfg) {
  switch (cfg.init) {
    case Init::spectral: {
      DirectedEmbedding e = ase_directed(a, cfg.d);
      return {std::move(e.x_out), std::move(e.x_in)};
    }
    case Init::random:
      return {random_manifold_point(a, cfg.d, cfg.random_scale, cfg.seed),
              random_manifold_point(a, cfg.d, cfg.random_scale, cfg.seed + 1)};
    case Init::warm: {
      if (!cfg.warm.has_value() || !cfg.warm_in.has_value()) {
        throw ConfigError("solve_riemannian_gd: warm init needs both factors");
      }
      return {*cfg.warm, *cfg.warm_in};
    }
  }
  throw ConfigError("solve_riemannian_gd: unknown init kind");
}

}  // namespace

double cost_directed(const Matrix& a, const Matrix& m, const Matrix& x_out,
                     const Matrix& x_in) {
  check_shapes(a, m, x_out, x_in, "cost_directed");
  return (m.array() * (a - x_out * x_in.transpose()).array()).matrix().squaredNorm();
}

std::pair<Matrix, Matrix> grad_directed(const Matrix& a, const Matrix& m,
                                        const Matrix& x_out, const Matrix& x_in) {
  check_shapes(a, m, x_out, x_in, "grad_directed");
  const Matrix residual = (m.array() * (x_out * x_in.transpose() - a).array()).matrix();
  return {2.0 * residual * x_in, 2.0 * residual.transpose() * x_out};
}

DirectedEmbedding ase_directed(const Matrix& a, int d) {
  if (a.rows() != a.cols()) throw ShapeError("ase_directed: A must be square");
  if (d < 1 || d > a.rows()) throw DimensionError("ase_directed: need 1 <= d <= N");
  const SvdPair svd = top_svd(a, d);
  const double tol = 1e-12 * std::max(svd.values[0], 1e-300);
  if (svd.values[d - 1] <= tol) {
    int usable = 0;
    while (usable < d && svd.values[usable] > tol) ++usable;
    throw DimensionError("ase_directed: requested d=" + std::to_string(d) +
                         " but only " + std::to_string(usable) +
                         " nonzero singular values are available");
  }
  DirectedEmbedding e;
  const Vector root = svd.values.cwiseSqrt();
  e.x_out = svd.left * root.asDiagonal();
  e.x_in = svd.right * root.asDiagonal();
  return e;
}

Matrix random_manifold_point(const Matrix& a, int d, double scale,
                             std::uint64_t seed) {
  const Index n = a.rows();
  if (scale <= 0.0) {
    // Aim for |x_out^T x_in| entries matching the edge density:
    // E[(x^T y)^2] = s^4 d for iid N(0, s^2) rows.
    const double density =
        a.cwiseAbs().sum() / std::max(1.0, static_cast<double>(n) * (n - 1));
    scale = std::pow(std::max(density, 1.0 / static_cast<double>(n)) / d, 0.25);
  }
  Rng rng(seed);
  Matrix z(n, d);
  for (Index i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) z(i, j) = scale * rng.normal();
  }
  return modified_qr(z).q;
}

std::pair<DirectedEmbedding, SolveReport> solve_riemannian_gd(
    const Matrix& a, const Matrix& m, const SolverConfig& cfg,
    const ArmijoConfig& armijo) {
  if (cfg.tol_rel_cost <= 0.0) {
    throw ConfigError("solve_riemannian_gd: tol_rel_cost must be positive");
  }
  if (armijo.backtrack <= 0.0 || armijo.backtrack >= 1.0 ||
      armijo.sufficient_decrease <= 0.0 || armijo.sufficient_decrease >= 1.0 ||
      armijo.initial_step <= 0.0) {
    throw ConfigError("solve_riemannian_gd: invalid Armijo parameters");
  }

  auto [x_out, x_in] = initial_pair(a, cfg);
  check_shapes(a, m, x_out, x_in, "solve_riemannian_gd");
  if (!is_on_manifold(x_out, 1e-8) || !is_on_manifold(x_in, 1e-8)) {
    throw ManifoldError("solve_riemannian_gd: initial pair is not on the manifold");
  }

  SolveReport report;
  double f = cost_directed(a, m, x_out, x_in);
  if (cfg.record_trace) report.trace.push_back(f);
  report.feasibility_max =
      std::max(manifold_violation(x_out), manifold_violation(x_in));

  double step = armijo.initial_step;
  for (int k = 1; k <= cfg.max_iters; ++k) {
    const auto [g_out, g_in] = grad_directed(a, m, x_out, x_in);
    const Matrix t_out = project_tangent(x_out, g_out);
    const Matrix t_in = project_tangent(x_in, g_in);
    const double grad_sq = t_out.squaredNorm() + t_in.squaredNorm();
    if (grad_sq <= 1e-28) {  // stationary on the manifold
      report.converged = true;
      break;
    }

    // Backtracking line search, warm-started from the previous accepted step.
    double t = std::min(step / armijo.backtrack, armijo.initial_step);
    bool accepted = false;
    Matrix cand_out, cand_in;
    double f_cand = f;
    for (int bt = 0; bt <= armijo.max_backtracks; ++bt) {
      try {
        cand_out = retract(x_out, (-t) * t_out);
        cand_in = retract(x_in, (-t) * t_in);
      } catch (const RetractionError&) {
        t *= armijo.backtrack;  // lost rank: shrink and retry
        continue;
      }
      f_cand = cost_directed(a, m, cand_out, cand_in);
      if (f_cand <= f - armijo.sufficient_decrease * t * grad_sq) {
        accepted = true;
        break;
      }
      t *= armijo.backtrack;
    }
    if (!accepted) {
      ++report.line_search_failures;
      report.converged = false;
      break;
    }

    x_out = std::move(cand_out);
    x_in = std::move(cand_in);
    step = t;
    report.iterations = k;
    report.feasibility_max =
        std::max({report.feasibility_max, manifold_violation(x_out),
                  manifold_violation(x_in)});
    if (cfg.record_trace) report.trace.push_back(f_cand);
    const bool done = f <= 1e-30 || (f - f_cand) / std::max(f, 1e-300) < cfg.tol_rel_cost;
    f = f_cand;
    if (done) {
      report.converged = true;
      break;
    }
  }

  report.final_cost = f;
  DirectedEmbedding e;
  e.x_out = std::move(x_out);
  e.x_in = std::move(x_in);
  return {std::move(e), report};
}

DirectedEmbedding rescale_columns(const Matrix& x_out, const Matrix& x_in) {
  if (x_out.cols() != x_in.cols() ) {
    throw ShapeError("rescale_columns: factor dimensions differ");
  }
  const Index d = x_out.cols();
  Vector s(d);
  for (Index j = 0; j < d; ++j) {
    const double out_norm = x_out.col(j).norm();
    const double in_norm = x_in.col(j).norm();
    if (out_norm <= 1e-300 || in_norm <= 1e-300) {
      throw DomainError("rescale_columns: degenerate (zero) column " + std::to_string(j));
    }
    s[j] = out_norm / in_norm;
  }
  DirectedEmbedding e;
  e.x_out = x_out * s.cwiseSqrt().cwiseInverse().asDiagonal();
  e.x_in = x_in * s.cwiseSqrt().asDiagonal();
  return e;
}

bool verify_ambiguity_reduction(const Matrix& x_out, const Matrix& x_in,
                                const Matrix& t, double tol) {
  const Index d = x_out.cols();
  if (t.rows() != d || t.cols() != d) {
    throw ShapeError("verify_ambiguity_reduction: T must be d x d");
  }
  Eigen::FullPivLU<Matrix> lu(t);
  if (!lu.isInvertible()) {
    throw DomainError("verify_ambiguity_reduction: T is singular");
  }
  const Matrix y_out = x_out * t;
  const Matrix y_in = x_in * lu.inverse().transpose();
  const Matrix g_out = y_out.transpose() * y_out;
  const Matrix g_in = y_in.transpose() * y_in;

  // The residual rotation freedom lets any common orthonormal W act on both
  // factors, so the constraint survives T iff a single W rediagonalizes both
  // Gram matrices -- which holds iff they are equal. Diagonalize the outgoing
  // one and measure what is left of the incoming one in that basis.
  Eigen::SelfAdjointEigenSolver<Matrix> es(g_out);
  const Matrix w = es.eigenvectors();
  const Matrix h_out = w.transpose() * g_out * w;
  const Matrix h_in = w.transpose() * g_in * w;

  double violation = (h_out.diagonal() - h_in.diagonal()).cwiseAbs().maxCoeff();
  Matrix off_out = h_out;
  off_out.diagonal().setZero();
  Matrix off_in = h_in;
  off_in.diagonal().setZero();
  violation = std::max({violation, off_out.cwiseAbs().maxCoeff(),
                        off_in.cwiseAbs().maxCoeff()});
  return violation <= tol;
}

}  // namespace rdpg
