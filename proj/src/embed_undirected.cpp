#include "rdpg/embed_undirected.hpp"

#include "rdpg/errors.hpp"
#include "rdpg/generators.hpp"
#include "rdpg/numerics.hpp"
#include "rdpg/random.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace rdpg {

namespace {

void check_problem_shapes(const Matrix& a, const Matrix& m, const Matrix& x,
                          const char* who) {
  if (a.rows() != a.cols() || m.rows() != m.cols()) {
    throw ShapeError(std::string(who) + ": A and M must be square");
  }
  if (a.rows() != m.rows() || a.rows() != x.rows()) {
    throw ShapeError(std::string(who) + ": A, M and X row counts differ");
  }
}

Matrix initial_point(const Matrix& a, const SolverConfig& cfg) {
  switch (cfg.init) {
    case Init::spectral:
      return ase(a, cfg.d);
    case Init::random:
      return random_init(a, cfg.d, cfg.random_scale, cfg.seed);
    case Init::warm: {
      if (!cfg.warm.has_value()) {
        throw ConfigError("solver: warm init requested without a warm matrix");
      }
      const Matrix& w = *cfg.warm;
      if (w.rows() != a.rows() || w.cols() != cfg.d) {
        throw ShapeError("solver: warm init has wrong shape");
      }
      return w;
    }
  }
  throw ConfigError("solver: unknown init kind");
}

// Stopping rule: the cost plateaued, i.e. one iteration changed it by less
// than tol in relative terms. An increase beyond tol is not convergence (the
// divergence guard handles runaway steps).
bool small_relative_decrease(double prev, double cur, double tol) {
  if (prev <= 1e-30) return true;  // already at (numerically) zero cost
  return std::abs(prev - cur) / prev < tol;
}

Vector masked_row_solve(const Matrix& r, const Vector& b, int d, int* warnings) {
  try {
    return solve_spd(r, b);
  } catch (const SingularSystemError&) {
    ++*warnings;
    const double ridge = std::max(1e-8 * r.trace() / d, 1e-12);
    Matrix damped = r;
    damped.diagonal().array() += ridge;
    try {
      return solve_spd(damped, b);
    } catch (const SingularSystemError&) {
      return Vector::Zero(b.size());
    }
  }
}

}  // namespace

double cost_undirected(const Matrix& a, const Matrix& m, const Matrix& x) {
  check_problem_shapes(a, m, x, "cost_undirected");
  return (m.array() * (a - x * x.transpose()).array()).matrix().squaredNorm();
}

Matrix grad_undirected(const Matrix& a, const Matrix& m, const Matrix& x) {
  check_problem_shapes(a, m, x, "grad_undirected");
  return 4.0 * (m.array() * (x * x.transpose() - a).array()).matrix() * x;
}

Matrix ase(const Matrix& a, int d) {
  const Index n = a.rows();
  if (d < 1 || d > n) throw DimensionError("ase: need 1 <= d <= N");
  const SpectralPair full = top_eigen(a, static_cast<int>(n), EigenOrder::algebraic);
  const double tol = 1e-12 * std::max(full.values.cwiseAbs().maxCoeff(), 1e-300);
  int usable = 0;
  while (usable < n && full.values[usable] > tol) ++usable;
  if (usable < d) {
    throw DimensionError("ase: requested d=" + std::to_string(d) + " but only " +
                         std::to_string(usable) + " positive eigenvalues are available");
  }
  return full.vectors.leftCols(d) * full.values.head(d).cwiseSqrt().asDiagonal();
}

double default_step_size(const Matrix& a) {
  const double lam = std::max(spectral_norm_estimate(a), 1.0);
  return 1.0 / (8.0 * lam);
}

Matrix random_init(const Matrix& a, int d, double scale, std::uint64_t seed) {
  const Index n = a.rows();
  if (scale <= 0.0) {
    const double mean_degree = a.sum() / static_cast<double>(n);
    scale = std::sqrt(std::max(mean_degree, 0.0) / (static_cast<double>(n) * d));
  }
  Rng rng(seed);
  Matrix x(n, d);
  for (Index i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = scale * rng.normal();
  }
  return x;
}

std::pair<Matrix, SolveReport> solve_gd(const Matrix& a, const Matrix& m,
                                        const SolverConfig& cfg) {
  if (cfg.tol_rel_cost <= 0.0) throw ConfigError("solve_gd: tol_rel_cost must be positive");
  Matrix x = initial_point(a, cfg);
  check_problem_shapes(a, m, x, "solve_gd");

  const double alpha = cfg.step_size > 0.0 ? cfg.step_size : default_step_size(a);
  SolveReport report;
  double f = cost_undirected(a, m, x);
  const double f0 = f;
  if (cfg.record_trace) report.trace.push_back(f);
  if (f <= 1e-30) {  // exact fit: nothing to do
    report.final_cost = f;
    report.converged = true;
    return {std::move(x), report};
  }

  for (int k = 1; k <= cfg.max_iters; ++k) {
    x -= alpha * grad_undirected(a, m, x);
    const double fk = cost_undirected(a, m, x);
    if (cfg.record_trace) report.trace.push_back(fk);
    report.iterations = k;
    if (!std::isfinite(fk) || fk > 1e3 * f0) {
      throw StepSizeError("solve_gd: cost diverged (exceeded 1e3 x initial); "
                          "use a smaller step size");
    }
    if (small_relative_decrease(f, fk, cfg.tol_rel_cost)) {
      f = fk;
      report.converged = true;
      break;
    }
    f = fk;
  }
  report.final_cost = f;
  return {std::move(x), report};
}

Vector bcd_row_update(const Matrix& a, const Matrix& x, Index i) {
  if (a.rows() != a.cols() || a.rows() != x.rows()) {
    throw ShapeError("bcd_row_update: A and X shapes are inconsistent");
  }
  if (i < 0 || i >= x.rows()) throw ShapeError("bcd_row_update: row index out of range");
  const Matrix r = x.transpose() * x - x.row(i).transpose() * x.row(i);
  const Vector b = x.transpose() * a.row(i).transpose();
  return solve_spd(r, b);
}

std::pair<Matrix, SolveReport> solve_bcd(const Matrix& a, const SolverConfig& cfg) {
  if (cfg.tol_rel_cost <= 0.0) throw ConfigError("solve_bcd: tol_rel_cost must be positive");
  const Index n = a.rows();
  Matrix x = initial_point(a, cfg);
  const int d = cfg.d;
  const Matrix mask = hollow_mask(n, false).entries;

  SolveReport report;
  double f = cost_undirected(a, mask, x);
  if (cfg.record_trace) report.trace.push_back(f);

  for (int cycle = 1; cycle <= cfg.max_iters; ++cycle) {
    // Refresh the Gram matrix once per cycle, then maintain it by rank-one
    // downdates/updates while sweeping the rows.
    Matrix r = x.transpose() * x;
    for (Index i = 0; i < n; ++i) {
      r -= x.row(i).transpose() * x.row(i);
      const Vector b = x.transpose() * a.row(i).transpose();
#ifndef NDEBUG
      const double before = n <= 256 ? cost_undirected(a, mask, x) : 0.0;
#endif
      x.row(i) = masked_row_solve(r, b, d, &report.warnings).transpose();
#ifndef NDEBUG
      if (n <= 256) {
        const double after = cost_undirected(a, mask, x);
        assert(after <= before + 1e-9 * (1.0 + before));
      }
#endif
      r += x.row(i).transpose() * x.row(i);
    }
    const double fc = cost_undirected(a, mask, x);
    if (cfg.record_trace) report.trace.push_back(fc);
    report.iterations = cycle;
    if (small_relative_decrease(f, fc, cfg.tol_rel_cost)) {
      f = fc;
      report.converged = true;
      break;
    }
    f = fc;
  }
  report.final_cost = f;
  return {std::move(x), report};
}

int elbow_dimension(const Matrix& a, int d_max) {
  const Index n = a.rows();
  if (d_max < 1 || d_max > n) throw ShapeError("elbow_dimension: need 1 <= d_max <= N");
  if (d_max == 1) return 1;
  const SpectralPair top = top_eigen(a, d_max, EigenOrder::magnitude);
  const Vector scree = top.values.cwiseAbs();
  int best = 1;
  double best_gap = -1.0;
  for (int k = 0; k + 1 < d_max; ++k) {
    const double gap = scree[k] - scree[k + 1];
    if (gap > best_gap) {
      best_gap = gap;
      best = k + 1;
    }
  }
  return best;
}

}  // namespace rdpg
