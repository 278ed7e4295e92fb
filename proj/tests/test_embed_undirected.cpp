#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rdpg/embed_undirected.hpp"
#include "rdpg/errors.hpp"
#include "rdpg/generators.hpp"
#include "rdpg/numerics.hpp"
#include "test_utils.hpp"

#include <cmath>

using namespace rdpg;
using namespace rdpg::testing;

namespace {

Matrix triangle() {
  Matrix a = Matrix::Ones(3, 3);
  a.diagonal().setZero();
  return a;
}

// Dense grid refinement of the row objective around zero; the oracle for the
// closed-form row update.
Vector row_grid_oracle(const Matrix& a, const Matrix& x, Index row, double radius) {
  const Index d = x.cols();
  REQUIRE(d <= 2);
  auto row_cost = [&](const Vector& v) {
    double c = 0.0;
    for (Index j = 0; j < x.rows(); ++j) {
      if (j == row) continue;
      const double r = a(row, j) - v.dot(x.row(j));
      c += r * r;
    }
    return c;
  };
  Vector center = Vector::Zero(d);
  double span = radius;
  const int grid = 20;
  for (int round = 0; round < 12; ++round) {
    Vector best = center;
    double best_val = row_cost(center);
    Vector probe(d);
    if (d == 1) {
      for (int i = -grid; i <= grid; ++i) {
        probe[0] = center[0] + span * i / grid;
        const double v = row_cost(probe);
        if (v < best_val) {
          best_val = v;
          best = probe;
        }
      }
    } else {
      for (int i = -grid; i <= grid; ++i) {
        for (int j = -grid; j <= grid; ++j) {
          probe[0] = center[0] + span * i / grid;
          probe[1] = center[1] + span * j / grid;
          const double v = row_cost(probe);
          if (v < best_val) {
            best_val = v;
            best = probe;
          }
        }
      }
    }
    center = best;
    span *= 2.5 / grid;  // keep a little overlap while zooming
  }
  return center;
}

// Least-squares fit of log(gap) against the iteration index.
double log_linear_r2(const std::vector<double>& ks, const std::vector<double>& logs) {
  const auto n = static_cast<double>(ks.size());
  double sk = 0.0, sl = 0.0, skk = 0.0, skl = 0.0, sll = 0.0;
  for (size_t i = 0; i < ks.size(); ++i) {
    sk += ks[i];
    sl += logs[i];
    skk += ks[i] * ks[i];
    skl += ks[i] * logs[i];
    sll += logs[i] * logs[i];
  }
  const double cov = skl - sk * sl / n;
  const double var_k = skk - sk * sk / n;
  const double var_l = sll - sl * sl / n;
  return cov * cov / (var_k * var_l);
}

}  // namespace

TEST_CASE("cost_undirected counts masked residuals") {
  const Matrix a = triangle();
  const Matrix m = hollow_mask(3, false).entries;
  CHECK(cost_undirected(a, m, Matrix::Zero(3, 1)) == 6.0);
  CHECK(cost_undirected(a, m, Matrix::Ones(3, 1)) == 0.0);
  CHECK(cost_undirected(a, Matrix::Zero(3, 3), random_matrix(3, 2, 1)) == 0.0);
  CHECK_THROWS_AS(cost_undirected(a, m, Matrix::Zero(4, 1)), ShapeError);
}

TEST_CASE("grad_undirected vanishes at exact fits and at zero") {
  const Matrix a = triangle();
  const Matrix m = hollow_mask(3, false).entries;
  CHECK(grad_undirected(a, m, Matrix::Ones(3, 1)).norm() == 0.0);
  CHECK(grad_undirected(a, m, Matrix::Zero(3, 1)).norm() == 0.0);
}

TEST_CASE("grad_undirected matches finite differences") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Index n = 10;
    const Matrix p = Matrix::Constant(n, n, 0.4);
    const Matrix a = sample_rdpg(p, false, seed).entries;
    const Matrix m = random_mask(n, 0.8, false, seed + 50);
    const Matrix x = random_matrix(n, 2, seed + 100, 0.5);
    const Matrix g = grad_undirected(a, m, x);
    const Matrix fd = finite_difference_gradient(
        [&](const Matrix& xx) { return cost_undirected(a, m, xx); }, x);
    CHECK((g - fd).norm() <= 1e-6 * fd.norm());
  }
}

TEST_CASE("ase of the triangle graph") {
  const Matrix x = ase(triangle(), 1);
  for (Index i = 0; i < 3; ++i) {
    CHECK(x(i, 0) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-9));
  }
}

TEST_CASE("ase recovers a rank-one model up to rotation") {
  const Index n = 300;
  Vector x_true(n);
  Rng rng(5);
  for (Index i = 0; i < n; ++i) x_true[i] = 0.4 + 0.5 * rng.uniform();
  Matrix p = x_true * x_true.transpose();
  const Matrix a = sample_rdpg(p, false, 9).entries;
  const Matrix x_hat = ase(a, 1);
  const double dist = procrustes_distance(x_hat, x_true).first;
  CHECK(dist / n < 5e-3);  // per-node error shrinks with n
}

TEST_CASE("ase fails without positive eigenvalues") {
  CHECK_THROWS_WITH_AS(ase(Matrix::Zero(4, 4), 1), doctest::Contains("only 0"),
                       DimensionError);
}

TEST_CASE("ase yields the best rank-d PSD approximation") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Index n = 40;
    Matrix z = random_matrix(n, n, 800 + seed);
    const Matrix a = 0.5 * (z + z.transpose());
    const int d = 3;
    const Matrix x = ase(a, d);

    // Oracle: full eigendecomposition, keep the d most positive eigenvalues.
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    Matrix best = Matrix::Zero(n, n);
    for (Index k = n - d; k < n; ++k) {
      if (es.eigenvalues()[k] > 0.0) {
        best += es.eigenvalues()[k] * es.eigenvectors().col(k) *
                es.eigenvectors().col(k).transpose();
      }
    }
    CHECK((x * x.transpose() - best).norm() <= 1e-9 * best.norm());
    CHECK((a - x * x.transpose()).squaredNorm() <=
          (a - best).squaredNorm() + 1e-9 * a.squaredNorm());
  }
}

TEST_CASE("solve_gd returns immediately from an exact fit") {
  const Matrix a = triangle();
  SolverConfig cfg;
  cfg.d = 1;
  cfg.init = Init::warm;
  cfg.warm = Matrix::Ones(3, 1);
  const auto [x, report] = solve_gd(a, hollow_mask(3, false).entries, cfg);
  CHECK(report.final_cost == 0.0);
  CHECK(report.iterations == 0);
  CHECK(report.converged);
  CHECK((x - Matrix::Ones(3, 1)).norm() == 0.0);
}

TEST_CASE("solve_gd beats the spectral baseline under the hollow mask") {
  const SbmConfig cfg = two_block_config(200, 0.5, 0.2, 3);
  const Matrix a = sample_rdpg(sbm_probability(cfg), false, 3).entries;
  const Matrix m = hollow_mask(200, false).entries;
  SolverConfig sc;
  sc.d = 2;
  sc.max_iters = 2000;
  sc.tol_rel_cost = 1e-10;
  const auto [x, report] = solve_gd(a, m, sc);
  const double ase_cost = cost_undirected(a, m, ase(a, 2));
  CHECK(report.final_cost <= ase_cost + 1e-9);
  CHECK(report.converged);
}

TEST_CASE("solve_gd cost trace is non-increasing for a small stepsize") {
  const SbmConfig cfg = two_block_config(60, 0.6, 0.1, 11);
  const Matrix a = sample_rdpg(sbm_probability(cfg), false, 11).entries;
  SolverConfig sc;
  sc.d = 2;
  sc.step_size = 0.2 * default_step_size(a);
  sc.max_iters = 300;
  sc.record_trace = true;
  const auto [x, report] = solve_gd(a, hollow_mask(60, false).entries, sc);
  for (size_t k = 1; k < report.trace.size(); ++k) {
    CHECK(report.trace[k] <= report.trace[k - 1] + 1e-12);
  }
}

TEST_CASE("solve_gd diverges loudly when the stepsize is absurd") {
  const SbmConfig cfg = two_block_config(60, 0.6, 0.1, 13);
  const Matrix a = sample_rdpg(sbm_probability(cfg), false, 13).entries;
  SolverConfig sc;
  sc.d = 2;
  sc.step_size = 1.0;  // orders of magnitude past stability
  CHECK_THROWS_AS(solve_gd(a, hollow_mask(60, false).entries, sc), StepSizeError);
}

TEST_CASE("solve_gd cost gap decays geometrically near the solution") {
  const SbmConfig cfg = two_block_config(100, 0.5, 0.2, 17);
  const Matrix a = sample_rdpg(sbm_probability(cfg), false, 17).entries;
  SolverConfig sc;
  sc.d = 2;
  sc.max_iters = 4000;
  sc.tol_rel_cost = 1e-14;
  sc.record_trace = true;
  const auto [x, report] = solve_gd(a, hollow_mask(100, false).entries, sc);
  const double f_star = report.final_cost;

  std::vector<double> ks, logs;
  const double tail_step =
      report.trace[report.trace.size() - 2] - report.trace.back();
  for (size_t k = 0; k < report.trace.size(); ++k) {
    const double gap = report.trace[k] - f_star;
    if (gap < 1e-4 * (report.trace.front() - f_star) &&
        gap > std::max(1e3 * tail_step, 1e-11 * f_star)) {
      ks.push_back(static_cast<double>(k));
      logs.push_back(std::log(gap));
    }
  }
  REQUIRE(ks.size() >= 10);
  CHECK(log_linear_r2(ks, logs) > 0.99);
}

TEST_CASE("bcd_row_update fixed point on the triangle") {
  const Matrix x = Matrix::Ones(3, 1);
  const Vector v = bcd_row_update(triangle(), x, 1);
  CHECK(v.size() == 1);
  CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bcd_row_update sends isolated nodes to zero") {
  Matrix a = triangle();
  a.row(1).setZero();
  a.col(1).setZero();
  const Matrix x = random_matrix(3, 1, 3);
  CHECK(bcd_row_update(a, x, 1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bcd_row_update matches grid refinement") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Index n = 12;
    const Matrix a = sample_rdpg(Matrix::Constant(n, n, 0.5), false, 900 + seed).entries;
    const Matrix x = random_matrix(n, 2, 950 + seed, 0.6);
    const Vector v = bcd_row_update(a, x, 4);
    const Vector oracle = row_grid_oracle(a, x, 4, 4.0);
    CHECK((v - oracle).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("bcd row updates never increase the cost") {
  const Index n = 30;
  const Matrix a = sample_rdpg(Matrix::Constant(n, n, 0.4), false, 41).entries;
  const Matrix m = hollow_mask(n, false).entries;
  Matrix x = random_matrix(n, 2, 42, 0.4);
  double cost = cost_undirected(a, m, x);
  for (Index i = 0; i < n; ++i) {
    x.row(i) = bcd_row_update(a, x, i).transpose();
    const double next = cost_undirected(a, m, x);
    CHECK(next <= cost + 1e-10 * (1.0 + cost));
    cost = next;
  }
}

TEST_CASE("solve_bcd converges in one cycle from an exact fit") {
  SolverConfig cfg;
  cfg.d = 1;
  cfg.init = Init::warm;
  cfg.warm = Matrix::Ones(3, 1);
  const auto [x, report] = solve_bcd(triangle(), cfg);
  CHECK(report.converged);
  CHECK(report.iterations == 1);
  CHECK(report.final_cost <= 1e-24);  // exact fit up to one linear solve
}

TEST_CASE("solve_bcd per-cycle trace is non-increasing") {
  const SbmConfig cfg = two_block_config(200, 0.5, 0.2, 29);
  const Matrix a = sample_rdpg(sbm_probability(cfg), false, 29).entries;
  SolverConfig sc;
  sc.d = 2;
  sc.record_trace = true;
  const auto [x, report] = solve_bcd(a, sc);
  REQUIRE(report.trace.size() >= 2);
  for (size_t k = 1; k < report.trace.size(); ++k) {
    CHECK(report.trace[k] <= report.trace[k - 1] + 1e-12);
  }
  CHECK(report.converged);
}

TEST_CASE("solve_bcd agrees with solve_gd on a large instance") {
  const SbmConfig cfg = two_block_config(1000, 0.5, 0.2, 31);
  const Matrix a = sample_rdpg(sbm_probability(cfg), false, 31).entries;
  SolverConfig sc;
  sc.d = 2;
  sc.tol_rel_cost = 1e-11;
  sc.max_iters = 3000;
  const auto [x_gd, rep_gd] = solve_gd(a, hollow_mask(1000, false).entries, sc);
  const auto [x_bcd, rep_bcd] = solve_bcd(a, sc);
  CHECK(std::abs(rep_gd.final_cost - rep_bcd.final_cost) <=
        1e-6 * rep_gd.final_cost);
}

TEST_CASE("solve_bcd survives rank collapse with a warning") {
  SolverConfig cfg;
  cfg.d = 2;
  cfg.init = Init::warm;
  cfg.warm = random_matrix(6, 2, 71);
  const auto [x, report] = solve_bcd(Matrix::Zero(6, 6), cfg);
  CHECK(report.final_cost == 0.0);
  CHECK(x.cwiseAbs().maxCoeff() == 0.0);  // empty graph embeds at the origin
  CHECK(report.warnings > 0);
}

TEST_CASE("elbow_dimension finds planted ranks") {
  SbmConfig cfg = two_block_config(300, 0.9, 0.05, 37);
  cfg.sizes = {150, 150};  // balanced blocks separate the two signal eigenvalues
  const Matrix a2 = sample_rdpg(sbm_probability(cfg), false, 37).entries;
  CHECK(elbow_dimension(a2, 8) == 2);

  const Matrix a1 = sample_rdpg(er_probability(300, 0.3), false, 38).entries;
  CHECK(elbow_dimension(a1, 8) == 1);

  CHECK(elbow_dimension(Matrix::Zero(10, 10), 5) == 1);
}
