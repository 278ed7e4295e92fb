#include "rdpg/streaming.hpp"

#include "rdpg/embed_directed.hpp"
#include "rdpg/embed_undirected.hpp"
#include "rdpg/errors.hpp"
#include "rdpg/generators.hpp"
#include "rdpg/manifold.hpp"
#include "rdpg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rdpg {

namespace {

Index find_node(const TrackerState& state, const std::string& id) {
  const auto it = std::find(state.node_ids.begin(), state.node_ids.end(), id);
  if (it == state.node_ids.end()) {
    throw NodeLookupError("tracker: unknown node id '" + id + "'");
  }
  return static_cast<Index>(it - state.node_ids.begin());
}

Matrix drop_row_col(const Matrix& m, Index k) {
  const Index n = m.rows();
  Matrix out(n - 1, n - 1);
  for (Index i = 0, oi = 0; i < n; ++i) {
    if (i == k) continue;
    for (Index j = 0, oj = 0; j < n; ++j) {
      if (j == k) continue;
      out(oi, oj) = m(i, j);
      ++oj;
    }
    ++oi;
  }
  return out;
}

Matrix drop_row(const Matrix& m, Index k) {
  Matrix out(m.rows() - 1, m.cols());
  out.topRows(k) = m.topRows(k);
  out.bottomRows(m.rows() - 1 - k) = m.bottomRows(m.rows() - 1 - k);
  return out;
}

Matrix append_row(const Matrix& m, const Vector& row) {
  Matrix out(m.rows() + 1, m.cols());
  out.topRows(m.rows()) = m;
  out.row(m.rows()) = row.transpose();
  return out;
}

// Grow a square matrix by one node, filling the new row/column from the
// incoming snapshot (there is no history to average for a new node).
Matrix grow_square(const Matrix& m, const Vector& outgoing, const Vector& incoming) {
  const Index n = m.rows();
  Matrix out(n + 1, n + 1);
  out.topLeftCorner(n, n) = m;
  out.block(n, 0, 1, n) = outgoing.transpose();
  out.block(0, n, n, 1) = incoming;
  out(n, n) = 0.0;
  return out;
}

Vector ridge_ls(const Matrix& x_ref, const Vector& incidence, int* warnings) {
  const Matrix gram = x_ref.transpose() * x_ref;
  const Vector rhs = x_ref.transpose() * incidence;
  try {
    return solve_spd(gram, rhs);
  } catch (const SingularSystemError&) {
    if (warnings != nullptr) ++*warnings;
    Matrix damped = gram;
    damped.diagonal().array() +=
        std::max(1e-8 * gram.trace() / std::max<Index>(1, gram.rows()), 1e-12);
    try {
      return solve_spd(damped, rhs);
    } catch (const SingularSystemError&) {
      return Vector::Zero(x_ref.cols());
    }
  }
}

}  // namespace

const Matrix& filter_step(FilterState& state, const Matrix& a_t) {
  if (state.primed && (state.b.rows() != a_t.rows() || state.b.cols() != a_t.cols())) {
    throw ShapeError("filter_step: snapshot size does not match the filter state");
  }
  switch (state.config.mode) {
    case FilterMode::passthrough:
      state.b = a_t;
      break;
    case FilterMode::moving_average: {
      if (state.config.window < 1) throw ConfigError("filter: window must be >= 1");
      state.history.push_back(a_t);
      while (static_cast<int>(state.history.size()) > state.config.window) {
        state.history.pop_front();
      }
      Matrix sum = Matrix::Zero(a_t.rows(), a_t.cols());
      for (const Matrix& h : state.history) sum += h;
      state.b = sum / static_cast<double>(state.history.size());
      break;
    }
    case FilterMode::single_pole: {
      const double beta = state.config.pole;
      if (beta <= 0.0 || beta >= 1.0) throw ConfigError("filter: pole must be in (0,1)");
      if (!state.primed) {
        state.b = a_t;  // B_0 = A_0 keeps constant streams fixed points
      } else {
        state.b = beta * state.b + (1.0 - beta) * a_t;
      }
      break;
    }
  }
  state.primed = true;
  return state.b;
}

TrackerState make_tracker(const TrackerConfig& config, EmbeddingMatrix init) {
  TrackerState s;
  s.config = config;
  s.filter.config = config.filter;
  s.node_ids = std::move(init.node_ids);
  if (s.node_ids.empty()) {
    for (Index i = 0; i < init.x.rows(); ++i) s.node_ids.push_back(std::to_string(i));
  }
  s.x = std::move(init.x);
  s.directed = false;
  return s;
}

TrackerState make_tracker(const TrackerConfig& config, DirectedEmbedding init) {
  TrackerState s;
  s.config = config;
  s.filter.config = config.filter;
  s.node_ids = std::move(init.node_ids);
  if (s.node_ids.empty()) {
    for (Index i = 0; i < init.x_out.rows(); ++i) s.node_ids.push_back(std::to_string(i));
  }
  s.x = std::move(init.x_out);
  s.x_in = std::move(init.x_in);
  s.directed = true;
  return s;
}

StepReport track_step(TrackerState& state, const Matrix& a_t, const Matrix& m_t) {
  if (a_t.rows() != state.n() || a_t.cols() != state.n() ||
      m_t.rows() != state.n() || m_t.cols() != state.n()) {
    throw ShapeError("track_step: snapshot size does not match the tracker "
                     "(apply add_node/remove_node first)");
  }
  const Matrix& b = filter_step(state.filter, a_t);
  StepReport report;

  if (state.directed) {
    const double alpha = state.config.step_size > 0.0 ? state.config.step_size : 0.01;
    Matrix x_out = state.x;
    Matrix x_in = state.x_in;
    const double f0 = cost_directed(b, m_t, x_out, x_in);
    for (int k = 0; k < state.config.inner_steps; ++k) {
      const auto [g_out, g_in] = grad_directed(b, m_t, x_out, x_in);
      const Matrix t_out = project_tangent(x_out, g_out);
      const Matrix t_in = project_tangent(x_in, g_in);
      // Fixed-stepsize Riemannian step; shrink locally if the retraction
      // loses rank.
      double t = alpha;
      for (int shrink = 0; shrink < 30; ++shrink) {
        try {
          const Matrix next_out = retract(x_out, (-t) * t_out);
          const Matrix next_in = retract(x_in, (-t) * t_in);
          x_out = next_out;
          x_in = next_in;
          break;
        } catch (const RetractionError&) {
          t *= 0.5;
        }
      }
    }
    const double f = cost_directed(b, m_t, x_out, x_in);
    if (f0 > 0.0 && f > 1e3 * f0) {
      report.flagged = true;
      report.cost = f0;
      return report;
    }
    state.x = std::move(x_out);
    state.x_in = std::move(x_in);
    report.cost = f;
    return report;
  }

  if (state.config.method == TrackMethod::bcd) {
    const Matrix hollow = hollow_mask(state.n(), false).entries;
    if ((m_t - hollow).cwiseAbs().maxCoeff() > 0.0) {
      throw ConfigError("track_step: BCD tracking supports the hollow mask only");
    }
    SolverConfig cfg;
    cfg.d = static_cast<int>(state.x.cols());
    cfg.max_iters = state.config.inner_steps;
    cfg.tol_rel_cost = 1e-12;
    cfg.init = Init::warm;
    cfg.warm = state.x;
    auto [x, rep] = solve_bcd(b, cfg);
    state.x = std::move(x);
    report.cost = rep.final_cost;
    report.warnings = rep.warnings;
    return report;
  }

  // Plain warm-restarted gradient descent.
  const double alpha =
      state.config.step_size > 0.0 ? state.config.step_size : default_step_size(b);
  Matrix x = state.x;
  const double f0 = cost_undirected(b, m_t, x);
  for (int k = 0; k < state.config.inner_steps; ++k) {
    x -= alpha * grad_undirected(b, m_t, x);
  }
  const double f = cost_undirected(b, m_t, x);
  if (f0 > 0.0 && f > 1e3 * f0) {
    report.flagged = true;  // divergent inner run: keep the previous state
    report.cost = f0;
    return report;
  }
  state.x = std::move(x);
  report.cost = f;
  return report;
}

Vector least_squares_embedding(const Matrix& x_ref, const Vector& incidence) {
  if (x_ref.rows() != incidence.size()) {
    throw ShapeError("least_squares_embedding: incidence length must equal N");
  }
  return ridge_ls(x_ref, incidence, nullptr);
}

void add_node(TrackerState& state, const std::string& id, const Vector& incidence) {
  if (state.directed) {
    throw ConfigError("add_node: directed trackers need outgoing and incoming vectors");
  }
  if (incidence.size() != state.n()) {
    throw ShapeError("add_node: incidence length must equal the current node count");
  }
  int warnings = 0;
  const Vector theta = ridge_ls(state.x, incidence, &warnings);
  state.x = append_row(state.x, theta);
  state.node_ids.push_back(id);
  if (state.filter.primed) {
    state.filter.b = grow_square(state.filter.b, incidence, incidence);
    for (Matrix& h : state.filter.history) h = grow_square(h, incidence, incidence);
  }
}

void add_node(TrackerState& state, const std::string& id, const Vector& outgoing,
              const Vector& incoming) {
  if (!state.directed) {
    throw ConfigError("add_node: undirected trackers take a single incidence vector");
  }
  if (outgoing.size() != state.n() || incoming.size() != state.n()) {
    throw ShapeError("add_node: incidence length must equal the current node count");
  }
  // Outgoing positions are regressed on the incoming factor and vice versa,
  // mirroring A(new, j) ~ x_out(new)^T x_in(j).
  const Vector theta_out = ridge_ls(state.x_in, outgoing, nullptr);
  const Vector theta_in = ridge_ls(state.x, incoming, nullptr);
  state.x = append_row(state.x, theta_out);
  state.x_in = append_row(state.x_in, theta_in);
  state.node_ids.push_back(id);
  if (state.filter.primed) {
    state.filter.b = grow_square(state.filter.b, outgoing, incoming);
    for (Matrix& h : state.filter.history) h = grow_square(h, outgoing, incoming);
  }
}

void remove_node(TrackerState& state, const std::string& id) {
  const Index k = find_node(state, id);
  state.x = drop_row(state.x, k);
  if (state.directed) state.x_in = drop_row(state.x_in, k);
  state.node_ids.erase(state.node_ids.begin() + k);
  if (state.filter.primed) {
    state.filter.b = drop_row_col(state.filter.b, k);
    for (Matrix& h : state.filter.history) h = drop_row_col(h, k);
  }
}

double tracking_error(const Matrix& x, const Matrix& p, bool normalized) {
  if (p.rows() != x.rows() || p.cols() != x.rows()) {
    throw ShapeError("tracking_error: P must be N x N");
  }
  const double err = (x * x.transpose() - p).norm();
  return normalized ? err / std::sqrt(static_cast<double>(x.rows())) : err;
}

}  // namespace rdpg
