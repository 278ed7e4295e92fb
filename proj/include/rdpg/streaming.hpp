#pragma once

#include "rdpg/types.hpp"

#include <deque>
#include <string>

namespace rdpg {

enum class FilterMode { passthrough, moving_average, single_pole };

struct FilterConfig {
  FilterMode mode = FilterMode::passthrough;
  int window = 1;     // moving-average length m
  double pole = 0.9;  // single-pole coefficient beta in (0,1)
};

// Entry-wise adjacency filter: B_t is a moving average of the last m
// snapshots, the exponential average B_t = beta B_{t-1} + (1-beta) A_t with
// B_0 = A_0, or the raw input.
struct FilterState {
  FilterConfig config;
  Matrix b;
  std::deque<Matrix> history;  // moving-average window
  bool primed = false;
};

const Matrix& filter_step(FilterState& state, const Matrix& a_t);

enum class TrackMethod { gd, bcd, riemannian_gd };

struct TrackerConfig {
  TrackMethod method = TrackMethod::gd;
  int d = 2;
  int inner_steps = 10;   // solver iterations (or BCD cycles) per snapshot
  double step_size = 0.0; // gd: 0 selects 1/(4 lambda_max) per snapshot;
                          // riemannian_gd: 0 selects the fixed 0.01
  FilterConfig filter;
};

// Online tracker: one embedding refined across a snapshot stream by
// warm-restarted solver iterations. Owned by a single consumer; steps are
// strictly sequential.
struct TrackerState {
  TrackerConfig config;
  FilterState filter;
  std::vector<std::string> node_ids;
  bool directed = false;
  Matrix x;     // undirected embedding, or the outgoing factor
  Matrix x_in;  // incoming factor (directed only)

  Index n() const { return x.rows(); }
};

struct StepReport {
  double cost = 0.0;    // masked cost on the filtered matrix after the update
  bool flagged = false; // solver diverged; the previous state was kept
  int warnings = 0;
};

TrackerState make_tracker(const TrackerConfig& config, EmbeddingMatrix init);
TrackerState make_tracker(const TrackerConfig& config, DirectedEmbedding init);

// Filter the snapshot, then run the configured warm-restarted inner
// iterations. Node additions/removals must be applied beforehand.
StepReport track_step(TrackerState& state, const Matrix& a_t, const Matrix& m_t);

// Least-squares embedding of a new node's incidence vector against fixed
// reference positions: argmin_theta ||a - X theta||_2.
Vector least_squares_embedding(const Matrix& x_ref, const Vector& incidence);

// Append a node, initialized by least_squares_embedding; the filter state
// gains a row/column holding the incoming snapshot's values.
void add_node(TrackerState& state, const std::string& id, const Vector& incidence);
void add_node(TrackerState& state, const std::string& id, const Vector& outgoing,
              const Vector& incoming);

// Drop a node's embedding row and its filter row/column.
void remove_node(TrackerState& state, const std::string& id);

// ||X X^T - P||_F, divided by sqrt(N) when normalized.
double tracking_error(const Matrix& x, const Matrix& p, bool normalized);

}  // namespace rdpg
