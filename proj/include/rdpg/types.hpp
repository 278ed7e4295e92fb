#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rdpg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Square matrix of observed edge weights (binary for unweighted graphs).
// Diagonal is always zero; symmetric when undirected.
struct AdjacencyMatrix {
  Matrix entries;
  bool directed = false;

  Index n() const { return entries.rows(); }
};

// Binary matrix marking which adjacency entries are observed. Zero diagonal;
// symmetric when undirected. The default is the hollow all-ones matrix.
struct ObservationMask {
  Matrix entries;
  bool directed = false;

  Index n() const { return entries.rows(); }
};

// Stochastic block model: community sizes and inter-community probabilities.
struct SbmConfig {
  std::vector<int> sizes;
  Matrix pi;  // K x K, entries in [0, 1]
  bool directed = false;
  std::uint64_t seed = 0;
};

// N x d latent positions, one row per node. node_ids maps rows to external
// ids; it may be empty for anonymous (index-labeled) rows.
struct EmbeddingMatrix {
  Matrix x;
  std::vector<std::string> node_ids;

  Index n() const { return x.rows(); }
  Index d() const { return x.cols(); }
};

// Embedding pair for digraphs: x_out holds the outgoing (left) positions,
// x_in the incoming (right) positions.
struct DirectedEmbedding {
  Matrix x_out;
  Matrix x_in;
  std::vector<std::string> node_ids;

  Index n() const { return x_out.rows(); }
  Index d() const { return x_out.cols(); }
};

enum class Init { spectral, random, warm };

struct SolverConfig {
  int d = 2;
  int max_iters = 500;
  double tol_rel_cost = 1e-7;  // stop when the relative cost decrease of one
                               // iteration (or cycle) falls below this
  double step_size = 0.0;      // GD stepsize; 0 selects 1/(8 lambda_max(A))
  Init init = Init::spectral;
  double random_scale = 0.0;  // random init scale; 0 selects a degree-based one
  std::uint64_t seed = 0;
  std::optional<Matrix> warm;     // warm init (left factor for digraphs)
  std::optional<Matrix> warm_in;  // warm init, incoming factor (digraphs only)
  bool record_trace = false;
};

// Backtracking line search parameters for the Riemannian solver.
struct ArmijoConfig {
  double initial_step = 1.0;
  double backtrack = 0.5;            // step shrink factor, in (0,1)
  double sufficient_decrease = 1e-4; // Armijo constant, in (0,1)
  int max_backtracks = 30;
};

struct SolveReport {
  double final_cost = 0.0;
  int iterations = 0;
  bool converged = false;
  int warnings = 0;  // ridge fallbacks and similar recoverable events
  std::vector<double> trace;  // cost per iteration, starting at the initial point
  double feasibility_max = 0.0;   // Riemannian runs: worst relative Gram off-diagonal seen
  int line_search_failures = 0;   // Riemannian runs: exhausted backtracking searches
};

}  // namespace rdpg
