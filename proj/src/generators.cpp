#include "rdpg/generators.hpp"

#include "rdpg/errors.hpp"
#include "rdpg/numerics.hpp"
#include "rdpg/random.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace rdpg {

namespace {

void check_probabilities(const Matrix& p, const char* who) {
  if ((p.array() < 0.0).any() || (p.array() > 1.0).any()) {
    throw DomainError(std::string(who) + ": probabilities must lie in [0, 1]");
  }
}

}  // namespace

ObservationMask hollow_mask(Index n, bool directed) {
  if (n < 1) throw ShapeError("hollow_mask: need n >= 1");
  ObservationMask m;
  m.entries = Matrix::Ones(n, n);
  m.entries.diagonal().setZero();
  m.directed = directed;
  return m;
}

AdjacencyMatrix sample_rdpg(const Matrix& p, bool directed, std::uint64_t seed) {
  if (p.rows() != p.cols()) throw ShapeError("sample_rdpg: P must be square");
  check_probabilities(p, "sample_rdpg");
  const Index n = p.rows();
  if (!directed && (p - p.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw ShapeError("sample_rdpg: undirected P must be symmetric");
  }

  Rng rng(seed);
  AdjacencyMatrix a;
  a.entries = Matrix::Zero(n, n);
  a.directed = directed;
  if (directed) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (i == j) continue;
        a.entries(i, j) = rng.bernoulli(p(i, j)) ? 1.0 : 0.0;
      }
    }
  } else {
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const double v = rng.bernoulli(p(i, j)) ? 1.0 : 0.0;
        a.entries(i, j) = v;
        a.entries(j, i) = v;
      }
    }
  }
  return a;
}

std::vector<int> sbm_assignments(const std::vector<int>& sizes) {
  std::vector<int> labels;
  for (size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c] <= 0) throw ConfigError("sbm: community sizes must be positive");
    labels.insert(labels.end(), static_cast<size_t>(sizes[c]), static_cast<int>(c));
  }
  return labels;
}

Matrix sbm_probability(const SbmConfig& cfg) {
  const auto k = static_cast<Index>(cfg.sizes.size());
  if (cfg.pi.rows() != k || cfg.pi.cols() != k) {
    throw ShapeError("sbm_probability: pi must be K x K with K = |sizes|");
  }
  check_probabilities(cfg.pi, "sbm_probability");
  if (!cfg.directed && (cfg.pi - cfg.pi.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw ShapeError("sbm_probability: undirected pi must be symmetric");
  }
  const std::vector<int> labels = sbm_assignments(cfg.sizes);
  const auto n = static_cast<Index>(labels.size());
  Matrix p(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      p(i, j) = cfg.pi(labels[static_cast<size_t>(i)], labels[static_cast<size_t>(j)]);
    }
  }
  return p;
}

Matrix sbm_latent_positions(const SbmConfig& cfg, int d) {
  const auto k = static_cast<int>(cfg.sizes.size());
  if (d < 1 || d > k) {
    throw DimensionError("sbm_latent_positions: need 1 <= d <= K");
  }
  if (cfg.directed) {
    throw ConfigError("sbm_latent_positions: undirected configurations only");
  }
  // Factor pi = W W^T through its top-d eigenpairs; rows of W are the
  // per-community positions.
  const SpectralPair top = top_eigen(cfg.pi, d, EigenOrder::algebraic);
  if (top.values[d - 1] < -1e-12) {
    throw DimensionError("sbm_latent_positions: pi has fewer than d nonnegative eigenvalues");
  }
  Matrix w = top.vectors * top.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  const std::vector<int> labels = sbm_assignments(cfg.sizes);
  Matrix x(static_cast<Index>(labels.size()), d);
  for (Index i = 0; i < x.rows(); ++i) {
    x.row(i) = w.row(labels[static_cast<size_t>(i)]);
  }
  return x;
}

Matrix er_probability(Index n, double p) {
  if (n < 1) throw ShapeError("er_probability: need n >= 1");
  if (p < 0.0 || p > 1.0) throw DomainError("er_probability: p must lie in [0, 1]");
  return Matrix::Constant(n, n, p);
}

Matrix senate_default_pi() {
  Matrix pi = Matrix::Zero(5, 5);
  pi(0, 2) = 0.9;
  pi(0, 3) = 0.01;
  pi(0, 4) = 0.2;
  pi(1, 2) = 0.1;
  pi(1, 3) = 0.8;
  pi(1, 4) = 0.3;
  return pi;
}

AdjacencyMatrix senate_graph(int party1_senators, int party2_senators,
                             const std::array<int, 3>& laws_by_class,
                             const Matrix& pi, std::uint64_t seed) {
  if (pi.rows() != 5 || pi.cols() != 5) {
    throw ShapeError("senate_graph: pi must be 5 x 5");
  }
  check_probabilities(pi, "senate_graph");
  // Only senators (communities 0-1) vote, and only laws (2-4) receive votes.
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) {
      const bool allowed = i < 2 && j >= 2;
      if (!allowed && pi(i, j) != 0.0) {
        throw DomainError("senate_graph: pi may only be nonzero on the senator->law block");
      }
    }
  }
  SbmConfig cfg;
  cfg.sizes = {party1_senators, party2_senators, laws_by_class[0],
               laws_by_class[1], laws_by_class[2]};
  cfg.pi = pi;
  cfg.directed = true;
  cfg.seed = seed;
  return sample_rdpg(sbm_probability(cfg), /*directed=*/true, seed);
}

std::vector<int> dynamic_sbm_step(const std::vector<int>& labels,
                                  int num_communities, std::uint64_t seed) {
  if (num_communities < 2) {
    throw ConfigError("dynamic_sbm_step: need at least two communities");
  }
  if (labels.empty()) throw ConfigError("dynamic_sbm_step: empty label vector");
  for (int l : labels) {
    if (l < 0 || l >= num_communities) {
      throw DomainError("dynamic_sbm_step: label outside [0, K)");
    }
  }
  Rng rng(seed);
  std::vector<int> next = labels;
  const auto node = static_cast<size_t>(rng.uniform_int(labels.size()));
  // Uniform over the K-1 other communities.
  auto offset = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(num_communities - 1)));
  if (offset >= labels[node]) ++offset;
  next[node] = offset;
  return next;
}

}  // namespace rdpg
