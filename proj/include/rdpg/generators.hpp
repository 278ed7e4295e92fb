#pragma once

#include "rdpg/types.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace rdpg {

// All-ones mask with a zero diagonal (the default observation pattern for
// graphs without self loops).
ObservationMask hollow_mask(Index n, bool directed);

// Independent Bernoulli draw per off-diagonal entry of p. Undirected graphs
// draw each unordered pair once and mirror it, so symmetry is exact.
// Deterministic given the seed.
AdjacencyMatrix sample_rdpg(const Matrix& p, bool directed, std::uint64_t seed);

// Community labels implied by cfg.sizes, in block order.
std::vector<int> sbm_assignments(const std::vector<int>& sizes);

// Block-constant probability matrix P_ij = pi[c(i), c(j)] (diagonal included;
// zeroing it is the sampler's job).
Matrix sbm_probability(const SbmConfig& cfg);

// Latent positions realizing an undirected SBM: row i is the d-dimensional
// position of node i, with X X^T equal to sbm_probability(cfg). Requires a
// symmetric pi with at least d nonnegative eigenvalues.
Matrix sbm_latent_positions(const SbmConfig& cfg, int d);

// Constant-p probability matrix (Erdos-Renyi).
Matrix er_probability(Index n, double p);

// Bipartite senator/law digraph. Communities are ordered as: party-1
// senators, party-2 senators, party-1 laws, party-2 laws, bipartisan laws.
// pi must be 5x5 and may only be nonzero on the senator->law block.
AdjacencyMatrix senate_graph(int party1_senators, int party2_senators,
                             const std::array<int, 3>& laws_by_class,
                             const Matrix& pi, std::uint64_t seed);

// The 5x5 voting-probability matrix of the polarized two-party setup used as
// the generator default (50/50 senators; 50/200/40 laws).
Matrix senate_default_pi();

// Move exactly one uniformly chosen node to a uniformly chosen different
// community. Deterministic given the seed.
std::vector<int> dynamic_sbm_step(const std::vector<int>& labels,
                                  int num_communities, std::uint64_t seed);

}  // namespace rdpg
