#pragma once

#include "rdpg/types.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace rdpg {

// A loaded graph: adjacency plus the node-id table in first-appearance order.
struct Graph {
  AdjacencyMatrix adjacency;
  std::vector<std::string> node_ids;

  Index n() const { return adjacency.n(); }
  std::unordered_map<std::string, Index> id_index() const;
};

// Edge-list file: one edge per line, `src<TAB>dst[<TAB>weight]`, weight
// defaulting to 1. Node ids are arbitrary strings mapped to dense indices in
// first-appearance order. Lines starting with '#' are skipped. Undirected
// loads mirror each edge and reject conflicting weights; self loops are
// rejected (graphs have no self loops).
Graph read_edge_list(const std::string& path, bool directed);

// Writes one line per edge (upper triangle only for undirected graphs); the
// weight column is omitted when the weight is exactly 1.
void write_edge_list(const std::string& path, const Graph& graph);

// Mask file: same line format, listing the UNOBSERVED pairs. The result is
// the hollow mask with those entries (and their mirrors, when undirected)
// zeroed. Ids must exist in the graph's table.
ObservationMask read_mask(const std::string& path, const Graph& graph);
void write_mask(const std::string& path, const ObservationMask& mask,
                const std::vector<std::string>& node_ids);

// Embedding CSV with header `node_id,dim_0,...,dim_{d-1}`.
EmbeddingMatrix read_embedding_csv(const std::string& path);
void write_embedding_csv(const std::string& path, const EmbeddingMatrix& embedding);

// Dense matrix as comma-separated rows (no header).
Matrix read_dense_csv(const std::string& path);
void write_dense_csv(const std::string& path, const Matrix& m);

// Cost trace CSV: header `iter,cost`.
void write_trace_csv(const std::string& path, const std::vector<double>& trace);

// SolveReport JSON: {final_cost, iters, converged, warnings, ...}.
void write_report_json(const std::string& path, const SolveReport& report);

// One step of a snapshot stream on disk. Paths are resolved relative to the
// manifest location. Empty strings mean "not present".
struct SnapshotEntry {
  int t = 0;
  std::string edges;
  std::string mask;
  std::string prob;                    // optional true probability matrix
  std::vector<std::string> node_ids;   // explicit node set; derived from the
                                       // edge file when empty
};

// Manifest: either a JSON index {"snapshots": [{t, edges, mask?, prob?,
// nodes?}, ...]} or a directory with one subdirectory per step containing
// edges.tsv (and optional mask.tsv, prob.csv, nodes.txt).
std::vector<SnapshotEntry> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<SnapshotEntry>& entries);

}  // namespace rdpg
