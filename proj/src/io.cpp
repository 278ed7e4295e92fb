#include "rdpg/io.hpp"

#include "rdpg/errors.hpp"
#include "rdpg/generators.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rdpg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

double parse_weight(const std::string& s, const std::string& path, int lineno) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ":" + std::to_string(lineno) + ": bad weight '" + s + "'");
  }
}

struct RawEdge {
  std::string src;
  std::string dst;
  double weight;
};

std::pair<std::vector<RawEdge>, std::vector<std::string>> read_raw_edges(
    const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<RawEdge> edges;
  std::vector<std::string> ids;
  std::unordered_map<std::string, Index> seen;
  auto intern = [&](const std::string& id) {
    if (seen.emplace(id, static_cast<Index>(ids.size())).second) ids.push_back(id);
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty()) {
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": expected 'src<TAB>dst[<TAB>weight]'");
    }
    const double w = fields.size() == 3 ? parse_weight(fields[2], path, lineno) : 1.0;
    if (w < 0.0) {
      throw IoError(path + ":" + std::to_string(lineno) + ": negative weight");
    }
    if (fields[0] == fields[1]) {
      throw IoError(path + ":" + std::to_string(lineno) + ": self loops are not allowed");
    }
    intern(fields[0]);
    intern(fields[1]);
    edges.push_back({fields[0], fields[1], w});
  }
  return {std::move(edges), std::move(ids)};
}

}  // namespace

std::unordered_map<std::string, Index> Graph::id_index() const {
  std::unordered_map<std::string, Index> index;
  for (size_t i = 0; i < node_ids.size(); ++i) {
    index.emplace(node_ids[i], static_cast<Index>(i));
  }
  return index;
}

Graph read_edge_list(const std::string& path, bool directed) {
  auto [edges, ids] = read_raw_edges(path);
  if (ids.empty()) throw IoError(path + ": no edges found");
  Graph g;
  g.node_ids = std::move(ids);
  const auto n = static_cast<Index>(g.node_ids.size());
  g.adjacency.entries = Matrix::Zero(n, n);
  g.adjacency.directed = directed;
  const auto index = g.id_index();
  for (const RawEdge& e : edges) {
    const Index i = index.at(e.src);
    const Index j = index.at(e.dst);
    if (directed) {
      g.adjacency.entries(i, j) = e.weight;
    } else {
      const double old = g.adjacency.entries(i, j);
      if (old != 0.0 && old != e.weight) {
        throw IoError(path + ": conflicting weights for undirected edge " + e.src +
                      " -- " + e.dst);
      }
      g.adjacency.entries(i, j) = e.weight;
      g.adjacency.entries(j, i) = e.weight;
    }
  }
  return g;
}

void write_edge_list(const std::string& path, const Graph& graph) {
  std::ofstream out = open_output(path);
  const Matrix& a = graph.adjacency.entries;
  const Index n = a.rows();
  for (Index i = 0; i < n; ++i) {
    const Index j0 = graph.adjacency.directed ? 0 : i + 1;
    for (Index j = j0; j < n; ++j) {
      if (i == j || a(i, j) == 0.0) continue;
      out << graph.node_ids[static_cast<size_t>(i)] << '\t'
          << graph.node_ids[static_cast<size_t>(j)];
      if (a(i, j) != 1.0) out << '\t' << fmt17(a(i, j));
      out << '\n';
    }
  }
}

ObservationMask read_mask(const std::string& path, const Graph& graph) {
  ObservationMask m = hollow_mask(graph.n(), graph.adjacency.directed);
  auto [edges, ids] = read_raw_edges(path);
  const auto index = graph.id_index();
  for (const RawEdge& e : edges) {
    const auto si = index.find(e.src);
    const auto di = index.find(e.dst);
    if (si == index.end() || di == index.end()) {
      throw IoError(path + ": mask names unknown node '" +
                    (si == index.end() ? e.src : e.dst) + "'");
    }
    m.entries(si->second, di->second) = 0.0;
    if (!m.directed) m.entries(di->second, si->second) = 0.0;
  }
  return m;
}

void write_mask(const std::string& path, const ObservationMask& mask,
                const std::vector<std::string>& node_ids) {
  std::ofstream out = open_output(path);
  const Index n = mask.n();
  for (Index i = 0; i < n; ++i) {
    const Index j0 = mask.directed ? 0 : i + 1;
    for (Index j = j0; j < n; ++j) {
      if (i == j || mask.entries(i, j) != 0.0) continue;
      out << node_ids[static_cast<size_t>(i)] << '\t' << node_ids[static_cast<size_t>(j)]
          << '\n';
    }
  }
}

EmbeddingMatrix read_embedding_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty embedding file");
  strip_cr(line);
  std::vector<std::vector<double>> rows;
  EmbeddingMatrix e;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    if (!std::getline(ss, field, ',')) {
      throw IoError(path + ":" + std::to_string(lineno) + ": bad row");
    }
    e.node_ids.push_back(field);
    std::vector<double> row;
    while (std::getline(ss, field, ',')) {
      row.push_back(parse_weight(field, path, lineno));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError(path + ":" + std::to_string(lineno) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": embedding has no rows");
  e.x.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < e.x.rows(); ++i) {
    for (Index j = 0; j < e.x.cols(); ++j) {
      e.x(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
  }
  return e;
}

void write_embedding_csv(const std::string& path, const EmbeddingMatrix& embedding) {
  std::ofstream out = open_output(path);
  out << "node_id";
  for (Index j = 0; j < embedding.d(); ++j) out << ",dim_" << j;
  out << '\n';
  for (Index i = 0; i < embedding.n(); ++i) {
    out << (embedding.node_ids.empty() ? std::to_string(i)
                                       : embedding.node_ids[static_cast<size_t>(i)]);
    for (Index j = 0; j < embedding.d(); ++j) out << ',' << fmt17(embedding.x(i, j));
    out << '\n';
  }
}

Matrix read_dense_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> row;
    while (std::getline(ss, field, ',')) row.push_back(parse_weight(field, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError(path + ":" + std::to_string(lineno) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": empty matrix");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
  }
  return m;
}

void write_dense_csv(const std::string& path, const Matrix& m) {
  std::ofstream out = open_output(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << fmt17(m(i, j));
    }
    out << '\n';
  }
}

void write_trace_csv(const std::string& path, const std::vector<double>& trace) {
  std::ofstream out = open_output(path);
  out << "iter,cost\n";
  for (size_t k = 0; k < trace.size(); ++k) {
    out << k << ',' << fmt17(trace[k]) << '\n';
  }
}

void write_report_json(const std::string& path, const SolveReport& report) {
  json j;
  j["final_cost"] = report.final_cost;
  j["iters"] = report.iterations;
  j["converged"] = report.converged;
  j["warnings"] = report.warnings;
  if (report.feasibility_max > 0.0) j["feasibility_max"] = report.feasibility_max;
  if (report.line_search_failures > 0) {
    j["line_search_failures"] = report.line_search_failures;
  }
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

std::vector<SnapshotEntry> read_manifest(const std::string& path) {
  std::vector<SnapshotEntry> entries;
  if (fs::is_directory(path)) {
    // One subdirectory per step, sorted by name.
    std::vector<fs::path> dirs;
    for (const auto& de : fs::directory_iterator(path)) {
      if (de.is_directory()) dirs.push_back(de.path());
    }
    std::sort(dirs.begin(), dirs.end());
    int t = 0;
    for (const auto& dir : dirs) {
      SnapshotEntry e;
      e.t = t++;
      const auto edges = dir / "edges.tsv";
      if (!fs::exists(edges)) {
        throw IoError("manifest step '" + dir.string() + "' has no edges.tsv");
      }
      e.edges = edges.string();
      if (fs::exists(dir / "mask.tsv")) e.mask = (dir / "mask.tsv").string();
      if (fs::exists(dir / "prob.csv")) e.prob = (dir / "prob.csv").string();
      if (fs::exists(dir / "nodes.txt")) {
        std::ifstream in((dir / "nodes.txt").string());
        std::string id;
        while (std::getline(in, id)) {
          strip_cr(id);
          if (!id.empty()) e.node_ids.push_back(id);
        }
      }
      entries.push_back(std::move(e));
    }
    if (entries.empty()) throw IoError("manifest directory '" + path + "' has no steps");
    return entries;
  }

  std::ifstream in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(path + ": bad manifest JSON: " + e.what());
  }
  if (!j.contains("snapshots") || !j["snapshots"].is_array()) {
    throw IoError(path + ": manifest must contain a 'snapshots' array");
  }
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    return fs::path(p).is_absolute() ? p : (base / p).string();
  };
  for (const auto& s : j["snapshots"]) {
    SnapshotEntry e;
    if (!s.contains("t") || !s.contains("edges")) {
      throw IoError(path + ": each snapshot needs 't' and 'edges'");
    }
    e.t = s["t"].get<int>();
    e.edges = resolve(s["edges"].get<std::string>());
    if (s.contains("mask")) e.mask = resolve(s["mask"].get<std::string>());
    if (s.contains("prob")) e.prob = resolve(s["prob"].get<std::string>());
    if (s.contains("nodes")) e.node_ids = s["nodes"].get<std::vector<std::string>>();
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw IoError(path + ": manifest lists no snapshots");
  std::sort(entries.begin(), entries.end(),
            [](const SnapshotEntry& a, const SnapshotEntry& b) { return a.t < b.t; });
  return entries;
}

void write_manifest(const std::string& path, const std::vector<SnapshotEntry>& entries) {
  json snaps = json::array();
  const fs::path base = fs::path(path).parent_path();
  auto relativize = [&](const std::string& p) {
    std::error_code ec;
    const auto rel = fs::relative(p, base, ec);
    return ec ? p : rel.string();
  };
  for (const SnapshotEntry& e : entries) {
    json s;
    s["t"] = e.t;
    s["edges"] = relativize(e.edges);
    if (!e.mask.empty()) s["mask"] = relativize(e.mask);
    if (!e.prob.empty()) s["prob"] = relativize(e.prob);
    if (!e.node_ids.empty()) s["nodes"] = e.node_ids;
    snaps.push_back(std::move(s));
  }
  json j;
  j["snapshots"] = std::move(snaps);
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

}  // namespace rdpg
