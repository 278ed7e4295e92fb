// rdpg: command-line front end wiring the generators, solvers and trackers
// into reproducible experiment pipelines.
//
// Commands: generate, embed, track, eval, elbow. Every run that writes files
// also writes a provenance.json echoing the full configuration and seed, so
// any artifact can be regenerated bit-for-bit.

#include "rdpg/embed_directed.hpp"
#include "rdpg/embed_undirected.hpp"
#include "rdpg/errors.hpp"
#include "rdpg/generators.hpp"
#include "rdpg/io.hpp"
#include "rdpg/manifold.hpp"
#include "rdpg/numerics.hpp"
#include "rdpg/random.hpp"
#include "rdpg/streaming.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rdpg;

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string out = "rdpg_out";
  bool as_json = false;
  bool deterministic = false;
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "'");
}

void write_provenance(const std::string& dir, const std::string& command,
                      const json& config, const GlobalOpts& g) {
  json j;
  j["artifact_version"] = kVersion;
  j["command"] = command;
  j["seed"] = g.seed;
  j["deterministic"] = g.deterministic;
  j["config"] = config;
  std::ofstream out(fs::path(dir) / "provenance.json");
  out << j.dump(2) << '\n';
}

void emit_summary(const GlobalOpts& g, const json& summary) {
  if (g.as_json) {
    std::cout << summary.dump() << std::endl;
  }
}

std::vector<std::string> index_ids(Index n) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return ids;
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  for (int l : labels) out << l << '\n';
}

// ---------------------------------------------------------------- generate

struct GenerateOpts {
  // er
  int n = 100;
  double p = 0.1;
  int grow_steps = 0;
  // sbm / dynamic-sbm
  std::vector<int> sizes;
  int blocks = 0;
  double q = -1.0;
  std::string pi_file;
  std::vector<std::string> pi_list;
  int steps = 2;
  int flips = 1;
  bool emit_prob = false;
  // senate
  int party1 = 50;
  int party2 = 50;
  std::vector<int> laws = {50, 200, 40};
};

Matrix two_probability_matrix(const std::vector<int>& sizes, double p, double q) {
  const auto k = static_cast<Index>(sizes.size());
  Matrix pi = Matrix::Constant(k, k, q);
  pi.diagonal().setConstant(p);
  return pi;
}

void write_graph_files(const std::string& dir, const Matrix& a, bool directed,
                       const std::vector<std::string>& ids) {
  Graph g;
  g.adjacency.entries = a;
  g.adjacency.directed = directed;
  g.node_ids = ids;
  write_edge_list((fs::path(dir) / "edges.tsv").string(), g);
}

void write_nodes_file(const std::string& dir, const std::vector<std::string>& ids) {
  std::ofstream out(fs::path(dir) / "nodes.txt");
  for (const auto& id : ids) out << id << '\n';
}

int run_generate_er(const GlobalOpts& g, const GenerateOpts& o) {
  ensure_dir(g.out);
  json cfg{{"model", "er"}, {"n", o.n}, {"p", o.p}, {"grow_steps", o.grow_steps}};
  write_provenance(g.out, "generate", cfg, g);

  if (o.grow_steps == 0) {
    const Matrix p = er_probability(o.n, o.p);
    const AdjacencyMatrix a = sample_rdpg(p, false, g.seed);
    write_graph_files(g.out, a.entries, false, index_ids(o.n));
    if (o.emit_prob) write_dense_csv((fs::path(g.out) / "prob.csv").string(), p);
    emit_summary(g, {{"n", o.n}, {"edges", a.entries.sum() / 2.0}});
    return 0;
  }

  // Growing stream: the initial graph persists and each step appends one
  // node whose incidences are sampled once.
  const Index n_final = o.n + o.grow_steps;
  Rng rng(g.seed);
  Matrix a = Matrix::Zero(n_final, n_final);
  for (Index i = 0; i < o.n; ++i) {
    for (Index j = i + 1; j < o.n; ++j) {
      const double v = rng.bernoulli(o.p) ? 1.0 : 0.0;
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  std::vector<SnapshotEntry> entries;
  for (int t = 0; t <= o.grow_steps; ++t) {
    const Index nt = o.n + t;
    if (t > 0) {
      const Index newcomer = nt - 1;
      for (Index j = 0; j < newcomer; ++j) {
        const double v = rng.bernoulli(o.p) ? 1.0 : 0.0;
        a(newcomer, j) = v;
        a(j, newcomer) = v;
      }
    }
    char name[32];
    std::snprintf(name, sizeof(name), "t%04d", t);
    const std::string dir = (fs::path(g.out) / "steps" / name).string();
    ensure_dir(dir);
    const auto ids = index_ids(nt);
    write_graph_files(dir, a.topLeftCorner(nt, nt), false, ids);
    write_nodes_file(dir, ids);
    SnapshotEntry e;
    e.t = t;
    e.edges = (fs::path(dir) / "edges.tsv").string();
    e.node_ids = ids;
    if (o.emit_prob) {
      e.prob = (fs::path(dir) / "prob.csv").string();
      write_dense_csv(e.prob, er_probability(nt, o.p));
    }
    entries.push_back(std::move(e));
  }
  write_manifest((fs::path(g.out) / "manifest.json").string(), entries);
  emit_summary(g, {{"steps", o.grow_steps + 1}, {"n_final", n_final}});
  return 0;
}

Matrix load_pi(const GenerateOpts& o, size_t k) {
  if (!o.pi_file.empty()) return read_dense_csv(o.pi_file);
  if (o.p < 0.0 || o.q < 0.0) {
    throw ConfigError("generate sbm: provide --pi or both --p and --q");
  }
  return two_probability_matrix(std::vector<int>(k, 0), o.p, o.q);
}

int run_generate_sbm(const GlobalOpts& g, const GenerateOpts& o) {
  if (o.sizes.empty()) throw ConfigError("generate sbm: --sizes is required");
  if (o.blocks != 0 && o.blocks != static_cast<int>(o.sizes.size())) {
    throw ConfigError("generate sbm: --blocks disagrees with --sizes");
  }
  ensure_dir(g.out);
  SbmConfig cfg;
  cfg.sizes = o.sizes;
  cfg.pi = load_pi(o, o.sizes.size());
  cfg.directed = false;
  cfg.seed = g.seed;
  json jcfg{{"model", "sbm"}, {"sizes", o.sizes}, {"p", o.p}, {"q", o.q},
            {"pi_file", o.pi_file}};
  write_provenance(g.out, "generate", jcfg, g);

  const Matrix p = sbm_probability(cfg);
  const AdjacencyMatrix a = sample_rdpg(p, false, g.seed);
  write_graph_files(g.out, a.entries, false, index_ids(a.n()));
  write_labels((fs::path(g.out) / "communities.txt").string(),
               sbm_assignments(cfg.sizes));
  if (o.emit_prob) write_dense_csv((fs::path(g.out) / "prob.csv").string(), p);
  emit_summary(g, {{"n", a.n()}, {"edges", a.entries.sum() / 2.0}});
  return 0;
}

int run_generate_dynamic(const GlobalOpts& g, const GenerateOpts& o) {
  if (o.sizes.empty()) throw ConfigError("generate dynamic-sbm: --sizes is required");
  ensure_dir(g.out);
  json jcfg{{"model", "dynamic-sbm"}, {"sizes", o.sizes}, {"p", o.p}, {"q", o.q},
            {"steps", o.steps}, {"flips", o.flips}, {"pi_list", o.pi_list}};
  write_provenance(g.out, "generate", jcfg, g);

  std::vector<Matrix> pis;
  if (!o.pi_list.empty()) {
    for (const auto& f : o.pi_list) pis.push_back(read_dense_csv(f));
  } else {
    if (o.p < 0.0 || o.q < 0.0) {
      throw ConfigError("generate dynamic-sbm: provide --pi-list or --p/--q");
    }
    pis.push_back(two_probability_matrix(o.sizes, o.p, o.q));
  }

  const int steps = o.pi_list.empty() ? o.steps : static_cast<int>(pis.size());
  std::vector<int> labels = sbm_assignments(o.sizes);
  const int k = static_cast<int>(o.sizes.size());
  const auto ids = index_ids(static_cast<Index>(labels.size()));
  std::vector<SnapshotEntry> entries;
  for (int t = 0; t < steps; ++t) {
    if (o.pi_list.empty() && t > 0) {
      for (int f = 0; f < o.flips; ++f) {
        labels = dynamic_sbm_step(labels, k, g.seed + 7919ULL * t + f);
      }
    }
    SbmConfig cfg;
    cfg.sizes = o.sizes;  // sizes only set the node count here
    cfg.pi = o.pi_list.empty() ? pis[0] : pis[static_cast<size_t>(t)];
    const auto n = static_cast<Index>(labels.size());
    Matrix p(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        p(i, j) = cfg.pi(labels[static_cast<size_t>(i)], labels[static_cast<size_t>(j)]);
      }
    }
    // Zero flips with a fixed pi means a static stream: repeat one sample.
    const bool is_static = o.pi_list.empty() && o.flips == 0;
    const AdjacencyMatrix a =
        sample_rdpg(p, false, is_static ? g.seed : g.seed + 104729ULL * t);

    char name[32];
    std::snprintf(name, sizeof(name), "t%04d", t);
    const std::string dir = (fs::path(g.out) / "steps" / name).string();
    ensure_dir(dir);
    write_graph_files(dir, a.entries, false, ids);
    write_nodes_file(dir, ids);
    write_labels((fs::path(dir) / "communities.txt").string(), labels);
    SnapshotEntry e;
    e.t = t;
    e.edges = (fs::path(dir) / "edges.tsv").string();
    e.node_ids = ids;
    if (o.emit_prob) {
      e.prob = (fs::path(dir) / "prob.csv").string();
      write_dense_csv(e.prob, p);
    }
    entries.push_back(std::move(e));
  }
  write_manifest((fs::path(g.out) / "manifest.json").string(), entries);
  emit_summary(g, {{"steps", steps}, {"n", entries.empty() ? 0 : (int)labels.size()}});
  return 0;
}

int run_generate_senate(const GlobalOpts& g, const GenerateOpts& o) {
  if (o.laws.size() != 3) throw ConfigError("generate senate: --laws needs 3 sizes");
  ensure_dir(g.out);
  json jcfg{{"model", "senate"}, {"party1", o.party1}, {"party2", o.party2},
            {"laws", o.laws}, {"pi_file", o.pi_file}};
  write_provenance(g.out, "generate", jcfg, g);

  const Matrix pi = o.pi_file.empty() ? senate_default_pi() : read_dense_csv(o.pi_file);
  const std::array<int, 3> laws{o.laws[0], o.laws[1], o.laws[2]};
  const AdjacencyMatrix a = senate_graph(o.party1, o.party2, laws, pi, g.seed);
  write_graph_files(g.out, a.entries, true, index_ids(a.n()));
  std::vector<int> sizes{o.party1, o.party2, o.laws[0], o.laws[1], o.laws[2]};
  write_labels((fs::path(g.out) / "communities.txt").string(), sbm_assignments(sizes));
  emit_summary(g, {{"n", a.n()}, {"edges", a.entries.sum()}});
  return 0;
}

// ------------------------------------------------------------------- embed

struct EmbedOpts {
  std::string input;
  std::string method = "bcd";
  int d = 2;
  bool auto_elbow = false;
  int d_max = 10;
  std::string mask_file;
  bool directed = false;
  int max_iters = 500;
  double tol = 1e-7;
  double alpha = 0.0;
  std::string init = "spectral";
  std::string warm;
  std::string warm_in;
  bool trace = false;
  int replicates = 0;
};

int embed_exit_code(const SolveReport& report) { return report.converged ? 0 : 2; }

int run_embed_once(const GlobalOpts& g, const EmbedOpts& o, const std::string& out_dir,
                   std::uint64_t seed) {
  ensure_dir(out_dir);
  const bool directed = o.directed || o.method == "rgd";
  Graph graph = read_edge_list(o.input, directed);
  const Matrix& a = graph.adjacency.entries;
  const Matrix m = o.mask_file.empty()
                       ? hollow_mask(graph.n(), directed).entries
                       : read_mask(o.mask_file, graph).entries;

  int d = o.d;
  if (o.auto_elbow) {
    Matrix sym = directed ? Matrix(0.5 * (a + a.transpose())) : a;
    d = elbow_dimension(sym, std::min<Index>(o.d_max, graph.n()));
  }

  SolverConfig cfg;
  cfg.d = d;
  cfg.max_iters = o.max_iters;
  cfg.tol_rel_cost = o.tol;
  cfg.step_size = o.alpha;
  cfg.seed = seed;
  cfg.record_trace = o.trace;
  if (o.init == "spectral") {
    cfg.init = Init::spectral;
  } else if (o.init == "random") {
    cfg.init = Init::random;
  } else if (o.init == "warm") {
    cfg.init = Init::warm;
    if (o.warm.empty()) throw ConfigError("embed: --init warm needs --warm");
    cfg.warm = read_embedding_csv(o.warm).x;
    if (!o.warm_in.empty()) cfg.warm_in = read_embedding_csv(o.warm_in).x;
  } else {
    throw ConfigError("embed: unknown init '" + o.init + "'");
  }

  SolveReport report;
  json summary;
  if (o.method == "ase" && !directed) {
    EmbeddingMatrix e{ase(a, d), graph.node_ids};
    report.final_cost = cost_undirected(a, m, e.x);
    report.converged = true;
    write_embedding_csv((fs::path(out_dir) / "embedding.csv").string(), e);
  } else if (o.method == "ase") {
    DirectedEmbedding e = ase_directed(a, d);
    e.node_ids = graph.node_ids;
    report.final_cost = cost_directed(a, m, e.x_out, e.x_in);
    report.converged = true;
    write_embedding_csv((fs::path(out_dir) / "embedding_out.csv").string(),
                        {e.x_out, e.node_ids});
    write_embedding_csv((fs::path(out_dir) / "embedding_in.csv").string(),
                        {e.x_in, e.node_ids});
  } else if (o.method == "gd") {
    if (directed) throw ConfigError("embed: use --method rgd for digraphs");
    auto [x, rep] = solve_gd(a, m, cfg);
    report = rep;
    write_embedding_csv((fs::path(out_dir) / "embedding.csv").string(),
                        {std::move(x), graph.node_ids});
  } else if (o.method == "bcd") {
    if (directed) throw ConfigError("embed: use --method rgd for digraphs");
    if (!o.mask_file.empty()) {
      throw ConfigError("embed: BCD supports the hollow mask only; use --method gd");
    }
    auto [x, rep] = solve_bcd(a, cfg);
    report = rep;
    write_embedding_csv((fs::path(out_dir) / "embedding.csv").string(),
                        {std::move(x), graph.node_ids});
  } else if (o.method == "rgd") {
    auto [pair, rep] = solve_riemannian_gd(a, m, cfg);
    report = rep;
    DirectedEmbedding finalized = rescale_columns(pair.x_out, pair.x_in);
    write_embedding_csv((fs::path(out_dir) / "embedding_out.csv").string(),
                        {finalized.x_out, graph.node_ids});
    write_embedding_csv((fs::path(out_dir) / "embedding_in.csv").string(),
                        {finalized.x_in, graph.node_ids});
  } else {
    throw ConfigError("embed: unknown method '" + o.method + "'");
  }

  write_report_json((fs::path(out_dir) / "report.json").string(), report);
  if (o.trace && !report.trace.empty()) {
    write_trace_csv((fs::path(out_dir) / "trace.csv").string(), report.trace);
  }
  json jcfg{{"input", o.input},   {"method", o.method}, {"d", d},
            {"mask", o.mask_file}, {"init", o.init},     {"max_iters", o.max_iters},
            {"tol", o.tol},        {"alpha", o.alpha},   {"directed", directed}};
  GlobalOpts g_prov = g;
  g_prov.seed = seed;
  write_provenance(out_dir, "embed", jcfg, g_prov);
  summary = {{"final_cost", report.final_cost},
             {"iters", report.iterations},
             {"converged", report.converged},
             {"d", d},
             {"out", out_dir}};
  emit_summary(g, summary);
  return embed_exit_code(report);
}

int run_embed(const GlobalOpts& g, const EmbedOpts& o) {
  if (o.replicates <= 0) return run_embed_once(g, o, g.out, g.seed);

  // Independent seeded replicates fan out across workers; each run is
  // internally sequential.
  std::vector<int> codes(static_cast<size_t>(o.replicates), 0);
  std::vector<std::thread> workers;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<int> next{0};
  auto work = [&]() {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= o.replicates) return;
      const std::string dir = (fs::path(g.out) / ("rep_" + std::to_string(r))).string();
      try {
        GlobalOpts quiet = g;
        quiet.as_json = false;
        codes[static_cast<size_t>(r)] =
            run_embed_once(quiet, o, dir, g.seed + static_cast<std::uint64_t>(r));
      } catch (const std::exception& e) {
        std::cerr << "replicate " << r << ": " << e.what() << '\n';
        codes[static_cast<size_t>(r)] = 1;
      }
    }
  };
  const unsigned count = std::min<unsigned>(hw, static_cast<unsigned>(o.replicates));
  for (unsigned w = 0; w < count; ++w) workers.emplace_back(work);
  for (auto& w : workers) w.join();
  int worst = 0;
  for (int c : codes) worst = std::max(worst, c);
  emit_summary(g, {{"replicates", o.replicates}, {"worst_exit", worst}});
  return worst;
}

// ------------------------------------------------------------------- track

struct TrackOpts {
  std::string manifest;
  std::string method = "gd";
  int d = 2;
  int inner_steps = 10;
  double alpha = 0.0;
  std::string filter = "none";  // none | ma | pole
  int window = 5;
  double pole = 0.9;
  bool ls_baseline = false;
  int init_iters = 500;
};

struct SnapshotData {
  std::vector<std::string> ids;
  Matrix a;
  Matrix m;
  Matrix prob;  // empty when absent
};

SnapshotData load_snapshot(const SnapshotEntry& entry, bool directed) {
  Graph graph = read_edge_list(entry.edges, directed);
  SnapshotData s;
  s.ids = entry.node_ids.empty() ? graph.node_ids : entry.node_ids;
  const auto n = static_cast<Index>(s.ids.size());

  // Remap the edge file's first-appearance order onto the explicit node set
  // (isolated nodes have no edge lines).
  std::unordered_map<std::string, Index> pos;
  for (size_t i = 0; i < s.ids.size(); ++i) pos.emplace(s.ids[i], static_cast<Index>(i));
  const auto gidx = graph.id_index();
  s.a = Matrix::Zero(n, n);
  Matrix m_raw = entry.mask.empty() ? Matrix() : read_mask(entry.mask, graph).entries;
  s.m = hollow_mask(n, directed).entries;
  for (const auto& [id, gi] : gidx) {
    const auto it = pos.find(id);
    if (it == pos.end()) {
      throw IoError("node '" + id + "' in " + entry.edges + " is missing from the node set");
    }
    for (const auto& [id2, gj] : gidx) {
      const Index j = pos.at(id2);
      s.a(it->second, j) = graph.adjacency.entries(gi, gj);
      if (m_raw.size() != 0) s.m(it->second, j) = m_raw(gi, gj);
    }
  }
  if (!entry.prob.empty()) {
    s.prob = read_dense_csv(entry.prob);
    if (s.prob.rows() != n || s.prob.cols() != n) {
      throw IoError("prob matrix in '" + entry.prob + "' does not match the node set");
    }
  }
  return s;
}

int run_track(const GlobalOpts& g, const TrackOpts& o) {
  ensure_dir(g.out);
  const bool directed = o.method == "rgd";
  const auto entries = read_manifest(o.manifest);

  TrackerConfig tcfg;
  tcfg.d = o.d;
  tcfg.inner_steps = o.inner_steps;
  tcfg.step_size = o.alpha;
  if (o.method == "gd") {
    tcfg.method = TrackMethod::gd;
  } else if (o.method == "bcd") {
    tcfg.method = TrackMethod::bcd;
  } else if (o.method == "rgd") {
    tcfg.method = TrackMethod::riemannian_gd;
  } else {
    throw ConfigError("track: unknown method '" + o.method + "'");
  }
  if (o.filter == "none") {
    tcfg.filter.mode = FilterMode::passthrough;
  } else if (o.filter == "ma") {
    tcfg.filter.mode = FilterMode::moving_average;
    tcfg.filter.window = o.window;
  } else if (o.filter == "pole") {
    tcfg.filter.mode = FilterMode::single_pole;
    tcfg.filter.pole = o.pole;
  } else {
    throw ConfigError("track: unknown filter '" + o.filter + "'");
  }

  json jcfg{{"manifest", o.manifest}, {"method", o.method}, {"d", o.d},
            {"inner_steps", o.inner_steps}, {"alpha", o.alpha},
            {"filter", o.filter}, {"window", o.window}, {"pole", o.pole},
            {"ls_baseline", o.ls_baseline}};
  write_provenance(g.out, "track", jcfg, g);

  std::ofstream metrics(fs::path(g.out) / "metrics.csv");
  metrics << std::setprecision(17);
  metrics << "t,cost,error,error_normalized,n_nodes";
  if (o.ls_baseline) metrics << ",error_baseline_normalized";
  metrics << '\n';
  ensure_dir((fs::path(g.out) / "embeddings").string());

  std::optional<TrackerState> tracker;
  Matrix baseline_x;  // frozen-embedding comparison arm
  std::vector<std::string> baseline_ids;
  double last_cost = 0.0;

  for (size_t step = 0; step < entries.size(); ++step) {
    try {
      const SnapshotData snap = load_snapshot(entries[step], directed);
      StepReport rep;

      if (!tracker.has_value()) {
        SolverConfig scfg;
        scfg.d = o.d;
        scfg.max_iters = o.init_iters;
        scfg.seed = g.seed;
        if (directed) {
          auto [pair, r] = solve_riemannian_gd(snap.a, snap.m, scfg);
          pair.node_ids = snap.ids;
          tracker = make_tracker(tcfg, std::move(pair));
          rep.cost = r.final_cost;
        } else if (tcfg.method == TrackMethod::bcd) {
          auto [x, r] = solve_bcd(snap.a, scfg);
          tracker = make_tracker(tcfg, EmbeddingMatrix{std::move(x), snap.ids});
          rep.cost = r.final_cost;
        } else {
          auto [x, r] = solve_gd(snap.a, snap.m, scfg);
          tracker = make_tracker(tcfg, EmbeddingMatrix{std::move(x), snap.ids});
          rep.cost = r.final_cost;
        }
        filter_step(tracker->filter, snap.a);  // prime the filter with A_0
        if (o.ls_baseline && !directed) {
          baseline_x = tracker->x;
          baseline_ids = tracker->node_ids;
        }
      } else {
        // Reconcile the node sets, then run the warm-restarted step.
        std::unordered_map<std::string, Index> pos;
        for (size_t i = 0; i < snap.ids.size(); ++i) {
          pos.emplace(snap.ids[i], static_cast<Index>(i));
        }
        for (Index i = static_cast<Index>(tracker->node_ids.size()) - 1; i >= 0; --i) {
          if (!pos.count(tracker->node_ids[static_cast<size_t>(i)])) {
            remove_node(*tracker, tracker->node_ids[static_cast<size_t>(i)]);
          }
        }
        std::unordered_map<std::string, Index> have;
        for (size_t i = 0; i < tracker->node_ids.size(); ++i) {
          have.emplace(tracker->node_ids[i], static_cast<Index>(i));
        }
        for (const auto& id : snap.ids) {
          if (have.count(id)) continue;
          const Index col = pos.at(id);
          const Index cur = tracker->n();
          Vector outgoing(cur), incoming(cur);
          for (Index i = 0; i < cur; ++i) {
            const Index row = pos.at(tracker->node_ids[static_cast<size_t>(i)]);
            outgoing[i] = snap.a(col, row);
            incoming[i] = snap.a(row, col);
          }
          if (directed) {
            add_node(*tracker, id, outgoing, incoming);
          } else {
            add_node(*tracker, id, incoming);
          }
          have.emplace(id, tracker->n() - 1);
        }
        // Permute the snapshot into the tracker's row order.
        const auto nt = tracker->n();
        Matrix a_t(nt, nt), m_t(nt, nt);
        for (Index i = 0; i < nt; ++i) {
          const Index si = pos.at(tracker->node_ids[static_cast<size_t>(i)]);
          for (Index j = 0; j < nt; ++j) {
            const Index sj = pos.at(tracker->node_ids[static_cast<size_t>(j)]);
            a_t(i, j) = snap.a(si, sj);
            m_t(i, j) = snap.m(si, sj);
          }
        }
        rep = track_step(*tracker, a_t, m_t);

        if (o.ls_baseline && !directed) {
          // Frozen-embedding arm: existing rows never move; each new node is
          // embedded by least squares against them.
          for (const auto& id : snap.ids) {
            const auto it = std::find(baseline_ids.begin(), baseline_ids.end(), id);
            if (it != baseline_ids.end()) continue;
            const Index col = pos.at(id);
            Vector inc(baseline_x.rows());
            for (Index i = 0; i < baseline_x.rows(); ++i) {
              inc[i] = snap.a(pos.at(baseline_ids[static_cast<size_t>(i)]), col);
            }
            const Vector theta = least_squares_embedding(baseline_x, inc);
            baseline_x.conservativeResize(baseline_x.rows() + 1, Eigen::NoChange);
            baseline_x.row(baseline_x.rows() - 1) = theta.transpose();
            baseline_ids.push_back(id);
          }
        }
      }
      last_cost = rep.cost;

      // Per-step metrics; errors need the true probability matrix.
      double err = std::numeric_limits<double>::quiet_NaN();
      double err_n = err, err_b = err;
      if (snap.prob.size() != 0) {
        std::unordered_map<std::string, Index> pos;
        for (size_t i = 0; i < snap.ids.size(); ++i) {
          pos.emplace(snap.ids[i], static_cast<Index>(i));
        }
        const auto nt = tracker->n();
        Matrix p_t(nt, nt);
        for (Index i = 0; i < nt; ++i) {
          const Index si = pos.at(tracker->node_ids[static_cast<size_t>(i)]);
          for (Index j = 0; j < nt; ++j) {
            p_t(i, j) = snap.prob(si, pos.at(tracker->node_ids[static_cast<size_t>(j)]));
          }
        }
        if (directed) {
          const Matrix recon = tracker->x * tracker->x_in.transpose();
          err = (recon - p_t).norm();
          err_n = err / std::sqrt(static_cast<double>(nt));
        } else {
          err = tracking_error(tracker->x, p_t, false);
          err_n = tracking_error(tracker->x, p_t, true);
        }
        if (o.ls_baseline && !directed) {
          Matrix p_b(baseline_x.rows(), baseline_x.rows());
          for (Index i = 0; i < baseline_x.rows(); ++i) {
            const Index si = pos.at(baseline_ids[static_cast<size_t>(i)]);
            for (Index j = 0; j < baseline_x.rows(); ++j) {
              p_b(i, j) = snap.prob(si, pos.at(baseline_ids[static_cast<size_t>(j)]));
            }
          }
          err_b = tracking_error(baseline_x, p_b, true);
        }
      }

      metrics << entries[step].t << ',' << rep.cost << ',' << err << ',' << err_n << ','
              << tracker->n();
      if (o.ls_baseline) metrics << ',' << err_b;
      metrics << '\n';

      char name[48];
      std::snprintf(name, sizeof(name), "t%04d.csv", entries[step].t);
      write_embedding_csv((fs::path(g.out) / "embeddings" / name).string(),
                          {tracker->x, tracker->node_ids});
      if (directed) {
        std::snprintf(name, sizeof(name), "t%04d_in.csv", entries[step].t);
        write_embedding_csv((fs::path(g.out) / "embeddings" / name).string(),
                            {tracker->x_in, tracker->node_ids});
      }
    } catch (const Error& e) {
      throw IoError("track: step " + std::to_string(entries[step].t) + ": " + e.what());
    }
  }

  write_embedding_csv((fs::path(g.out) / "final.csv").string(),
                      {tracker->x, tracker->node_ids});
  if (directed) {
    write_embedding_csv((fs::path(g.out) / "final_in.csv").string(),
                        {tracker->x_in, tracker->node_ids});
  }
  emit_summary(g, {{"steps", entries.size()}, {"final_cost", last_cost},
                   {"n_final", tracker->n()}});
  return 0;
}

// -------------------------------------------------------------------- eval

struct EvalOpts {
  std::string x_file;
  std::string y_file;
  std::string graph;
  std::string mask_file;
  std::string prob;
};

int run_eval(const GlobalOpts& g, const EvalOpts& o) {
  const EmbeddingMatrix ex = read_embedding_csv(o.x_file);
  const EmbeddingMatrix ey = read_embedding_csv(o.y_file);
  if (ex.n() != ey.n()) throw ShapeError("eval: embeddings have different node counts");

  // Align y's rows to x's node order before comparing.
  std::unordered_map<std::string, Index> ypos;
  for (size_t i = 0; i < ey.node_ids.size(); ++i) {
    ypos.emplace(ey.node_ids[i], static_cast<Index>(i));
  }
  Matrix y(ey.n(), ey.d());
  for (Index i = 0; i < ex.n(); ++i) {
    const auto it = ypos.find(ex.node_ids[static_cast<size_t>(i)]);
    if (it == ypos.end()) {
      throw NodeLookupError("eval: node '" + ex.node_ids[static_cast<size_t>(i)] +
                            "' is missing from " + o.y_file);
    }
    y.row(i) = ey.x.row(it->second);
  }

  json out;
  out["procrustes_sq"] = procrustes_distance(ex.x, y).first;
  if (!o.graph.empty()) {
    Graph graph = read_edge_list(o.graph, false);
    if (graph.n() != ex.n()) throw ShapeError("eval: graph and embedding sizes differ");
    const Matrix m = o.mask_file.empty() ? hollow_mask(graph.n(), false).entries
                                         : read_mask(o.mask_file, graph).entries;
    // Rows of A follow the graph's id order; align to the embedding's.
    const auto gidx = graph.id_index();
    Matrix a(ex.n(), ex.n()), mm(ex.n(), ex.n());
    for (Index i = 0; i < ex.n(); ++i) {
      const auto it = gidx.find(ex.node_ids[static_cast<size_t>(i)]);
      if (it == gidx.end()) {
        throw NodeLookupError("eval: node '" + ex.node_ids[static_cast<size_t>(i)] +
                              "' is missing from " + o.graph);
      }
      for (Index j = 0; j < ex.n(); ++j) {
        const Index gj = gidx.at(ex.node_ids[static_cast<size_t>(j)]);
        a(i, j) = graph.adjacency.entries(it->second, gj);
        mm(i, j) = m(it->second, gj);
      }
    }
    out["cost"] = cost_undirected(a, mm, ex.x);
  }
  if (!o.prob.empty()) {
    const Matrix p = read_dense_csv(o.prob);
    out["error"] = tracking_error(ex.x, p, false);
    out["error_normalized"] = tracking_error(ex.x, p, true);
  }
  std::cout << out.dump(2) << std::endl;
  if (!g.out.empty() && g.out != "rdpg_out") {
    ensure_dir(g.out);
    std::ofstream f(fs::path(g.out) / "eval.json");
    f << out.dump(2) << '\n';
    write_provenance(g.out, "eval",
                     json{{"x", o.x_file}, {"y", o.y_file}, {"graph", o.graph},
                          {"mask", o.mask_file}, {"prob", o.prob}},
                     g);
  }
  return 0;
}

// ------------------------------------------------------------------- elbow

int run_elbow(const GlobalOpts& g, const std::string& input, int d_max) {
  Graph graph = read_edge_list(input, false);
  const int d = elbow_dimension(graph.adjacency.entries,
                                static_cast<int>(std::min<Index>(d_max, graph.n())));
  if (g.as_json) {
    std::cout << json{{"d", d}}.dump() << std::endl;
  } else {
    std::cout << d << std::endl;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent-position embeddings for random dot product graphs"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Random seed used by every sampler");
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--json", g.as_json, "Print a machine-readable summary to stdout");
  app.add_flag("--deterministic", g.deterministic,
               "Force sequential reductions for bit-reproducible runs");

  // generate
  auto* gen = app.add_subcommand("generate", "Sample synthetic graphs");
  gen->require_subcommand(1);
  GenerateOpts go;
  auto* er = gen->add_subcommand("er", "Erdos-Renyi graph (optionally growing)");
  er->add_option("--n", go.n, "Node count")->required();
  er->add_option("--p", go.p, "Connection probability")->required();
  er->add_option("--grow-steps", go.grow_steps, "Emit a stream adding one node per step");
  er->add_flag("--emit-prob", go.emit_prob, "Also write the probability matrix");
  auto* sbm = gen->add_subcommand("sbm", "Stochastic block model graph");
  sbm->add_option("--sizes", go.sizes, "Community sizes")->delimiter(',')->required();
  sbm->add_option("--blocks", go.blocks, "Community count (consistency check)");
  sbm->add_option("--p", go.p, "Within-community probability");
  sbm->add_option("--q", go.q, "Across-community probability");
  sbm->add_option("--pi", go.pi_file, "CSV with the full K x K probability matrix");
  sbm->add_flag("--emit-prob", go.emit_prob, "Also write the probability matrix");
  auto* dyn = gen->add_subcommand("dynamic-sbm", "SBM snapshot stream");
  dyn->add_option("--sizes", go.sizes, "Community sizes")->delimiter(',')->required();
  dyn->add_option("--p", go.p, "Within-community probability");
  dyn->add_option("--q", go.q, "Across-community probability");
  dyn->add_option("--pi-list", go.pi_list, "Per-step K x K probability CSVs")
      ->delimiter(',');
  dyn->add_option("--steps", go.steps, "Number of snapshots");
  dyn->add_option("--flips", go.flips, "Community flips per step");
  dyn->add_flag("--emit-prob", go.emit_prob, "Also write per-step probability matrices");
  auto* sen = gen->add_subcommand("senate", "Bipartite senator/law digraph");
  sen->add_option("--party1", go.party1, "Party-1 senators");
  sen->add_option("--party2", go.party2, "Party-2 senators");
  sen->add_option("--laws", go.laws, "Law counts: party1,party2,bipartisan")
      ->delimiter(',');
  sen->add_option("--pi", go.pi_file, "CSV with the 5 x 5 voting probabilities");

  // embed
  EmbedOpts eo;
  auto* embed = app.add_subcommand("embed", "Embed a single graph");
  embed->add_option("--input", eo.input, "Edge-list file")->required();
  embed->add_option("--method", eo.method, "ase | gd | bcd | rgd");
  embed->add_option("--d", eo.d, "Embedding dimension");
  embed->add_flag("--auto-elbow", eo.auto_elbow, "Pick d by the eigenvalue elbow rule");
  embed->add_option("--d-max", eo.d_max, "Scree length for --auto-elbow");
  embed->add_option("--mask", eo.mask_file, "File listing unobserved pairs");
  embed->add_flag("--directed", eo.directed, "Treat the input as a digraph");
  embed->add_option("--max-iters", eo.max_iters, "Iteration/cycle cap");
  embed->add_option("--tol", eo.tol, "Relative cost-decrease stopping threshold");
  embed->add_option("--alpha", eo.alpha, "GD stepsize (0 = 1/(8 lambda_max))");
  embed->add_option("--init", eo.init, "spectral | random | warm");
  embed->add_option("--warm", eo.warm, "Warm-start embedding CSV");
  embed->add_option("--warm-in", eo.warm_in, "Warm-start incoming factor CSV (rgd)");
  embed->add_flag("--trace", eo.trace, "Record and write the cost trace");
  embed->add_option("--replicates", eo.replicates, "Fan out seeded replicate runs");

  // track
  TrackOpts to;
  auto* track = app.add_subcommand("track", "Track embeddings over a snapshot stream");
  track->add_option("--manifest", to.manifest, "Manifest JSON or stream directory")
      ->required();
  track->add_option("--method", to.method, "gd | bcd | rgd");
  track->add_option("--d", to.d, "Embedding dimension");
  track->add_option("--inner-steps", to.inner_steps, "Solver iterations per snapshot");
  track->add_option("--alpha", to.alpha, "Stepsize (0 = auto; rgd default 0.01)");
  track->add_option("--filter", to.filter, "none | ma | pole");
  track->add_option("--window", to.window, "Moving-average length");
  track->add_option("--pole", to.pole, "Single-pole coefficient");
  track->add_flag("--ls-baseline", to.ls_baseline,
                  "Also run the frozen-embedding least-squares baseline");
  track->add_option("--init-iters", to.init_iters, "Iteration cap for the first snapshot");

  // eval
  EvalOpts vo;
  auto* eval = app.add_subcommand("eval", "Compare embeddings and compute metrics");
  eval->add_option("--x", vo.x_file, "Embedding CSV")->required();
  eval->add_option("--y", vo.y_file, "Embedding CSV to compare against")->required();
  eval->add_option("--graph", vo.graph, "Edge list for the masked cost");
  eval->add_option("--mask", vo.mask_file, "Unobserved pairs for the masked cost");
  eval->add_option("--prob", vo.prob, "True probability matrix CSV");

  // elbow
  std::string elbow_input;
  int elbow_dmax = 10;
  auto* elbow = app.add_subcommand("elbow", "Pick an embedding dimension");
  elbow->add_option("--input", elbow_input, "Edge-list file")->required();
  elbow->add_option("--d-max", elbow_dmax, "Scree length");

  CLI11_PARSE(app, argc, argv);

  if (g.deterministic) Eigen::setNbThreads(1);

  try {
    if (er->parsed()) return run_generate_er(g, go);
    if (sbm->parsed()) return run_generate_sbm(g, go);
    if (dyn->parsed()) return run_generate_dynamic(g, go);
    if (sen->parsed()) return run_generate_senate(g, go);
    if (embed->parsed()) return run_embed(g, eo);
    if (track->parsed()) return run_track(g, to);
    if (eval->parsed()) return run_eval(g, vo);
    if (elbow->parsed()) return run_elbow(g, elbow_input, elbow_dmax);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const StepSizeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cerr << "error: no command\n";
  return 1;
}
