// Python bindings for the embedding library: generators, the undirected and
// directed solvers, the manifold operations and the streaming tracker.

#include "rdpg/embed_directed.hpp"
#include "rdpg/embed_undirected.hpp"
#include "rdpg/errors.hpp"
#include "rdpg/generators.hpp"
#include "rdpg/manifold.hpp"
#include "rdpg/numerics.hpp"
#include "rdpg/streaming.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace rdpg;

namespace {

SolverConfig make_config(int d, int max_iters, double tol, double step_size,
                         const std::string& init, double random_scale,
                         std::uint64_t seed, std::optional<Matrix> warm,
                         std::optional<Matrix> warm_in, bool record_trace) {
  SolverConfig cfg;
  cfg.d = d;
  cfg.max_iters = max_iters;
  cfg.tol_rel_cost = tol;
  cfg.step_size = step_size;
  cfg.random_scale = random_scale;
  cfg.seed = seed;
  cfg.warm = std::move(warm);
  cfg.warm_in = std::move(warm_in);
  cfg.record_trace = record_trace;
  if (init == "spectral") {
    cfg.init = Init::spectral;
  } else if (init == "random") {
    cfg.init = Init::random;
  } else if (init == "warm") {
    cfg.init = Init::warm;
  } else {
    throw ConfigError("init must be 'spectral', 'random' or 'warm'");
  }
  return cfg;
}

constexpr const char* kConfigArgs =
    "d, max_iters, tol, step_size, init, random_scale, seed, warm, warm_in, trace";

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gradient-based latent-position embeddings for random dot product graphs";

  py::register_exception<Error>(m, "RdpgError", PyExc_RuntimeError);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("final_cost", &SolveReport::final_cost)
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("warnings", &SolveReport::warnings)
      .def_readonly("trace", &SolveReport::trace)
      .def_readonly("feasibility_max", &SolveReport::feasibility_max)
      .def_readonly("line_search_failures", &SolveReport::line_search_failures)
      .def("__repr__", [](const SolveReport& r) {
        return "<SolveReport cost=" + std::to_string(r.final_cost) +
               " iters=" + std::to_string(r.iterations) +
               (r.converged ? " converged>" : ">");
      });

  py::class_<ArmijoConfig>(m, "ArmijoConfig")
      .def(py::init<>())
      .def_readwrite("initial_step", &ArmijoConfig::initial_step)
      .def_readwrite("backtrack", &ArmijoConfig::backtrack)
      .def_readwrite("sufficient_decrease", &ArmijoConfig::sufficient_decrease)
      .def_readwrite("max_backtracks", &ArmijoConfig::max_backtracks);

  // generators
  m.def(
      "hollow_mask",
      [](Index n, bool directed) { return hollow_mask(n, directed).entries; },
      py::arg("n"), py::arg("directed") = false,
      "All-ones mask with a zero diagonal");
  m.def(
      "sample_rdpg",
      [](const Matrix& p, bool directed, std::uint64_t seed) {
        return sample_rdpg(p, directed, seed).entries;
      },
      py::arg("p"), py::arg("directed") = false, py::arg("seed") = 0,
      "Bernoulli adjacency sample with P_ij edge probabilities");
  m.def(
      "sbm_probability",
      [](const std::vector<int>& sizes, const Matrix& pi, bool directed) {
        return sbm_probability({sizes, pi, directed, 0});
      },
      py::arg("sizes"), py::arg("pi"), py::arg("directed") = false);
  m.def(
      "sbm_latent_positions",
      [](const std::vector<int>& sizes, const Matrix& pi, int d) {
        return sbm_latent_positions({sizes, pi, false, 0}, d);
      },
      py::arg("sizes"), py::arg("pi"), py::arg("d"));
  m.def("er_probability", &er_probability, py::arg("n"), py::arg("p"));
  m.def(
      "senate_graph",
      [](int party1, int party2, const std::array<int, 3>& laws, const Matrix& pi,
         std::uint64_t seed) {
        return senate_graph(party1, party2, laws, pi, seed).entries;
      },
      py::arg("party1") = 50, py::arg("party2") = 50,
      py::arg("laws") = std::array<int, 3>{50, 200, 40},
      py::arg("pi") = senate_default_pi(), py::arg("seed") = 0);
  m.def("senate_default_pi", &senate_default_pi);
  m.def("dynamic_sbm_step", &dynamic_sbm_step, py::arg("labels"),
        py::arg("num_communities"), py::arg("seed"));

  // numerics
  m.def(
      "top_eigen",
      [](const Matrix& a, int d, const std::string& order) {
        const SpectralPair p = top_eigen(
            a, d, order == "magnitude" ? EigenOrder::magnitude : EigenOrder::algebraic);
        return py::make_tuple(p.values, p.vectors);
      },
      py::arg("a"), py::arg("d"), py::arg("order") = "magnitude");
  m.def(
      "top_svd",
      [](const Matrix& a, int d) {
        const SvdPair p = top_svd(a, d);
        return py::make_tuple(p.values, p.left, p.right);
      },
      py::arg("a"), py::arg("d"));
  m.def(
      "modified_qr",
      [](const Matrix& z) {
        const ModifiedQr qr = modified_qr(z);
        return py::make_tuple(qr.q, qr.r);
      },
      py::arg("z"), "QR with unit-diagonal triangular factor");
  m.def("procrustes_distance", &procrustes_distance, py::arg("x"), py::arg("y"),
        "Rotation-minimized squared distance and the aligning matrix");
  m.def("solve_spd", &solve_spd, py::arg("r"), py::arg("b"));

  // undirected embeddings
  m.def("cost_undirected", &cost_undirected, py::arg("a"), py::arg("m"), py::arg("x"));
  m.def("grad_undirected", &grad_undirected, py::arg("a"), py::arg("m"), py::arg("x"));
  m.def("ase", &ase, py::arg("a"), py::arg("d"), "Adjacency spectral embedding");
  m.def("elbow_dimension", &elbow_dimension, py::arg("a"), py::arg("d_max"));
  m.def("default_step_size", &default_step_size, py::arg("a"));
  m.def(
      "solve_gd",
      [](const Matrix& a, std::optional<Matrix> mask, int d, int max_iters, double tol,
         double step_size, const std::string& init, double random_scale,
         std::uint64_t seed, std::optional<Matrix> warm, bool trace) {
        const Matrix m = mask.has_value() ? *mask : hollow_mask(a.rows(), false).entries;
        return solve_gd(a, m,
                        make_config(d, max_iters, tol, step_size, init, random_scale,
                                    seed, std::move(warm), std::nullopt, trace));
      },
      py::arg("a"), py::arg("mask") = std::nullopt, py::arg("d") = 2,
      py::arg("max_iters") = 500, py::arg("tol") = 1e-7, py::arg("step_size") = 0.0,
      py::arg("init") = "spectral", py::arg("random_scale") = 0.0, py::arg("seed") = 0,
      py::arg("warm") = std::nullopt, py::arg("trace") = false,
      "Factored gradient descent on the masked least-squares cost");
  m.def(
      "solve_bcd",
      [](const Matrix& a, int d, int max_iters, double tol, const std::string& init,
         double random_scale, std::uint64_t seed, std::optional<Matrix> warm,
         bool trace) {
        return solve_bcd(a, make_config(d, max_iters, tol, 0.0, init, random_scale,
                                        seed, std::move(warm), std::nullopt, trace));
      },
      py::arg("a"), py::arg("d") = 2, py::arg("max_iters") = 500, py::arg("tol") = 1e-7,
      py::arg("init") = "spectral", py::arg("random_scale") = 0.0, py::arg("seed") = 0,
      py::arg("warm") = std::nullopt, py::arg("trace") = false,
      "Row-cyclic block coordinate descent (hollow mask)");

  // manifold
  m.def("is_on_manifold", &is_on_manifold, py::arg("x"), py::arg("tol") = 1e-9);
  m.def("manifold_violation", &manifold_violation, py::arg("x"));
  m.def("project_normal", &project_normal, py::arg("x"), py::arg("z"));
  m.def("project_tangent", &project_tangent, py::arg("x"), py::arg("z"));
  m.def("retract", &retract, py::arg("x"), py::arg("zeta"));
  m.def("riemannian_grad", &riemannian_grad, py::arg("x"), py::arg("grad"));

  // directed embeddings
  m.def("cost_directed", &cost_directed, py::arg("a"), py::arg("m"), py::arg("x_out"),
        py::arg("x_in"));
  m.def("grad_directed", &grad_directed, py::arg("a"), py::arg("m"), py::arg("x_out"),
        py::arg("x_in"));
  m.def(
      "ase_directed",
      [](const Matrix& a, int d) {
        const DirectedEmbedding e = ase_directed(a, d);
        return py::make_tuple(e.x_out, e.x_in);
      },
      py::arg("a"), py::arg("d"), "SVD embedding of a digraph");
  m.def(
      "solve_riemannian_gd",
      [](const Matrix& a, std::optional<Matrix> mask, int d, int max_iters, double tol,
         const std::string& init, double random_scale, std::uint64_t seed,
         std::optional<Matrix> warm, std::optional<Matrix> warm_in, bool trace,
         const ArmijoConfig& armijo) {
        const Matrix m = mask.has_value() ? *mask : hollow_mask(a.rows(), true).entries;
        auto [e, report] = solve_riemannian_gd(
            a, m,
            make_config(d, max_iters, tol, 0.0, init, random_scale, seed,
                        std::move(warm), std::move(warm_in), trace),
            armijo);
        return py::make_tuple(e.x_out, e.x_in, report);
      },
      py::arg("a"), py::arg("mask") = std::nullopt, py::arg("d") = 2,
      py::arg("max_iters") = 500, py::arg("tol") = 1e-7, py::arg("init") = "spectral",
      py::arg("random_scale") = 0.0, py::arg("seed") = 0, py::arg("warm") = std::nullopt,
      py::arg("warm_in") = std::nullopt, py::arg("trace") = false,
      py::arg("armijo") = ArmijoConfig{},
      "Riemannian descent over the orthogonal-column manifold");
  m.def(
      "rescale_columns",
      [](const Matrix& x_out, const Matrix& x_in) {
        const DirectedEmbedding e = rescale_columns(x_out, x_in);
        return py::make_tuple(e.x_out, e.x_in);
      },
      py::arg("x_out"), py::arg("x_in"),
      "Equalize column norms without changing the product");
  m.def("verify_ambiguity_reduction", &verify_ambiguity_reduction, py::arg("x_out"),
        py::arg("x_in"), py::arg("t"), py::arg("tol") = 1e-6);
  m.def("random_manifold_point", &random_manifold_point, py::arg("a"), py::arg("d"),
        py::arg("scale") = 0.0, py::arg("seed") = 0);

  // streaming
  py::class_<TrackerState>(m, "Tracker")
      .def(py::init([](const Matrix& x, std::optional<Matrix> x_in,
                       const std::string& method, int inner_steps, double step_size,
                       const std::string& filter, int window, double pole) {
             TrackerConfig cfg;
             cfg.d = static_cast<int>(x.cols());
             cfg.inner_steps = inner_steps;
             cfg.step_size = step_size;
             if (method == "gd") {
               cfg.method = TrackMethod::gd;
             } else if (method == "bcd") {
               cfg.method = TrackMethod::bcd;
             } else if (method == "rgd") {
               cfg.method = TrackMethod::riemannian_gd;
             } else {
               throw ConfigError("method must be 'gd', 'bcd' or 'rgd'");
             }
             if (filter == "none") {
               cfg.filter.mode = FilterMode::passthrough;
             } else if (filter == "ma") {
               cfg.filter.mode = FilterMode::moving_average;
               cfg.filter.window = window;
             } else if (filter == "pole") {
               cfg.filter.mode = FilterMode::single_pole;
               cfg.filter.pole = pole;
             } else {
               throw ConfigError("filter must be 'none', 'ma' or 'pole'");
             }
             if (x_in.has_value()) {
               return make_tracker(cfg, DirectedEmbedding{x, *x_in, {}});
             }
             return make_tracker(cfg, EmbeddingMatrix{x, {}});
           }),
           py::arg("x"), py::arg("x_in") = std::nullopt, py::arg("method") = "gd",
           py::arg("inner_steps") = 10, py::arg("step_size") = 0.0,
           py::arg("filter") = "none", py::arg("window") = 5, py::arg("pole") = 0.9)
      .def_property_readonly("x", [](const TrackerState& s) { return s.x; })
      .def_property_readonly("x_in", [](const TrackerState& s) { return s.x_in; })
      .def_property_readonly("node_ids",
                             [](const TrackerState& s) { return s.node_ids; })
      .def_property_readonly("n", [](const TrackerState& s) { return s.n(); })
      .def(
          "step",
          [](TrackerState& s, const Matrix& a, std::optional<Matrix> mask) {
            const Matrix m =
                mask.has_value() ? *mask : hollow_mask(a.rows(), s.directed).entries;
            const StepReport r = track_step(s, a, m);
            return py::make_tuple(r.cost, r.flagged);
          },
          py::arg("a"), py::arg("mask") = std::nullopt)
      .def(
          "add_node",
          [](TrackerState& s, const std::string& id, const Vector& incidence,
             std::optional<Vector> incoming) {
            if (incoming.has_value()) {
              add_node(s, id, incidence, *incoming);
            } else {
              add_node(s, id, incidence);
            }
          },
          py::arg("id"), py::arg("incidence"), py::arg("incoming") = std::nullopt)
      .def("remove_node",
           [](TrackerState& s, const std::string& id) { remove_node(s, id); });

  m.def("least_squares_embedding", &least_squares_embedding, py::arg("x_ref"),
        py::arg("incidence"), "Out-of-sample node embedding");
  m.def("tracking_error", &tracking_error, py::arg("x"), py::arg("p"),
        py::arg("normalized") = false);
}
