// End-to-end checks of the command-line surface. The binary path arrives via
// the RDPG_CLI environment variable (set by ctest).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rdpg/io.hpp"
#include "rdpg/types.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace rdpg;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli() {
  const char* path = std::getenv("RDPG_CLI");
  REQUIRE_MESSAGE(path != nullptr, "RDPG_CLI must point at the rdpg binary");
  return path;
}

struct Sandbox {
  fs::path root;
  Sandbox() {
    root = fs::temp_directory_path() /
           ("rdpg_cli_" + std::to_string(::getpid()) + "_" + std::to_string(next()++));
    fs::create_directories(root);
  }
  ~Sandbox() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
  static int& next() {
    static int n = 0;
    return n;
  }
  std::string operator/(const std::string& p) const { return (root / p).string(); }
};

int run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), path);
  json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("generate + embed + eval pipeline") {
  Sandbox box;
  const std::string graph_dir = box / "sbm";
  REQUIRE(run("--seed 1 --out " + graph_dir +
              " generate sbm --blocks 2 --sizes 67,133 --p 0.5 --q 0.2") == 0);
  CHECK(fs::exists(graph_dir + "/edges.tsv"));
  CHECK(fs::exists(graph_dir + "/provenance.json"));
  const json prov = read_json(graph_dir + "/provenance.json");
  CHECK(prov["seed"] == 1);
  CHECK(prov["command"] == "generate");

  const std::string bcd_dir = box / "bcd";
  REQUIRE(run("--out " + bcd_dir + " embed --input " + graph_dir +
              "/edges.tsv --method bcd --d 2") == 0);
  const json report = read_json(bcd_dir + "/report.json");
  CHECK(report["converged"] == true);

  const std::string ase_dir = box / "ase";
  REQUIRE(run("--out " + ase_dir + " embed --input " + graph_dir +
              "/edges.tsv --method ase --d 2") == 0);
  const json ase_report = read_json(ase_dir + "/report.json");
  CHECK(report["final_cost"].get<double>() <=
        ase_report["final_cost"].get<double>() + 1e-9);

  const std::string gd_dir = box / "gd";
  REQUIRE(run("--out " + gd_dir + " embed --input " + graph_dir +
              "/edges.tsv --method gd --d 2 --trace") == 0);
  CHECK(fs::exists(gd_dir + "/trace.csv"));

  // Cross-solver agreement measured through the eval command.
  const std::string eval_dir = box / "eval";
  REQUIRE(run("--out " + eval_dir + " eval --x " + bcd_dir + "/embedding.csv --y " +
              gd_dir + "/embedding.csv --graph " + graph_dir + "/edges.tsv") == 0);
  const json metrics = read_json(eval_dir + "/eval.json");
  CHECK(metrics["procrustes_sq"].get<double>() < 1.0);
  CHECK(metrics["cost"].get<double>() ==
        doctest::Approx(report["final_cost"].get<double>()).epsilon(1e-6));

  // An embedding against itself is exactly aligned.
  const std::string self_dir = box / "self";
  REQUIRE(run("--out " + self_dir + " eval --x " + bcd_dir + "/embedding.csv --y " +
              bcd_dir + "/embedding.csv") == 0);
  CHECK(read_json(self_dir + "/eval.json")["procrustes_sq"].get<double>() < 1e-10);
}

TEST_CASE("embed exit codes distinguish failure modes") {
  Sandbox box;
  CHECK(run("--out " + (box / "x") + " embed --input /nonexistent.tsv --method ase") == 1);

  // A triangle has one positive eigenvalue: d=2 must fail with code 3.
  std::ofstream k3(box / "k3.tsv");
  k3 << "a\tb\nb\tc\na\tc\n";
  k3.close();
  CHECK(run("--out " + (box / "dim") + " embed --input " + (box / "k3.tsv") +
            " --method ase --d 3") == 3);

  // Huge fixed stepsize diverges with code 4.
  CHECK(run("--out " + (box / "div") + " embed --input " + (box / "k3.tsv") +
            " --method gd --d 1 --alpha 50") == 4);

  // Hitting the iteration cap returns 2.
  CHECK(run("--out " + (box / "cap") + " embed --input " + (box / "k3.tsv") +
            " --method gd --d 1 --max-iters 1 --init random --tol 1e-16") == 2);
}

TEST_CASE("embed ase on the triangle reproduces the closed form") {
  Sandbox box;
  std::ofstream k3(box / "k3.tsv");
  k3 << "a\tb\nb\tc\na\tc\n";
  k3.close();
  REQUIRE(run("--out " + (box / "emb") + " embed --input " + (box / "k3.tsv") +
              " --method ase --d 1") == 0);
  const EmbeddingMatrix e = read_embedding_csv(box / "emb/embedding.csv");
  REQUIRE(e.n() == 3);
  for (Index i = 0; i < 3; ++i) {
    CHECK(e.x(i, 0) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-9));
  }
}

TEST_CASE("generate senate defaults to the 390-node setup") {
  Sandbox box;
  const std::string dir = box / "senate";
  REQUIRE(run("--seed 1 --out " + dir + " generate senate") == 0);
  const Graph g = read_edge_list(dir + "/edges.tsv", true);
  std::ifstream communities(dir + "/communities.txt");
  int lines = 0;
  std::string line;
  while (std::getline(communities, line)) ++lines;
  CHECK(lines == 390);
  // Only senators appear as sources, only laws as destinations.
  CHECK(g.adjacency.entries.sum() > 0.0);
  for (const auto& id : g.node_ids) {
    CHECK(std::stoi(id) >= 0);
    CHECK(std::stoi(id) < 390);
  }
}

TEST_CASE("rgd embed writes both factors and a feasibility log") {
  Sandbox box;
  const std::string dir = box / "senate";
  REQUIRE(run("--seed 3 --out " + dir + " generate senate --party1 20 --party2 20 "
              "--laws 10,20,10") == 0);
  const std::string emb = box / "rgd";
  REQUIRE(run("--out " + emb + " embed --input " + dir + "/edges.tsv --method rgd "
              "--d 2 --max-iters 150") == 0);
  CHECK(fs::exists(emb + "/embedding_out.csv"));
  CHECK(fs::exists(emb + "/embedding_in.csv"));
  const json report = read_json(emb + "/report.json");
  CHECK(report["feasibility_max"].get<double>() <= 1e-8);
}

TEST_CASE("masked embedding ignores pairs listed as unobserved") {
  Sandbox box;
  const std::string gen = box / "er";
  REQUIRE(run("--seed 9 --out " + gen + " generate er --n 30 --p 0.5") == 0);
  // Mark a couple of pairs as unobserved.
  std::ofstream m(box / "m.tsv");
  m << "0\t1\n2\t3\n";
  m.close();
  REQUIRE(run("--out " + (box / "emb") + " embed --input " + gen +
              "/edges.tsv --method gd --d 1 --mask " + (box / "m.tsv")) == 0);
  CHECK(fs::exists(box / "emb/embedding.csv"));

  // The masked run may only do better on the entries it actually fits.
  REQUIRE(run("--out " + (box / "full") + " embed --input " + gen +
              "/edges.tsv --method gd --d 1") == 0);
  const json masked = read_json(box / "emb/report.json");
  const json full = read_json(box / "full/report.json");
  CHECK(masked["final_cost"].get<double>() <= full["final_cost"].get<double>() + 1e-9);
}

TEST_CASE("track over a static stream has a constant error column") {
  Sandbox box;
  const std::string gen = box / "stream";
  // Three identical snapshots via dynamic-sbm with zero flips.
  REQUIRE(run("--seed 5 --out " + gen +
              " generate dynamic-sbm --sizes 20,20 --p 0.6 --q 0.1 --steps 3 "
              "--flips 0 --emit-prob") == 0);
  const std::string out = box / "run";
  REQUIRE(run("--out " + out + " track --manifest " + gen +
              "/manifest.json --method gd --d 2 --inner-steps 20") == 0);

  std::ifstream metrics(out + "/metrics.csv");
  std::string line;
  std::getline(metrics, line);
  CHECK(line == "t,cost,error,error_normalized,n_nodes");
  std::vector<double> errors;
  while (std::getline(metrics, line)) {
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');  // t
    std::getline(ss, field, ',');  // cost
    std::getline(ss, field, ',');  // error
    errors.push_back(std::stod(field));
  }
  REQUIRE(errors.size() == 3);
  CHECK(errors[1] == doctest::Approx(errors[2]).epsilon(1e-4));
  CHECK(fs::exists(out + "/final.csv"));
  CHECK(fs::exists(out + "/embeddings/t0001.csv"));
}

TEST_CASE("track reports the offending step on manifest inconsistencies") {
  Sandbox box;
  std::ofstream e0(box / "e0.tsv");
  e0 << "a\tb\n";
  e0.close();
  std::ofstream man(box / "manifest.json");
  man << R"({"snapshots":[{"t":0,"edges":"e0.tsv"},{"t":1,"edges":"missing.tsv"}]})";
  man.close();
  const std::string cmd = cli() + " --out " + (box / "out") + " track --manifest " +
                          (box / "manifest.json") + " --method gd --d 1 2>" +
                          (box / "err.txt");
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 1);
  std::ifstream err(box / "err.txt");
  std::stringstream buf;
  buf << err.rdbuf();
  CHECK(buf.str().find("step 1") != std::string::npos);
}

TEST_CASE("growing stream emits baseline and online error columns") {
  Sandbox box;
  const std::string gen = box / "grow";
  REQUIRE(run("--seed 7 --out " + gen +
              " generate er --n 30 --p 0.2 --grow-steps 5 --emit-prob") == 0);
  const std::string out = box / "run";
  REQUIRE(run("--out " + out + " track --manifest " + gen +
              "/manifest.json --method gd --d 1 --inner-steps 10 --ls-baseline") == 0);
  std::ifstream metrics(out + "/metrics.csv");
  std::string header;
  std::getline(metrics, header);
  CHECK(header == "t,cost,error,error_normalized,n_nodes,error_baseline_normalized");
  int rows = 0;
  std::string line;
  double last_n = 0.0;
  while (std::getline(metrics, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string field;
    for (int c = 0; c < 5; ++c) std::getline(ss, field, ',');
    last_n = std::stod(field);
  }
  CHECK(rows == 6);
  CHECK(last_n == 35.0);
}

TEST_CASE("elbow picks the planted dimension through the cli") {
  Sandbox box;
  const std::string gen = box / "sbm";
  REQUIRE(run("--seed 11 --out " + gen +
              " generate sbm --sizes 150,150 --p 0.9 --q 0.05") == 0);
  const std::string cmd = cli() + " --json elbow --input " + gen + "/edges.tsv" +
                          " --d-max 8 >" + (box / "out.json");
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(read_json(box / "out.json")["d"] == 2);
}

TEST_CASE("replicates fan out into per-replicate directories") {
  Sandbox box;
  const std::string gen = box / "g";
  REQUIRE(run("--seed 2 --out " + gen + " generate er --n 40 --p 0.4") == 0);
  const std::string out = box / "reps";
  REQUIRE(run("--seed 2 --out " + out + " embed --input " + gen +
              "/edges.tsv --method bcd --d 1 --replicates 3") == 0);
  for (int r = 0; r < 3; ++r) {
    CHECK(fs::exists(out + "/rep_" + std::to_string(r) + "/embedding.csv"));
    CHECK(fs::exists(out + "/rep_" + std::to_string(r) + "/provenance.json"));
  }
  // Same seed, same replicate: identical output files.
  const std::string out2 = box / "reps2";
  REQUIRE(run("--seed 2 --out " + out2 + " embed --input " + gen +
              "/edges.tsv --method bcd --d 1 --replicates 3") == 0);
  std::ifstream f1(out + "/rep_1/embedding.csv"), f2(out2 + "/rep_1/embedding.csv");
  std::stringstream b1, b2;
  b1 << f1.rdbuf();
  b2 << f2.rdbuf();
  CHECK(b1.str() == b2.str());
}
