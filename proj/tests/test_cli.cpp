#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

std::string agdlab_bin() {
  const char* bin = std::getenv("AGDLAB_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "AGDLAB_BIN must point at the agdlab binary");
  return bin;
}

int run_cmd(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("agdlab_cli_" + std::to_string(::getpid()) + "_" +
                                       std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

void write_identity_problem(const fs::path& dir) {
  write_file(dir / "A.mtx",
             "%%MatrixMarket matrix coordinate real symmetric\n"
             "2 2 2\n1 1 1.0\n2 2 1.0\n");
  write_file(dir / "b.txt", "1.0\n1.0\n");
}

std::string spd_config(const std::string& step_rule = R"({"rule": "auto"})") {
  return std::string(R"({
  "schema": 1,
  "problem": {"matrix": "A.mtx", "rhs": "b.txt"},
  "schedule": {"policy": "random_gap", "g_min": 0.4},
  "staleness": {"policy": "random_in_box"},
  "step": )") +
         step_rule + R"(,
  "horizon": 60, "seed": 5, "tolerance": 1e-8
})";
}

const char* kCesMarket = R"({"goods": 2, "buyers": [{"e": 2.0, "rho": -1.0, "a": [1.0, 1.0]}]})";

}  // namespace

TEST_CASE("solve-spd demo converges with a clean monitor") {
  Workspace ws;
  write_identity_problem(ws.dir);
  write_file(ws.dir / "run.json", spd_config());
  const fs::path out = ws.dir / "out";
  const int rc = run_cmd(agdlab_bin() + " solve-spd --config " + (ws.dir / "run.json").string() + " --out " +
                         out.string() + " --json > " + (ws.dir / "summary.json").string());
  CHECK(rc == 0);
  const std::string summary = read_file(ws.dir / "summary.json");
  CHECK(summary.find("\"converged\": true") != std::string::npos);
  CHECK(fs::exists(out / "solution.txt"));
  CHECK(fs::exists(out / "trace.csv"));
  CHECK(fs::exists(out / "monitor.json"));
}

TEST_CASE("missing rhs file exits 2 naming the path") {
  Workspace ws;
  write_file(ws.dir / "A.mtx",
             "%%MatrixMarket matrix coordinate real symmetric\n"
             "2 2 2\n1 1 1.0\n2 2 1.0\n");
  write_file(ws.dir / "run.json", spd_config());
  const int rc = run_cmd(agdlab_bin() + " solve-spd --config " + (ws.dir / "run.json").string() + " 2> " +
                         (ws.dir / "err.txt").string());
  CHECK(rc == 2);
  CHECK(read_file(ws.dir / "err.txt").find("b.txt") != std::string::npos);
}

TEST_CASE("command-line seed and horizon override the config") {
  Workspace ws;
  write_identity_problem(ws.dir);
  write_file(ws.dir / "run.json", spd_config());
  const fs::path out1 = ws.dir / "o1";
  const fs::path out2 = ws.dir / "o2";
  REQUIRE(run_cmd(agdlab_bin() + " solve-spd --config " + (ws.dir / "run.json").string() + " --out " +
                  out1.string() + " --seed 9 --horizon 20 > /dev/null") == 0);
  REQUIRE(run_cmd(agdlab_bin() + " solve-spd --config " + (ws.dir / "run.json").string() + " --out " +
                  out2.string() + " --seed 10 --horizon 20 > /dev/null") == 0);
  const std::string t1 = read_file(out1 / "trace.csv");
  CHECK(t1.find("seed=9") != std::string::npos);
  CHECK(t1.find("horizon=20") != std::string::npos);
  CHECK(t1 != read_file(out2 / "trace.csv"));
}

TEST_CASE("unknown config keys are rejected") {
  Workspace ws;
  write_identity_problem(ws.dir);
  write_file(ws.dir / "run.json", R"({
    "schema": 1,
    "problem": {"matrix": "A.mtx", "rhs": "b.txt"},
    "surprise": true
  })");
  const int rc = run_cmd(agdlab_bin() + " solve-spd --config " + (ws.dir / "run.json").string() +
                         " 2> /dev/null");
  CHECK(rc == 2);
}

TEST_CASE("verify round trip and corruption detection") {
  Workspace ws;
  write_identity_problem(ws.dir);
  write_file(ws.dir / "run.json", spd_config());
  const fs::path out = ws.dir / "out";
  REQUIRE(run_cmd(agdlab_bin() + " solve-spd --config " + (ws.dir / "run.json").string() + " --out " +
                  out.string() + " > /dev/null") == 0);

  write_file(ws.dir / "verify.json", R"({
    "schema": 1,
    "trace": "out/trace.csv",
    "objective": {"type": "spd", "matrix": "A.mtx", "rhs": "b.txt"},
    "params": "auto"
  })");
  CHECK(run_cmd(agdlab_bin() + " verify --config " + (ws.dir / "verify.json").string() + " --out " +
                (ws.dir / "verify_out").string() + " > /dev/null") == 0);

  // hand-corrupt one delta_p: replay must fail with exit 2
  std::string csv = read_file(out / "trace.csv");
  const auto pos = csv.rfind("\n", csv.size() - 2);
  std::string last = csv.substr(pos + 1);
  std::ostringstream patched;
  // bump delta_p by editing the row into an inconsistent one
  std::istringstream rows(csv);
  std::string line, rebuilt;
  int data_rows = 0;
  while (std::getline(rows, line)) {
    if (!line.empty() && line[0] != '#' && line.find("seq,") != 0) {
      ++data_rows;
      if (data_rows == 3) {
        // third event: corrupt the delta_p column (index 7)
        std::vector<std::string> cols;
        std::string cur;
        for (char c : line) {
          if (c == ',') {
            cols.push_back(cur);
            cur.clear();
          } else {
            cur.push_back(c);
          }
        }
        cols.push_back(cur);
        cols[7] = "0.123456";
        line.clear();
        for (std::size_t i = 0; i < cols.size(); ++i) {
          if (i) line += ",";
          line += cols[i];
        }
      }
    }
    rebuilt += line + "\n";
  }
  write_file(out / "trace.csv", rebuilt);
  CHECK(run_cmd(agdlab_bin() + " verify --config " + (ws.dir / "verify.json").string() + " --out " +
                (ws.dir / "verify_out2").string() + " 2> /dev/null > /dev/null") == 2);
  (void)patched;
  (void)last;
}

TEST_CASE("verify flags an uncontrolled run with exit 4") {
  Workspace ws;
  write_file(ws.dir / "A.mtx",
             "%%MatrixMarket matrix coordinate real symmetric\n"
             "2 2 3\n1 1 2.0\n2 1 1.0\n2 2 2.0\n");
  write_file(ws.dir / "b.txt", "0.5\n-0.25\n");
  write_file(ws.dir / "run.json", spd_config(R"({"rule": "scaled", "factor": 0.5})"));
  const fs::path out = ws.dir / "out";
  const int solve_rc = run_cmd(agdlab_bin() + " solve-spd --config " + (ws.dir / "run.json").string() +
                               " --out " + out.string() + " --override-bounds > /dev/null");
  CHECK((solve_rc == 0 || solve_rc == 4));  // violations enumerated either way

  write_file(ws.dir / "verify.json", R"({
    "schema": 1,
    "trace": "out/trace.csv",
    "objective": {"type": "spd", "matrix": "A.mtx", "rhs": "b.txt"},
    "params": {"alpha": 6.0, "eps_f": 0.1666666, "eps_b": 0.2, "xi": "one"}
  })");
  const int rc = run_cmd(agdlab_bin() + " verify --config " + (ws.dir / "verify.json").string() + " --out " +
                         (ws.dir / "vout").string() + " > /dev/null");
  CHECK(rc == 4);
}

TEST_CASE("market-ces demo reaches equilibrium and is deterministic") {
  Workspace ws;
  write_file(ws.dir / "market.json", kCesMarket);
  write_file(ws.dir / "run.json", R"({
    "schema": 1,
    "market": "market.json",
    "p0": [0.7, 1.3],
    "schedule": {"policy": "random_gap", "g_min": 0.5},
    "staleness": {"policy": "random_in_box"},
    "horizon": 600, "seed": 11, "z_tolerance": 1e-6,
    "compare_equilibrium": true
  })");
  const fs::path out1 = ws.dir / "out1";
  const fs::path out2 = ws.dir / "out2";
  CHECK(run_cmd(agdlab_bin() + " market-ces --config " + (ws.dir / "run.json").string() + " --out " +
                out1.string() + " > /dev/null") == 0);
  CHECK(run_cmd(agdlab_bin() + " market-ces --config " + (ws.dir / "run.json").string() + " --out " +
                out2.string() + " > /dev/null") == 0);
  CHECK(read_file(out1 / "trace.csv") == read_file(out2 / "trace.csv"));
  CHECK(read_file(out1 / "monitor.json") == read_file(out2 / "monitor.json"));
  CHECK(read_file(out1 / "summary.json") == read_file(out2 / "summary.json"));

  // report summarizes the monitor output
  CHECK(run_cmd(agdlab_bin() + " report " + (out1 / "monitor.json").string() + " > /dev/null") == 0);
}

TEST_CASE("lambda above the bound is rejected without the override") {
  Workspace ws;
  write_file(ws.dir / "market.json", kCesMarket);
  write_file(ws.dir / "run.json", R"({
    "schema": 1, "market": "market.json", "lambda": 0.1, "horizon": 50, "seed": 1
  })");
  CHECK(run_cmd(agdlab_bin() + " market-ces --config " + (ws.dir / "run.json").string() +
                " 2> /dev/null > /dev/null") == 2);
}

TEST_CASE("runtime B3 breach exits 5") {
  // Valid at load (|kappa v0| = 0.083 < 0.1) but started far above the
  // clearing prices: sustained oversupply inflates the warehouses until
  // |kappa v| crosses 1/10.
  Workspace ws;
  write_file(ws.dir / "market.json", R"({
    "goods": 2,
    "buyers": [{"e": 2.0, "rho": -1.0, "a": [1.0, 1.0]}],
    "chi": [400.0, 400.0], "v0": [50.0, 50.0],
    "lambda": [0.016666666666666666, 0.016666666666666666],
    "kappa": [0.0016666666666666666, 0.0016666666666666666]
  })");
  write_file(ws.dir / "run.json", R"({
    "schema": 1, "market": "market.json", "p0": [4.0, 4.0],
    "schedule": {"policy": "random_gap", "g_min": 0.5},
    "staleness": {"policy": "fresh"},
    "horizon": 100, "seed": 2, "z_tolerance": 1e-3
  })");
  const int rc = run_cmd(agdlab_bin() + " market-ongoing --config " + (ws.dir / "run.json").string() +
                         " 2> " + (ws.dir / "err.txt").string() + " > /dev/null");
  CHECK(rc == 5);
  CHECK(read_file(ws.dir / "err.txt").find("B3") != std::string::npos);
}

TEST_CASE("verify works against market traces") {
  Workspace ws;
  write_file(ws.dir / "market.json", kCesMarket);
  write_file(ws.dir / "run.json", R"({
    "schema": 1, "market": "market.json", "p0": [0.7, 1.3],
    "schedule": {"policy": "random_gap", "g_min": 0.5},
    "staleness": {"policy": "random_in_box"},
    "horizon": 120, "seed": 8, "z_tolerance": 1.0
  })");
  const fs::path out = ws.dir / "out";
  REQUIRE(run_cmd(agdlab_bin() + " market-ces --config " + (ws.dir / "run.json").string() + " --out " +
                  out.string() + " > /dev/null") == 0);
  write_file(ws.dir / "verify.json", R"({
    "schema": 1,
    "trace": "out/trace.csv",
    "objective": {"type": "ces", "market": "market.json"},
    "params": "auto"
  })");
  CHECK(run_cmd("AGDLAB_LOG=info " + agdlab_bin() + " verify --config " + (ws.dir / "verify.json").string() +
                " --out " + (ws.dir / "vout").string() + " 2> /dev/null > /dev/null") == 0);
}

TEST_CASE("ongoing market with kappa = lambda violates B2 at load") {
  Workspace ws;
  write_file(ws.dir / "market.json", R"({
    "goods": 2,
    "buyers": [{"e": 2.0, "rho": -1.0, "a": [1.0, 1.0]}],
    "chi": [1.0, 1.0], "v0": [0.0, 0.0],
    "lambda": [0.016666, 0.016666], "kappa": [0.016666, 0.016666]
  })");
  write_file(ws.dir / "run.json", R"({
    "schema": 1, "market": "market.json", "horizon": 50, "seed": 1
  })");
  CHECK(run_cmd(agdlab_bin() + " market-ongoing --config " + (ws.dir / "run.json").string() +
                " 2> /dev/null > /dev/null") == 2);
}

TEST_CASE("shipped demo configs run end to end") {
  const char* demos = std::getenv("AGDLAB_DEMOS");
  REQUIRE(demos != nullptr);
  REQUIRE_MESSAGE(fs::exists(fs::path(demos) / "solve_spd_coupled.json"), "demos directory missing");
  Workspace ws;
  CHECK(run_cmd(agdlab_bin() + " solve-spd --config " + (fs::path(demos) / "solve_spd_coupled.json").string() +
                " --out " + (ws.dir / "out").string() + " > /dev/null") == 0);
}
