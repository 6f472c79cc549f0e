#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "wlks_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(WLKS_CLI_PATH) + " " + args + " >" + (kWork / "stdout.txt").string() +
                          " 2>" + (kWork / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

struct Workspace {
  Workspace() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
  ~Workspace() { fs::remove_all(kWork); }
};

}  // namespace

TEST_CASE("generate, train, evaluate") {
  Workspace ws;
  const auto data = kWork / "data";
  REQUIRE(run("gen --task density --nodes 300 --subgraphs 60 --size 10 --seed 1 --out " + data.string()) == 0);
  CHECK(fs::exists(data / "graph.txt"));
  CHECK(fs::exists(data / "subgraphs.txt"));

  const auto report = kWork / "report.txt";
  const auto model = kWork / "model.txt";
  REQUIRE(run("train --dataset " + data.string() + " --hops 0,global --T 2 --C 0.08,1.28 --alpha0 0.9 --out " +
              report.string() + " --model " + model.string()) == 0);
  const auto text = read(report);
  CHECK(text.find("grid.count=8\n") != std::string::npos);
  CHECK(fs::exists(report.string() + ".timings"));
  CHECK(read(model).rfind("wlks-model 1\n", 0) == 0);

  REQUIRE(run("eval --dataset " + data.string() + " --model " + model.string() + " --split test") == 0);
  const auto ev = read(kWork / "stdout.txt");
  CHECK(ev.find("split=test\n") != std::string::npos);
  const auto pos = text.find("test_f1=");
  REQUIRE(pos != std::string::npos);
  const auto line = text.substr(pos + 8, text.find('\n', pos) - pos - 8);
  CHECK(ev.find("micro_f1=" + line + "\n") != std::string::npos);

  CHECK(run("kernel --dataset " + data.string() + " --hops 0 --T 2 --out " + (kWork / "k.txt").string()) == 0);
  CHECK(read(kWork / "k.txt").rfind("60 60\n", 0) == 0);
  CHECK(run("trace --dataset " + data.string() + " --hops 1 --T 2 --subgraph 0") == 0);
  CHECK(read(kWork / "stdout.txt").rfind("# subgraph 0 hop 1", 0) == 0);
}

TEST_CASE("configuration problems exit with 2") {
  Workspace ws;
  CHECK(run("") == 2);
  CHECK(run("train --no-such-flag") == 2);
  CHECK(run("train --task density --hops 0,zero") == 2);
  CHECK(run("train --task density --C -1") == 2);
  CHECK(run("train --config /nonexistent/cfg.txt") == 2);
  CHECK(run("gen --task triangles --out " + (kWork / "x").string()) == 2);
  write(kWork / "bad.cfg", "colour=red\n");
  CHECK(run("train --config " + (kWork / "bad.cfg").string()) == 2);
}

TEST_CASE("malformed input data exits with 3") {
  Workspace ws;
  const auto data = kWork / "bad";
  fs::create_directories(data);
  write(data / "graph.txt", "N 4\n0 1\n1 9\n");
  write(data / "subgraphs.txt", "0 1\t0\ttrain\n");
  CHECK(run("train --dataset " + data.string()) == 3);
  CHECK(read(kWork / "stderr.txt").find("line 3") != std::string::npos);
  write(data / "graph.txt", "N 4\n0 1\n1 2\n");
  write(data / "subgraphs.txt", "0 1\t0\n");
  CHECK(run("train --dataset " + data.string()) == 3);
}

TEST_CASE("dropped self-loops and duplicates are reported") {
  Workspace ws;
  const auto data = kWork / "loops";
  fs::create_directories(data);
  std::string graph = "N 12\n0 0\n0 1\n1 0\n";
  for (int v = 1; v < 11; ++v) graph += std::to_string(v) + " " + std::to_string(v + 1) + "\n";
  write(data / "graph.txt", graph);
  write(data / "subgraphs.txt",
        "0 1\t0\ttrain\n2 3\t1\ttrain\n4 5\t0\ttrain\n6 7\t1\ttrain\n8 9\t0\tval\n10 11\t1\ttest\n");
  CHECK(run("kernel --dataset " + data.string() + " --hops 0 --T 1") == 0);
  const auto err = read(kWork / "stderr.txt");
  CHECK(err.find("self-loop") != std::string::npos);
  CHECK(err.find("duplicate") != std::string::npos);
}
