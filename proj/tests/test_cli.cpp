#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kCli = FJEST_CLI_PATH;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("fjest_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("gen-graph + ingest produce a normalized edge list and idmap") {
  TempDir tmp;
  const auto el = tmp.file("g.el");
  REQUIRE(run("gen-graph --kind er --n 200 --avg-degree 5 --seed 3 --out " + el) == 0);
  const auto norm = tmp.file("norm.el");
  REQUIRE(run("ingest --graph " + el + " --largest-cc --out " + norm) == 0);
  CHECK(fs::exists(norm));
  CHECK(fs::exists(norm + ".idmap"));
  CHECK(fs::exists(norm + ".manifest.json"));
  // idmap lines are "dense original"
  std::ifstream im(norm + ".idmap");
  std::int64_t dense, orig;
  REQUIRE((im >> dense >> orig));
  CHECK(dense == 0);
}

TEST_CASE("exact subcommand emits a valid report and z CSV") {
  TempDir tmp;
  const auto el = tmp.file("g.el");
  REQUIRE(run("gen-graph --kind regular --n 50 --degree 3 --seed 5 --out " + el) == 0);
  const auto rep = tmp.file("report.json");
  const auto zcsv = tmp.file("z.csv");
  REQUIRE(run("exact --graph " + el + " --opinions uniform --seed 1 --out " + rep +
              " --z-out " + zcsv) == 0);
  const json j = json::parse(slurp(rep));
  CHECK(j["S"]["estimate"].get<double>() > 0.0);
  CHECK(j["conservation_residual"].get<double>() < 1e-8);
  std::ifstream z(zcsv);
  std::string header;
  std::getline(z, header);
  CHECK(header == "dense_id,original_id,z");
}

TEST_CASE("estimate-z is deterministic for a fixed seed") {
  TempDir tmp;
  const auto el = tmp.file("g.el");
  REQUIRE(run("gen-graph --kind er --n 300 --avg-degree 4 --seed 7 --out " + el) == 0);
  const auto a = tmp.file("a.csv"), b = tmp.file("b.csv");
  const std::string common = "estimate-z --graph " + el +
                             " --opinions uniform --seed 11 --oracle s --method walk "
                             "--walks 200 --steps 100 --targets k-random:20 --with-exact ";
  REQUIRE(run(common + "--out " + a) == 0);
  REQUIRE(run(common + "--out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  std::ifstream f(a);
  std::string header;
  std::getline(f, header);
  CHECK(header == "original_id,z_hat,z_exact,abs_err");
}

TEST_CASE("estimate-z ppr rejects non-regular graphs with a data error") {
  TempDir tmp;
  const auto el = tmp.file("g.el");
  REQUIRE(run("gen-graph --kind er --n 100 --avg-degree 4 --seed 9 --out " + el) == 0);
  const int code = run("estimate-z --graph " + el +
                       " --opinions uniform --seed 1 --oracle s --method ppr "
                       "--epsilon 0.1 --targets k-random:2 --out " +
                       tmp.file("p.csv"));
  CHECK(code == 3);
}

TEST_CASE("estimate-s emits estimates with baselines") {
  TempDir tmp;
  const auto el = tmp.file("g.el");
  REQUIRE(run("gen-graph --kind regular --n 100 --degree 3 --seed 2 --out " + el) == 0);
  const auto out = tmp.file("s.csv");
  REQUIRE(run("estimate-s --graph " + el +
              " --opinions uniform --seed 4 --threshold 400 --reps 5 --method mean "
              "--targets k-random:30 --with-exact --out " +
              out) == 0);
  std::ifstream f(out);
  std::string header, line;
  std::getline(f, header);
  CHECK(header == "original_id,s_hat,s_exact,abs_err");
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 30);
}

TEST_CASE("targets can come from a file of original ids") {
  TempDir tmp;
  const auto el = tmp.file("g.el");
  REQUIRE(run("gen-graph --kind regular --n 60 --degree 3 --seed 3 --out " + el) == 0);
  const auto tf = tmp.file("targets.txt");
  {
    std::ofstream t(tf);
    t << "0\n5\n17\n";
  }
  const auto out = tmp.file("zt.csv");
  REQUIRE(run("estimate-z --graph " + el +
              " --opinions uniform --seed 1 --oracle s --method walk --walks 50 "
              "--steps 40 --targets file:" +
              tf + " --out " + out) == 0);
  std::ifstream f(out);
  std::string line;
  std::getline(f, line);  // header
  std::vector<std::string> ids;
  while (std::getline(f, line)) ids.push_back(line.substr(0, line.find(',')));
  CHECK(ids == std::vector<std::string>{"0", "5", "17"});
}

TEST_CASE("measures subcommand with repetitions writes an aggregate") {
  TempDir tmp;
  const auto el = tmp.file("g.el");
  REQUIRE(run("gen-graph --kind community-ring --n 400 --community-size 9 --out " + el) == 0);
  const auto rep = tmp.file("m.json");
  REQUIRE(run("measures --graph " + el +
              " --opinions uniform --seed 6 --oracle z --samples 200 --repetitions 3 "
              "--edge-sampling 500 --with-exact --out " +
              rep) == 0);
  const json agg = json::parse(slurp(rep));
  CHECK(agg["runs"].get<int>() == 3);
  CHECK(agg["S"].contains("mean"));
  CHECK(agg["S"].contains("std"));
  CHECK(fs::exists(rep + ".1"));
  CHECK(fs::exists(rep + ".3"));
  const json one = json::parse(slurp(rep + ".1"));
  CHECK(one["S"].contains("rel_err"));
  CHECK(one.contains("D_edge_sampling"));
}

TEST_CASE("manifest lets a run be reproduced byte for byte") {
  TempDir tmp;
  const auto el = tmp.file("g.el");
  REQUIRE(run("gen-graph --kind er --n 150 --avg-degree 4 --seed 8 --out " + el) == 0);
  const auto out = tmp.file("run.csv");
  REQUIRE(run("estimate-z --graph " + el +
              " --opinions uniform --seed 21 --oracle s --method walk --walks 100 "
              "--steps 80 --targets k-random:10 --out " +
              out) == 0);
  const std::string first = slurp(out);
  const json manifest = json::parse(slurp(out + ".manifest.json"));
  std::string replay = kCli;
  const auto argv = manifest["argv"].get<std::vector<std::string>>();
  for (std::size_t i = 1; i < argv.size(); ++i) replay += " " + argv[i];
  REQUIRE(std::system((replay + " 2>/dev/null").c_str()) == 0);
  CHECK(slurp(out) == first);
}

TEST_CASE("bench and buckets emit their CSV schemas") {
  TempDir tmp;
  const auto el = tmp.file("g.el");
  REQUIRE(run("gen-graph --kind er --n 400 --avg-degree 4 --seed 10 --out " + el) == 0);
  const auto bcsv = tmp.file("bench.csv");
  REQUIRE(run("bench --graph " + el +
              " --opinions uniform --seed 1 --walks 50 --steps 50 --targets 5 "
              "--repetitions 2 --out " +
              bcsv) == 0);
  std::ifstream bf(bcsv);
  std::string header;
  std::getline(bf, header);
  CHECK(header ==
        "targets,walks,steps,repetitions,total_seconds_mean,total_seconds_std,"
        "per_vertex_seconds");

  // trivial plan: one target, one walk, still a complete timing row
  const auto tiny = tmp.file("tiny.csv");
  REQUIRE(run("bench --graph " + el +
              " --opinions uniform --seed 2 --walks 1 --steps 1 --targets 1 "
              "--repetitions 1 --out " +
              tiny) == 0);
  std::ifstream tf(tiny);
  std::string trow;
  std::getline(tf, trow);  // header
  REQUIRE(std::getline(tf, trow));
  CHECK(trow.rfind("1,1,1,1,", 0) == 0);

  const auto ucsv = tmp.file("buckets.csv");
  REQUIRE(run("buckets --graph " + el +
              " --opinions uniform --seed 1 --buckets 5 --per-bucket 10 --walks 50 "
              "--steps 50 --repetitions 2 --out " +
              ucsv) == 0);
  std::ifstream uf(ucsv);
  std::getline(uf, header);
  CHECK(header == "bucket,mean_norm_err,norm_stddev");
  int rows = 0;
  std::string line;
  while (std::getline(uf, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("measures with the s-oracle runs the walk path end to end") {
  TempDir tmp;
  const auto el = tmp.file("g.el");
  REQUIRE(run("gen-graph --kind community-ring --n 300 --community-size 9 --out " + el) == 0);
  const auto rep = tmp.file("ms.json");
  REQUIRE(run("measures --graph " + el +
              " --opinions uniform --seed 2 --oracle s --samples 150 --walks 150 "
              "--steps 80 --with-exact --out " +
              rep) == 0);
  const json j = json::parse(slurp(rep));
  CHECK(j["S"]["rel_err"].get<double>() < 0.5);
  CHECK(j["oracle_queries"].get<std::uint64_t>() > 0);
}

TEST_CASE("FJ_THREADS fallback keeps outputs identical") {
  TempDir tmp;
  const auto el = tmp.file("g.el");
  REQUIRE(run("gen-graph --kind er --n 200 --avg-degree 4 --seed 13 --out " + el) == 0);
  const auto a = tmp.file("a.csv"), b = tmp.file("b.csv");
  const std::string common = "estimate-z --graph " + el +
                             " --opinions uniform --seed 3 --oracle s --method walk "
                             "--walks 100 --steps 60 --targets k-random:16 ";
  REQUIRE(run(common + "--threads 1 --out " + a) == 0);
  const std::string env_cmd =
      "FJ_THREADS=4 " + kCli + " " + common + "--out " + b + " 2>/dev/null";
  REQUIRE(WEXITSTATUS(std::system(env_cmd.c_str())) == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("exit codes: usage 2, data 3, capacity 4") {
  TempDir tmp;
  CHECK(run("estimate-z --oracle s") == 2);                       // missing required opts
  CHECK(run("exact --graph /nonexistent.el --out " + tmp.file("x.json")) == 3);
  const auto el = tmp.file("big.el");
  REQUIRE(run("gen-graph --kind community-ring --n 21000 --community-size 9 --out " + el) == 0);
  CHECK(run("exact --graph " + el + " --opinions uniform --solver dense --out " +
            tmp.file("y.json")) == 4);
}
