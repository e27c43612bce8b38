#include <doctest.h>

#include <stdexcept>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "plaq/cli.hpp"

using namespace plaq;
using Json = nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "plaq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

// Data lines of a CSV result: everything after the '#' header and the column row.
std::vector<std::string> csv_rows(const std::string& s) {
  std::vector<std::string> rows;
  bool header_seen = false;
  for (const auto& line : lines_of(s)) {
    if (line.starts_with("#")) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

std::string without_timestamp(const std::string& s) {
  std::string kept;
  for (const auto& line : lines_of(s)) {
    if (line.find("timestamp") == std::string::npos) kept += line + "\n";
  }
  return kept;
}

struct ScopedEnv {
  explicit ScopedEnv(const char* value) { setenv("PLAQ_SEED", value, 1); }
  ~ScopedEnv() { unsetenv("PLAQ_SEED"); }
};

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("plaq_test_" + std::to_string(getpid()) + "_" + name);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config text round trip") {
    ExperimentSpec spec;
    spec.subcommand = "tail";
    spec.p = 0.1;
    spec.tol = 1.0 / 3.0;
    spec.rlist = {2, 5, 9};
    spec.L = {128};
    spec.b = "5/2";
    spec.bound = true;
    spec.output = "out.csv";
    const auto back = parse_config(to_config(spec));
    CHECK(back == spec);
    CHECK(back.tol == 1.0 / 3.0);
  }

  TEST_CASE("config parsing errors") {
    CHECK_THROWS_AS(parse_config("nonsense=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("dim"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("dim=three"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("bound=maybe"), std::invalid_argument);
    const auto spec = parse_config("# comment\n\n  dim = 2 \nseed=9\n");
    CHECK(spec.dim == 2);
    CHECK(spec.seed == 9);
  }

  TEST_CASE("format_double round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, 0.0}) {
      CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.5) == "0.5");
  }

  TEST_CASE("an empty table still has its column row") {
    ResultTable t;
    t.columns = {"a", "b"};
    std::ostringstream out;
    write_results(ExperimentSpec{}, t, "csv", out);
    const auto ls = lines_of(out.str());
    CHECK(ls.back() == "a,b");
    CHECK(csv_rows(out.str()).empty());
  }

  TEST_CASE("saw counts") {
    const auto r = invoke({"saw", "--dim", "3", "--kmax", "3"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].starts_with("1,6,6,"));
    CHECK(rows[1].starts_with("2,30,30,"));
    CHECK(rows[2].starts_with("3,150,150,"));
    CHECK(r.out.starts_with("# engine: "));
    CHECK(r.out.find("# spec: kmax=3") != std::string::npos);
  }

  TEST_CASE("sphere of an isolated origin") {
    const auto r = invoke({"sphere", "--dim", "3", "--p", "0", "--rmax", "5", "--verify"});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    const auto& res = j["result"];
    CHECK(res["V"] == 8);
    CHECK(res["E"] == 12);
    CHECK(res["F"] == 6);
    CHECK(res["euler_characteristic"] == 2);
    CHECK(res["verdict_sphere"] == "verified");
    CHECK(j["engine"] == kEngineVersion);
    CHECK(j["spec"]["subcommand"] == "sphere");
  }

  TEST_CASE("sphere OFF export") {
    const auto path = temp_file("cube.off");
    const auto r = invoke({"sphere", "--p", "0", "--rmax", "5", "--emit-off", path.string()});
    REQUIRE(r.code == 0);
    std::ifstream in(path);
    std::string magic;
    int nv = 0, nf = 0;
    in >> magic >> nv >> nf;
    CHECK(magic == "OFF");
    CHECK(nv == 8);
    CHECK(nf == 6);
    std::filesystem::remove(path);
    CHECK(invoke({"sphere", "--dim", "2", "--p", "0", "--rmax", "5", "--format", "off"}).code == 2);
  }

  TEST_CASE("a failed check only changes the exit code under --verify") {
    CHECK(invoke({"sphere", "--p", "1", "--rmax", "3"}).code == 0);
    const auto r = invoke({"sphere", "--p", "1", "--rmax", "3", "--verify"});
    CHECK(r.code == 1);
    CHECK(r.err.find("verify:") != std::string::npos);
  }

  TEST_CASE("argument errors exit with 2") {
    CHECK(invoke({"tail", "--dim", "3", "--p", "0.5", "--bound", "--trials", "10"}).code == 2);
    CHECK(invoke({"saw", "--bogus"}).code == 2);
    CHECK(invoke({"saw", "--dim", "9"}).code == 2);
    CHECK(invoke({"critical", "--variant", "sideways"}).code == 2);
    CHECK(invoke({"cluster", "--p", "0.1", "--rmax", "5", "--format", "csv"}).code == 2);
    CHECK(invoke({"skeleton", "--a", "1/2", "--b", "2", "--r", "1/3", "--s", "3/2", "--trials", "0"}).code == 2);
    CHECK(invoke({"cluster", "--p", "1.5", "--rmax", "5"}).code == 2);
    CHECK(invoke({"cluster", "--config", "/nonexistent/plaq.cfg"}).code == 2);
    CHECK(invoke({}).code == 2);
  }

  TEST_CASE("csv and jsonl carry the same values") {
    const std::vector<std::string> base{"tail", "--dim", "2", "--p", "0.1", "--rlist", "1,2,3", "--trials", "300",
                                        "--bound", "--seed", "4"};
    auto csv_args = base;
    csv_args.insert(csv_args.end(), {"--format", "csv"});
    auto jsonl_args = base;
    jsonl_args.insert(jsonl_args.end(), {"--format", "jsonl"});
    const auto c = invoke(csv_args);
    const auto j = invoke(jsonl_args);
    REQUIRE(c.code == 0);
    REQUIRE(j.code == 0);
    const auto rows = csv_rows(c.out);
    const auto jl = lines_of(j.out);
    REQUIRE(jl.size() == 2 + rows.size());
    const auto header = Json::parse(jl[0]);
    const auto columns = header["columns"].get<std::vector<std::string>>();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto obj = Json::parse(jl[2 + i]);
      std::istringstream cells(rows[i]);
      std::size_t k = 0;
      for (std::string cell; std::getline(cells, cell, ','); ++k) {
        const auto& v = obj[columns[k]];
        if (cell.empty()) {
          CHECK(v.is_null());
        } else {
          CHECK(std::stod(cell) == v.get<double>());
        }
      }
      CHECK(k == columns.size());
    }
  }

  TEST_CASE("slope-only check outside the explicit regime") {
    const auto r = invoke({"tail", "--dim", "2", "--p", "0.2", "--rlist", "1,2,3,4,5", "--trials", "4000", "--verify"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# log_slope: -") != std::string::npos);
    CHECK(r.out.find("# slope_consistent: true") != std::string::npos);
    const auto in_regime = invoke({"tail", "--dim", "2", "--p", "0.05", "--rlist", "1,2", "--trials", "100"});
    CHECK(in_regime.out.find("log_slope") == std::string::npos);
  }

  TEST_CASE("reruns differ only in the timestamp") {
    const std::vector<std::string> args{"tail", "--dim", "3", "--p", "0.03", "--rlist", "1,2,3", "--trials", "500"};
    const auto a = invoke(args);
    auto more = args;
    more.insert(more.end(), {"--threads", "3"});
    const auto b = invoke(more);
    REQUIRE(a.code == 0);
    CHECK(csv_rows(a.out) == csv_rows(b.out));
    CHECK(without_timestamp(a.out) == without_timestamp(invoke(args).out));
  }

  TEST_CASE("seed precedence: flag over config over environment") {
    const auto seed_line = [](const Outcome& o) {
      for (const auto& line : lines_of(o.out)) {
        if (line.starts_with("# spec: seed=")) return line.substr(13);
      }
      return std::string();
    };
    const std::vector<std::string> args{"saw", "--dim", "2", "--kmax", "1"};
    CHECK(seed_line(invoke(args)) == "1");
    ScopedEnv env("77");
    CHECK(seed_line(invoke(args)) == "77");
    const auto cfg = temp_file("seed.cfg");
    {
      std::ofstream f(cfg);
      f << "seed=9\nkmax=2\n";
    }
    auto with_cfg = std::vector<std::string>{"saw", "--config", cfg.string()};
    const auto from_cfg = invoke(with_cfg);
    CHECK(seed_line(from_cfg) == "9");
    CHECK(csv_rows(from_cfg.out).size() == 2);
    with_cfg.insert(with_cfg.end(), {"--seed", "5"});
    CHECK(seed_line(invoke(with_cfg)) == "5");
    std::filesystem::remove(cfg);
  }

  TEST_CASE("output file") {
    const auto path = temp_file("dual.json");
    const auto r = invoke({"dual2d", "--dim", "2", "--nx", "2", "--ny", "2", "--output", path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    const auto j = Json::parse(in);
    CHECK(j["result"]["configs"] == 256);
    CHECK(j["result"]["exact"] == true);
    std::filesystem::remove(path);
  }

  TEST_CASE("skeleton report") {
    const auto r = invoke({"skeleton", "--trials", "200", "--p", "0.5"});
    REQUIRE(r.code == 0);
    const auto res = Json::parse(r.out)["result"];
    CHECK(res["alpha"] == 1);
    CHECK(res["beta"] == 1);
    CHECK(res["N"] == 4);
    CHECK(res["pairs_checked"] == 4950);
    CHECK(res["pairwise_disjoint"] == true);
    CHECK(res["p_to_N"].get<double>() == 0.0625);
  }

  TEST_CASE("critical table") {
    const auto r = invoke({"critical", "--variant", "oriented", "--dim", "2", "--L", "16,32", "--trials", "200",
                           "--tol", "0.002"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].starts_with("16,"));
    CHECK(rows[1].starts_with("32,"));
  }

  TEST_CASE("the installed binary") {
    const std::string cli = PLAQ_CLI_PATH;
    const int ok = std::system((cli + " saw --dim 2 --kmax 2 > /dev/null").c_str());
    REQUIRE(WIFEXITED(ok));
    CHECK(WEXITSTATUS(ok) == 0);
    const int bad = std::system((cli + " saw --nope > /dev/null 2>&1").c_str());
    REQUIRE(WIFEXITED(bad));
    CHECK(WEXITSTATUS(bad) == 2);
  }
}
