#pragma once

// Command-line front end: experiment specs, the key=value config format, and
// result files.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace plaq {

inline constexpr const char* kEngineVersion = "plaq 0.1.0";

/// Every parameter any subcommand reads. Fields a subcommand does not use
/// are still echoed so that a result file reproduces its run exactly.
struct ExperimentSpec {
  std::string subcommand;
  int dim = 3;
  double p = 0.0;
  std::uint64_t seed = 1;
  std::int64_t rmax = 0;
  std::uint64_t trial = 0;
  bool sites = false;
  int rays = 1000;
  int kmax = 8;
  std::vector<int> rlist{1, 2, 3, 4, 5, 6, 7, 8};
  std::uint64_t trials = 1000;
  std::string target = "cluster";
  bool bound = false;
  std::string variant = "good";
  std::vector<std::int64_t> L{16, 32, 64};
  double tol = 5e-3;
  bool cross_check = false;
  std::string mode = "exhaustive";
  int nx = 3;
  int ny = 2;
  std::string a = "0";
  std::string b = "inf";
  std::string r = "1/2";
  std::string s = "2";
  std::int64_t alpha = 0;
  std::int64_t beta = 0;
  int extent = 10;
  int threads = 0;
  bool verify = false;
  std::string output;
  std::string format = "auto";
  std::string emit_off;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// key=value lines, one per field, in a fixed order.
std::string to_config(const ExperimentSpec& spec);

/// Applies the key=value lines of `text` on top of `base`. Blank lines and
/// lines starting with '#' are skipped. Throws std::invalid_argument on an
/// unknown key or a malformed value.
ExperimentSpec parse_config(const std::string& text, ExperimentSpec base = {});

/// A cell of a result table. Empty cells are written as an empty CSV field
/// and as JSON null.
using ResultCell = std::variant<std::monostate, std::int64_t, std::uint64_t, double, std::string>;

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<ResultCell>> rows;
  /// Extra "# key: value" header lines (e.g. escape counts).
  std::vector<std::pair<std::string, std::string>> notes;
};

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

/// CSV (with '#' header lines) or JSON lines (header object first). The
/// timestamp sits on its own line and is the only run-dependent content.
void write_results(const ExperimentSpec& spec, const ResultTable& table, const std::string& format,
                   std::ostream& out);

/// Exit codes: 0 success, 1 internal failure or a failed --verify check,
/// 2 invalid arguments.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plaq
