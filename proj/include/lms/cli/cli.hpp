#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lms::cli {

struct Simulate {
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_metrics;  // stdout when absent
  std::optional<std::string> out_trace;    // no trace when absent
};

struct Serve {
  std::string layout_path;
  std::string catalog_path;
  int port = 8080;
  double speed = 1.0;
  std::string host = "0.0.0.0";
};

struct Import {
  std::string csv_path;
  std::string catalog_path;
};

struct Route {
  std::string layout_path;
  std::string from;
  std::string to;
};

struct Assign {
  std::string layout_path;
  std::string catalog_path;
  std::string barcode;
};

/// Writes <out_dir>/catalog.jsonl and <out_dir>/scenario.json.
struct Generate {
  std::string layout_path;
  std::string out_dir;
  std::uint64_t seed = 42;
  int shelved = 40;
  int returns = 20;
  int retrievals = 5;
  std::int64_t max_gap_ms = 8000;
};

struct Help {
  std::string text;
};

using CliCommand = std::variant<Simulate, Serve, Import, Route, Assign, Generate, Help>;

/// `args` excludes the program name. Throws Error with UnknownFlag,
/// MissingArgument or ConflictingFlags; the message names the flag.
CliCommand parse_args(const std::vector<std::string>& args);

/// Executes a parsed command. Returns the process exit code: 0 success,
/// 1 domain error, 2 usage error.
int run(const CliCommand& cmd, std::ostream& out, std::ostream& err);

/// parse_args + run, mapping usage errors to 2.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads LMS_LOG (error|warn|info|debug); unset means warn.
/// Throws Error(UnknownFlag) for any other value.
void configure_logging();

}  // namespace lms::cli
