#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "lms/catalog/catalog.hpp"
#include "lms/catalog/transaction_log.hpp"
#include "lms/layout.hpp"
#include "lms/sim/metrics.hpp"
#include "lms/sim/simulator.hpp"

namespace lms::sim {

struct Scenario {
  Layout layout;
  catalog::Catalog catalog;
  std::uint64_t seed = 0;
  std::vector<Request> requests;  // at_ms nondecreasing
  std::optional<TimeMs> budget_ms;
};

/// {layout, catalog, seed, requests, budget_ms?, arms?}. Paths are relative
/// to `base_dir`; "arms" replaces the layout's arm list.
/// Throws ScenarioInvalid, ParseError, IoError or any layout error.
Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json request_to_json(const Request& r);
Request request_from_json(const nlohmann::json& j);

/// Upper bound on how long one task can take on an idle system: three
/// worst-case terminal-to-terminal trips plus station and shelf work at the
/// highest level and the farthest slot.
TimeMs naive_task_estimate_ms(const Layout& layout);
/// Last request arrival plus 10x the naive sequential time of all requests.
TimeMs default_budget_ms(const Scenario& s);

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
  bool check_invariants = false;
};

struct RunResult {
  std::vector<Event> trace;
  Metrics metrics;
  catalog::Catalog final_catalog;
  catalog::TransactionLog log;
  std::vector<std::string> violations;
  TimeMs budget_ms = 0;
};

/// Runs to quiescence. Throws SimTimeBudgetExceeded on a liveness failure.
RunResult run_scenario(const Scenario& s, const RunOptions& options = {});

void write_trace(const std::vector<Event>& trace, std::ostream& out);
std::vector<Event> read_trace(std::istream& in);

/// Random library traffic. Books get random titles and authors from small
/// word lists, widths 60% <= 20 mm, 30% 21-30 mm, 10% 31-40 mm. Retrievals
/// only target books shelved in the initial catalog, each at most once, so
/// every request is valid whatever the interleaving.
struct WorkloadSpec {
  std::uint64_t seed = 1;
  int shelved = 220;
  int returns = 300;
  int retrievals = 200;
  TimeMs max_gap_ms = 8000;  // arrival gaps uniform in [0, max_gap_ms]
  std::uint64_t first_barcode = 978000000000;  // 12-digit prefix of the first book
};

struct Workload {
  catalog::Catalog catalog;
  std::vector<Request> requests;
};

/// Throws ScenarioInvalid if the initial books do not fit the shelves.
Workload make_workload(const Layout& layout, const WorkloadSpec& spec);

nlohmann::json scenario_to_json(const std::string& layout_path, const std::string& catalog_path, std::uint64_t seed,
                                const std::vector<Request>& requests);

}  // namespace lms::sim
