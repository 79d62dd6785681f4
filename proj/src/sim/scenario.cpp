#include "lms/sim/scenario.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>

#include "lms/catalog/io.hpp"
#include "lms/error.hpp"

namespace lms::sim {

using nlohmann::json;

nlohmann::json request_to_json(const Request& r) {
  if (r.op == Request::Op::Return) {
    return {{"at_ms", r.at_ms}, {"op", "return"}, {"record", catalog::record_to_json(*r.record)}};
  }
  return {{"at_ms", r.at_ms}, {"op", "retrieve"}, {"barcode", r.barcode->str()}, {"kiosk", r.kiosk}};
}

Request request_from_json(const json& j) {
  Request r;
  r.at_ms = j.at("at_ms").get<TimeMs>();
  if (r.at_ms < 0) throw Error(Errc::ScenarioInvalid, "negative at_ms");
  const auto op = j.at("op").get<std::string>();
  if (op == "return") {
    r.op = Request::Op::Return;
    r.record = catalog::record_from_json(j.at("record"));
    r.record->state = catalog::state::AtIntake{};
  } else if (op == "retrieve") {
    r.op = Request::Op::Retrieve;
    r.barcode = catalog::Barcode::validate(j.at("barcode").get<std::string>());
    r.kiosk = j.contains("kiosk") ? j["kiosk"].get<std::string>() : j.at("kiosk_id").get<std::string>();
  } else {
    throw Error(Errc::ScenarioInvalid, "unknown op '" + op + "'");
  }
  return r;
}

Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir) {
  try {
    Scenario s;
    const auto layout_path = base_dir / j.at("layout").get<std::string>();
    if (j.contains("arms")) {
      std::ifstream in(layout_path);
      if (!in) throw Error(Errc::IoError, "cannot open " + layout_path.string());
      json doc = json::parse(in);
      doc["arms"] = j["arms"];
      s.layout = parse_layout(doc);
    } else {
      s.layout = load_layout(layout_path);
    }
    if (j.contains("catalog") && !j["catalog"].is_null()) {
      s.catalog = catalog::load_catalog(base_dir / j["catalog"].get<std::string>());
    }
    s.seed = j.value("seed", std::uint64_t{0});
    TimeMs last = 0;
    for (const auto& rj : j.value("requests", json::array())) {
      Request r = request_from_json(rj);
      if (r.at_ms < last) throw Error(Errc::ScenarioInvalid, "request times must be nondecreasing");
      last = r.at_ms;
      s.requests.push_back(std::move(r));
    }
    if (j.contains("budget_ms") && !j["budget_ms"].is_null()) s.budget_ms = j["budget_ms"].get<TimeMs>();
    return s;
  } catch (const json::exception& ex) {
    throw Error(Errc::ScenarioInvalid, ex.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw Error(Errc::ParseError, path.string() + ": " + ex.what());
  }
  return parse_scenario(j, path.parent_path());
}

TimeMs naive_task_estimate_ms(const Layout& layout) {
  const railnet::RailGraph g = layout.build_graph();
  const shelving::ShelfMap shelves = layout.build_shelves();
  TimeMs worst = 0;
  for (const auto& spec : layout.arms) {
    const arm::ArmTiming timing = layout.timing_for(spec);
    const auto& k = timing.kinematics;
    double diameter = 0.0;
    for (const auto& a : g.nodes()) {
      for (const auto& b : g.nodes()) {
        if (!railnet::is_terminal(a.kind) || !railnet::is_terminal(b.kind) || a.id == b.id) continue;
        diameter = std::max(diameter, railnet::shortest_route(g, a.id, b.id, k).total_time_s);
      }
    }
    TimeMs shelf = 0;
    for (const auto& r : shelves.racks()) {
      for (std::size_t lv = 0; lv < r.levels.size(); ++lv) {
        const ShelfAddress far{r.id, static_cast<int>(lv), r.levels[lv].slot_count - 1};
        shelf = std::max(shelf, arm::plan_shelf_work(shelves, arm::ShelfAction::Pick, far, timing).total_ms());
      }
    }
    const TimeMs station = arm::plan_station_work(arm::ShelfAction::Pick, timing).total_ms();
    worst = std::max(worst, 3 * arm::to_ms(diameter) + station + shelf);
  }
  return worst + layout.rf_latency_ms;
}

TimeMs default_budget_ms(const Scenario& s) {
  TimeMs last = 0;
  for (const auto& r : s.requests) last = std::max(last, r.at_ms);
  return last + s.layout.rf_latency_ms +
         10 * static_cast<TimeMs>(s.requests.size()) * naive_task_estimate_ms(s.layout);
}

RunResult run_scenario(const Scenario& s, const RunOptions& options) {
  RunResult out;
  out.budget_ms = s.budget_ms.value_or(default_budget_ms(s));
  SimOptions so;
  so.seed = options.seed.value_or(s.seed);
  so.budget_ms = out.budget_ms;
  so.check_invariants = options.check_invariants;
  Simulator sim(s.layout, s.catalog, so);
  TimeMs last = 0;
  for (const auto& r : s.requests) {
    if (r.at_ms < last) throw Error(Errc::ScenarioInvalid, "request times must be nondecreasing");
    last = r.at_ms;
    sim.schedule(r);
  }
  sim.run();
  out.trace = sim.trace();
  out.metrics = compute_metrics(out.trace, sim.arm_ids());
  out.final_catalog = sim.orchestrator().catalog();
  out.log = sim.orchestrator().log();
  out.violations = sim.violations();
  return out;
}

void write_trace(const std::vector<Event>& trace, std::ostream& out) {
  for (const auto& e : trace) out << e.to_line() << '\n';
}

std::vector<Event> read_trace(std::istream& in) {
  std::vector<Event> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Event::from_json(json::parse(line)));
    } catch (const json::exception& ex) {
      throw Error(Errc::ParseError, "trace line " + std::to_string(n) + ": " + ex.what());
    }
  }
  return out;
}

namespace {

constexpr std::array<const char*, 8> kGenres = {"Biography", "Children", "Fiction", "History",
                                                "Mystery",   "Poetry",   "Science", "Travel"};
constexpr std::array<const char*, 16> kSurnames = {
    "Achebe", "Bronte", "Calvino", "Dumas",  "Eliot",   "Flaubert", "Gogol",  "Hesse",
    "Ibsen",  "Joyce",  "Kafka",   "Lessing", "Mahfouz", "Neruda",  "Orwell", "Pamuk"};
constexpr std::array<const char*, 16> kWords = {
    "River",  "Winter", "Garden", "Silence", "Empire", "Harbour", "Letters", "Mirror",
    "Orchard", "Storm",  "Tower",  "Voyage",  "Ashes",  "Lantern", "Meadow",  "Signal"};

template <std::size_t N>
const char* pick(Rng& rng, const std::array<const char*, N>& words) {
  return words[static_cast<std::size_t>(rng.between(0, N - 1))];
}

catalog::BookRecord random_book(Rng& rng, std::uint64_t prefix) {
  std::string digits = std::to_string(prefix);
  digits.insert(0, 12 - std::min<std::size_t>(12, digits.size()), '0');
  digits += static_cast<char>('0' + catalog::Barcode::check_digit(digits));
  catalog::BookRecord r{catalog::Barcode::validate(digits), {}, {}, {}, 1, catalog::state::AtIntake{}};
  const bool article = rng.uniform() < 0.25;
  r.title = std::string(article ? "The " : "") + pick(rng, kWords) + " of the " + pick(rng, kWords);
  r.author = std::string(pick(rng, kSurnames)) + ", " + static_cast<char>('A' + rng.between(0, 25)) + ".";
  r.genre = pick(rng, kGenres);
  const double u = rng.uniform();
  r.width_mm = static_cast<int>(u < 0.6 ? rng.between(10, 20) : u < 0.9 ? rng.between(21, 30) : rng.between(31, 40));
  return r;
}

}  // namespace

Workload make_workload(const Layout& layout, const WorkloadSpec& spec) {
  Rng rng(spec.seed);
  Workload w;
  shelving::ShelfMap shelves = layout.build_shelves();
  const catalog::SortPolicy policy;
  std::uint64_t next = spec.first_barcode;
  std::vector<catalog::Barcode> on_shelf;
  for (int i = 0; i < spec.shelved; ++i) {
    catalog::BookRecord r = random_book(rng, next++);
    try {
      r.state = catalog::state::Shelved{shelves.assign_slot(r, catalog::sort_key(r, policy))};
    } catch (const Error& ex) {
      throw Error(Errc::ScenarioInvalid, std::string("initial books do not fit: ") + ex.what());
    }
    on_shelf.push_back(r.barcode);
    w.catalog.upsert(std::move(r));
  }
  if (spec.retrievals > spec.shelved) throw Error(Errc::ScenarioInvalid, "more retrievals than shelved books");

  std::vector<bool> is_return;
  is_return.insert(is_return.end(), static_cast<std::size_t>(spec.returns), true);
  is_return.insert(is_return.end(), static_cast<std::size_t>(spec.retrievals), false);
  for (std::size_t i = is_return.size(); i > 1; --i) {
    std::swap(is_return[i - 1], is_return[static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(i) - 1))]);
  }

  const railnet::RailGraph g = layout.build_graph();
  const std::vector<NodeId> kiosks = g.kiosks();
  TimeMs t = 0;
  for (bool ret : is_return) {
    t += rng.between(0, spec.max_gap_ms);
    Request r;
    r.at_ms = t;
    if (ret) {
      r.op = Request::Op::Return;
      r.record = random_book(rng, next++);
    } else {
      r.op = Request::Op::Retrieve;
      const auto k = static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(on_shelf.size()) - 1));
      r.barcode = on_shelf[k];
      on_shelf.erase(on_shelf.begin() + static_cast<std::ptrdiff_t>(k));
      r.kiosk = kiosks[static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(kiosks.size()) - 1))];
    }
    w.requests.push_back(std::move(r));
  }
  return w;
}

nlohmann::json scenario_to_json(const std::string& layout_path, const std::string& catalog_path, std::uint64_t seed,
                                const std::vector<Request>& requests) {
  json reqs = json::array();
  for (const auto& r : requests) reqs.push_back(request_to_json(r));
  return {{"layout", layout_path}, {"catalog", catalog_path}, {"seed", seed}, {"requests", std::move(reqs)}};
}

}  // namespace lms::sim
