#include "lms/cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lms/catalog/io.hpp"
#include "lms/error.hpp"
#include "lms/layout.hpp"
#include "lms/orchestrator/orchestrator.hpp"
#include "lms/railnet/routing.hpp"
#include "lms/service/engine.hpp"
#include "lms/service/http_server.hpp"
#include "lms/sim/scenario.hpp"

namespace lms::cli {

namespace fs = std::filesystem;

namespace {

bool is_usage(Errc c) { return c == Errc::UnknownFlag || c == Errc::MissingArgument || c == Errc::ConflictingFlags; }

// CLI11 reports failures by exception type; fold them into our three codes.
[[noreturn]] void rethrow_usage(const CLI::ParseError& e) {
  const std::string what = e.what();
  if (dynamic_cast<const CLI::RequiredError*>(&e) || dynamic_cast<const CLI::RequiresError*>(&e) ||
      dynamic_cast<const CLI::ArgumentMismatch*>(&e) || dynamic_cast<const CLI::ConversionError*>(&e) ||
      dynamic_cast<const CLI::ValidationError*>(&e)) {
    throw Error(Errc::MissingArgument, what);
  }
  if (dynamic_cast<const CLI::ExcludesError*>(&e)) throw Error(Errc::ConflictingFlags, what);
  throw Error(Errc::UnknownFlag, what);
}

std::atomic<bool> g_interrupted{false};
extern "C" void on_signal(int) { g_interrupted = true; }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

int do_simulate(const Simulate& c, std::ostream& out) {
  const sim::Scenario s = sim::load_scenario(c.scenario_path);
  sim::RunOptions ro;
  ro.seed = c.seed;
  spdlog::info("simulating {} requests, seed {}", s.requests.size(), c.seed.value_or(s.seed));
  const sim::RunResult r = sim::run_scenario(s, ro);
  spdlog::info("{} events, {} completed, {} failed, {} deadlocks resolved", r.trace.size(), r.metrics.tasks_completed,
               r.metrics.tasks_failed, r.metrics.deadlocks_resolved);
  const std::string csv = sim::metrics_csv(r.metrics);
  if (c.out_metrics) {
    write_file(*c.out_metrics, csv);
  } else {
    out << csv;
  }
  if (c.out_trace) {
    std::ofstream t(*c.out_trace, std::ios::binary);
    if (!t) throw Error(Errc::IoError, "cannot write " + *c.out_trace);
    sim::write_trace(r.trace, t);
  }
  return 0;
}

int do_serve(const Serve& c, std::ostream& out) {
  Layout layout = load_layout(c.layout_path);
  catalog::Catalog books = catalog::load_catalog(c.catalog_path);
  service::Engine engine(std::move(layout), std::move(books), {.speed = c.speed, .seed = 0});
  service::HttpServer server(engine);
  const int port = server.bind(c.host, c.port);
  out << "serving on http://" << c.host << ':' << port << '\n' << std::flush;
  spdlog::info("speed {}x", c.speed);

  g_interrupted = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread watcher([&] {
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  });
  server.run();
  g_interrupted = true;
  watcher.join();
  engine.stop();
  return 0;
}

int do_import(const Import& c, std::ostream& out) {
  std::ifstream in(c.csv_path);
  if (!in) throw Error(Errc::IoError, "cannot open " + c.csv_path);
  const auto records = catalog::read_import_csv(in);
  catalog::Catalog cat = fs::exists(c.catalog_path) ? catalog::load_catalog(c.catalog_path) : catalog::Catalog{};
  for (const auto& r : records) cat.upsert(r, catalog::UpsertMode::InsertOnly);
  catalog::save_catalog(cat, c.catalog_path);
  out << "imported " << records.size() << " books; catalog now holds " << cat.size() << '\n';
  return 0;
}

int do_route(const Route& c, std::ostream& out) {
  const Layout layout = load_layout(c.layout_path);
  const railnet::RailGraph g = layout.build_graph();
  const railnet::Path p = railnet::shortest_route(g, c.from, c.to, layout.kinematics);
  const auto nodes = p.nodes();
  const auto rot = p.rotations(g);
  std::string line = nodes.front();
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    if (i > 0 && rot[i - 1] > 0) line += fmt::format(" [turn {}]", rot[i - 1]);
    line += fmt::format(" -{}-> {}", p.steps[i].edge, p.steps[i].to);
  }
  out << line << '\n' << fmt::format("{:.3f} s", p.total_time_s) << '\n';
  return 0;
}

int do_assign(const Assign& c, std::ostream& out) {
  const Layout layout = load_layout(c.layout_path);
  const railnet::RailGraph g = layout.build_graph();
  const orchestrator::Orchestrator orch(catalog::load_catalog(c.catalog_path), layout.build_shelves(), g);
  const auto& rec = orch.catalog().at(catalog::Barcode::validate(c.barcode));
  if (const auto* s = std::get_if<catalog::state::Shelved>(&rec.state)) {
    out << nlohmann::json{{"address", s->address}, {"shelved", true}}.dump() << '\n';
    return 0;
  }
  shelving::ShelfMap shelves = orch.shelves();
  const ShelfAddress a = shelves.assign_slot(rec, catalog::sort_key(rec, orch.policy()));
  out << nlohmann::json{{"address", a}, {"shelved", false}}.dump() << '\n';
  return 0;
}

int do_generate(const Generate& c, std::ostream& out) {
  const Layout layout = load_layout(c.layout_path);
  const sim::Workload w = sim::make_workload(layout, {.seed = c.seed,
                                                      .shelved = c.shelved,
                                                      .returns = c.returns,
                                                      .retrievals = c.retrievals,
                                                      .max_gap_ms = c.max_gap_ms});
  fs::create_directories(c.out_dir);
  const fs::path dir(c.out_dir);
  catalog::save_catalog(w.catalog, dir / "catalog.jsonl");
  const std::string layout_ref =
      fs::relative(fs::absolute(c.layout_path), fs::absolute(dir)).generic_string();
  write_file(dir / "scenario.json",
             sim::scenario_to_json(layout_ref, "catalog.jsonl", c.seed, w.requests).dump(2) + "\n");
  out << "wrote " << w.catalog.size() << " books and " << w.requests.size() << " requests to " << c.out_dir << '\n';
  return 0;
}

}  // namespace

CliCommand parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Automated library: simulation, kiosk service and catalog tools", "lms"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Simulate sim;
  std::uint64_t seed = 0;
  std::string out_metrics, out_trace;
  auto* s = app.add_subcommand("simulate", "Run a scenario and print metrics as CSV");
  s->add_option("scenario", sim.scenario_path, "Scenario JSON file")->required();
  auto* seed_opt = s->add_option("--seed", seed, "Override the scenario seed");
  auto* out_opt = s->add_option("--out", out_metrics, "Write metrics CSV here instead of stdout");
  auto* trace_opt = s->add_option("--trace", out_trace, "Write the event trace (JSON lines) here");

  Serve serve;
  auto* v = app.add_subcommand("serve", "Run the kiosk HTTP service against a live simulation");
  v->add_option("layout", serve.layout_path, "Layout JSON file")->required();
  v->add_option("--catalog", serve.catalog_path, "Catalog JSON-lines file")->required();
  v->add_option("--port", serve.port, "TCP port (0 picks one)")->capture_default_str()->check(CLI::Range(0, 65535));
  v->add_option("--speed", serve.speed, "Simulated seconds per wall second")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  v->add_option("--host", serve.host, "Address to bind")->capture_default_str();

  Import imp;
  auto* i = app.add_subcommand("import", "Add books from a CSV file to a catalog");
  i->add_option("csv", imp.csv_path, "CSV with header barcode,title,author,genre,width_mm")->required();
  i->add_option("--catalog", imp.catalog_path, "Catalog JSON-lines file, created if absent")->required();

  Route route;
  auto* r = app.add_subcommand("route", "Print the fastest rail route between two nodes");
  r->add_option("layout", route.layout_path, "Layout JSON file")->required();
  r->add_option("--from", route.from, "Start node")->required();
  r->add_option("--to", route.to, "End node")->required();

  Assign assign;
  auto* a = app.add_subcommand("assign", "Print the shelf slot a book would be returned to");
  a->add_option("layout", assign.layout_path, "Layout JSON file")->required();
  a->add_option("--catalog", assign.catalog_path, "Catalog JSON-lines file")->required();
  a->add_option("--barcode", assign.barcode, "EAN-13 barcode")->required();

  Generate gen;
  auto* g = app.add_subcommand("generate", "Write a random catalog and scenario for a layout");
  g->add_option("layout", gen.layout_path, "Layout JSON file")->required();
  g->add_option("--out-dir", gen.out_dir, "Output directory")->required();
  g->add_option("--seed", gen.seed, "Generator and scenario seed")->capture_default_str();
  g->add_option("--shelved", gen.shelved, "Books on the shelves at the start")->capture_default_str()->check(CLI::NonNegativeNumber);
  g->add_option("--returns", gen.returns, "Return requests")->capture_default_str()->check(CLI::NonNegativeNumber);
  g->add_option("--retrievals", gen.retrievals, "Retrieval requests")->capture_default_str()->check(CLI::NonNegativeNumber);
  g->add_option("--max-gap-ms", gen.max_gap_ms, "Largest gap between arrivals")->capture_default_str()->check(CLI::NonNegativeNumber);

  if (!args.empty() && !args.front().starts_with('-') && app.get_subcommand_no_throw(args.front()) == nullptr) {
    throw Error(Errc::UnknownFlag, "unknown subcommand '" + args.front() + "'");
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    for (auto* sub : app.get_subcommands()) return Help{sub->help()};
    return Help{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    return Help{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    rethrow_usage(e);
  }

  if (s->parsed()) {
    if (seed_opt->count() > 0) sim.seed = seed;
    if (out_opt->count() > 0) sim.out_metrics = out_metrics;
    if (trace_opt->count() > 0) sim.out_trace = out_trace;
    if (sim.out_metrics && sim.out_trace && fs::path(*sim.out_metrics) == fs::path(*sim.out_trace)) {
      throw Error(Errc::ConflictingFlags, "--out and --trace name the same file");
    }
    return sim;
  }
  if (v->parsed()) return serve;
  if (i->parsed()) return imp;
  if (r->parsed()) return route;
  if (a->parsed()) return assign;
  if (gen.retrievals > gen.shelved) throw Error(Errc::ConflictingFlags, "--retrievals exceeds --shelved");
  return gen;
}

int run(const CliCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    return std::visit(
        [&](const auto& c) -> int {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Simulate>) return do_simulate(c, out);
          if constexpr (std::is_same_v<T, Serve>) return do_serve(c, out);
          if constexpr (std::is_same_v<T, Import>) return do_import(c, out);
          if constexpr (std::is_same_v<T, Route>) return do_route(c, out);
          if constexpr (std::is_same_v<T, Assign>) return do_assign(c, out);
          if constexpr (std::is_same_v<T, Generate>) return do_generate(c, out);
          if constexpr (std::is_same_v<T, Help>) {
            out << c.text;
            return 0;
          }
        },
        cmd);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_usage(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliCommand cmd;
  try {
    configure_logging();
    cmd = parse_args(args);
  } catch (const Error& e) {
    err << "usage error: " << e.what() << "\nrun 'lms --help' for usage\n";
    return is_usage(e.code()) ? 2 : 1;
  }
  return run(cmd, out, err);
}

void configure_logging() {
  if (!spdlog::get("lms")) spdlog::set_default_logger(spdlog::stderr_color_mt("lms"));
  const char* env = std::getenv("LMS_LOG");
  const std::string level = env ? env : "warn";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "warn") {
    spdlog::set_level(spdlog::level::warn);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    throw Error(Errc::UnknownFlag, "LMS_LOG must be one of error, warn, info, debug (got '" + level + "')");
  }
}

}  // namespace lms::cli
