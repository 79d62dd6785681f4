#include "lms/catalog/io.hpp"

#include <fstream>
#include <sstream>

#include "lms/error.hpp"

using nlohmann::json;

namespace lms {

void to_json(json& j, const ShelfAddress& a) {
  j = json{{"rack", a.rack}, {"level", a.level}, {"slot", a.slot}};
}

void from_json(const json& j, ShelfAddress& a) {
  a.rack = j.at("rack").get<int>();
  a.level = j.at("level").get<int>();
  a.slot = j.at("slot").get<int>();
}

}  // namespace lms

namespace lms::catalog {

namespace {

template <typename F>
auto parse_line(const std::string& source, std::size_t line_no, F&& f) {
  try {
    return f();
  } catch (const json::exception& ex) {
    throw Error(Errc::ParseError, source + ":" + std::to_string(line_no) + ": " + ex.what());
  } catch (const Error& ex) {
    throw Error(ex.code(), source + ":" + std::to_string(line_no) + ": " + ex.what());
  }
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return in;
}

}  // namespace

json state_to_json(const BookState& s) {
  struct Visitor {
    json operator()(const state::AtIntake&) const { return {{"kind", "AtIntake"}}; }
    json operator()(const state::Queued& q) const { return {{"kind", "Queued"}, {"task", q.task}}; }
    json operator()(const state::InTransit& t) const {
      return {{"kind", "InTransit"}, {"arm", t.arm}};
    }
    json operator()(const state::Shelved& sh) const {
      return {{"kind", "Shelved"}, {"address", sh.address}};
    }
    json operator()(const state::AtKiosk& k) const {
      return {{"kind", "AtKiosk"}, {"kiosk", k.kiosk}};
    }
    json operator()(const state::ManualHandling&) const { return {{"kind", "ManualHandling"}}; }
  };
  return std::visit(Visitor{}, s);
}

BookState state_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "AtIntake") return state::AtIntake{};
  if (kind == "Queued") return state::Queued{j.at("task").get<TaskId>()};
  if (kind == "InTransit") return state::InTransit{j.at("arm").get<ArmId>()};
  if (kind == "Shelved") return state::Shelved{j.at("address").get<ShelfAddress>()};
  if (kind == "AtKiosk") return state::AtKiosk{j.at("kiosk").get<std::string>()};
  if (kind == "ManualHandling") return state::ManualHandling{};
  throw Error(Errc::ParseError, "unknown book state '" + kind + "'");
}

json record_to_json(const BookRecord& r) {
  return json{{"barcode", r.barcode.str()}, {"title", r.title},       {"author", r.author},
              {"genre", r.genre},           {"width_mm", r.width_mm}, {"state", state_to_json(r.state)}};
}

BookRecord record_from_json(const json& j) {
  BookRecord r{Barcode::validate(j.at("barcode").get<std::string>()), j.value("title", ""),
               j.value("author", ""), j.value("genre", "")};
  r.width_mm = j.at("width_mm").get<int>();
  if (r.width_mm < 1) throw Error(Errc::ConfigInvalid, "width_mm must be >= 1");
  if (j.contains("state")) r.state = state_from_json(j.at("state"));
  return r;
}

json entry_to_json(const TransactionEntry& e) {
  json j{{"seq", e.seq},
         {"time_ms", e.time_ms},
         {"kind", std::string(to_string(e.kind))},
         {"barcode", e.barcode.str()}};
  if (e.address) j["address"] = *e.address;
  if (e.arm_id) j["arm_id"] = *e.arm_id;
  if (e.task_id) j["task_id"] = *e.task_id;
  if (e.kiosk) j["kiosk"] = *e.kiosk;
  return j;
}

TransactionEntry entry_from_json(const json& j) {
  TransactionEntry e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.time_ms = j.at("time_ms").get<TimeMs>();
  e.kind = parse_tx_kind(j.at("kind").get<std::string>());
  e.barcode = Barcode::validate(j.at("barcode").get<std::string>());
  if (j.contains("address")) e.address = j.at("address").get<ShelfAddress>();
  if (j.contains("arm_id")) e.arm_id = j.at("arm_id").get<ArmId>();
  if (j.contains("task_id")) e.task_id = j.at("task_id").get<TaskId>();
  if (j.contains("kiosk")) e.kiosk = j.at("kiosk").get<std::string>();
  return e;
}

Catalog read_catalog(std::istream& in) {
  Catalog catalog;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    parse_line("catalog", line_no, [&] {
      catalog.upsert(record_from_json(json::parse(line)), UpsertMode::InsertOnly);
      return 0;
    });
  }
  return catalog;
}

Catalog load_catalog(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_catalog(in);
}

void write_catalog(const Catalog& catalog, std::ostream& out) {
  for (const auto& [barcode, rec] : catalog.records()) out << record_to_json(rec).dump() << '\n';
}

void save_catalog(const Catalog& catalog, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  write_catalog(catalog, out);
}

TransactionLog load_log(const std::filesystem::path& path) {
  auto in = open_in(path);
  TransactionLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    parse_line(path.string(), line_no, [&] {
      log.append(entry_from_json(json::parse(line)));
      return 0;
    });
  }
  return log;
}

void write_log(const TransactionLog& log, std::ostream& out) {
  for (const auto& e : log.entries()) out << entry_to_json(e).dump() << '\n';
}

void append_log(const std::filesystem::path& path, const std::vector<TransactionEntry>& batch) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(Errc::IoError, "cannot append to " + path.string());
  for (const auto& e : batch) out << entry_to_json(e).dump() << '\n';
  out.flush();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (quoted) throw Error(Errc::ParseError, "unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

std::vector<BookRecord> read_import_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::ParseError, "empty CSV");
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected{"barcode", "title", "author", "genre", "width_mm"};
  if (header != expected) {
    throw Error(Errc::ParseError, "CSV header must be barcode,title,author,genre,width_mm");
  }
  std::vector<BookRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    out.push_back(parse_line("csv", line_no, [&] {
      const auto f = split_csv_line(line);
      if (f.size() != expected.size()) {
        throw Error(Errc::ParseError, "expected 5 fields, got " + std::to_string(f.size()));
      }
      BookRecord r{Barcode::validate(f[0]), f[1], f[2], f[3]};
      std::size_t used = 0;
      try {
        r.width_mm = std::stoi(f[4], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != f[4].size() || r.width_mm < 1) {
        throw Error(Errc::ParseError, "width_mm must be a positive integer");
      }
      return r;
    }));
  }
  return out;
}

}  // namespace lms::catalog
