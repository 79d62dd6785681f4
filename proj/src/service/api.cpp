#include "lms/service/api.hpp"

#include <charconv>

#include "lms/catalog/io.hpp"
#include "lms/error.hpp"

namespace lms::service {

using nlohmann::json;

namespace {

Response ok(json body) { return {200, body.dump()}; }

Response fail(int status, std::string_view code, const std::string& message) {
  return {status, json{{"error", code}, {"message", message}}.dump()};
}

int status_for(Errc c) {
  switch (c) {
    case Errc::UnknownBook:
    case Errc::UnknownTask:
      return 404;
    case Errc::BookNotShelved:
      return 409;
    default:
      return 400;
  }
}

Response from_error(const Error& e) { return fail(status_for(e.code()), to_string(e.code()), e.what()); }

json parse_body(std::string_view body) {
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw Error(Errc::ParseError, "request body must be a JSON object");
    return j;
  } catch (const json::exception& ex) {
    throw Error(Errc::ParseError, ex.what());
  }
}

}  // namespace

Response Api::handle(std::string_view method, std::string_view path, const std::map<std::string, std::string>& query,
                     std::string_view body) {
  constexpr std::string_view task_prefix = "/api/tasks/";
  const bool get = method == "GET";
  const bool post = method == "POST";
  try {
    if (path == "/api/books") return get ? books(query) : fail(405, "MethodNotAllowed", "use GET");
    if (path == "/api/returns") return post ? submit_return(body) : fail(405, "MethodNotAllowed", "use POST");
    if (path == "/api/requests") return post ? submit_retrieve(body) : fail(405, "MethodNotAllowed", "use POST");
    if (path == "/api/tasks") return get ? tasks() : fail(405, "MethodNotAllowed", "use GET");
    if (path.starts_with(task_prefix)) {
      return get ? task(path.substr(task_prefix.size())) : fail(405, "MethodNotAllowed", "use GET");
    }
    if (path == "/api/arms") return get ? arms() : fail(405, "MethodNotAllowed", "use GET");
    if (path == "/api/layout") return get ? layout() : fail(405, "MethodNotAllowed", "use GET");
    if (path == "/api/sim/speed") return post ? speed(body) : fail(405, "MethodNotAllowed", "use POST");
    return fail(404, "NotFound", "no route for " + std::string(path));
  } catch (const Error& e) {
    return from_error(e);
  } catch (const json::exception& e) {
    return fail(400, "ParseError", e.what());
  }
}

Response Api::books(const std::map<std::string, std::string>& query) const {
  catalog::BookQuery q;
  if (auto it = query.find("title"); it != query.end()) q.title = it->second;
  if (auto it = query.find("author"); it != query.end()) q.author = it->second;
  if (auto it = query.find("genre"); it != query.end()) q.genre = it->second;
  const auto snap = engine_.snapshot();
  json out = json::array();
  for (const auto& r : snap->catalog.query(q, snap->policy)) {
    json rec = catalog::record_to_json(r);
    rec.erase("state");
    out.push_back({{"record", std::move(rec)}, {"state", catalog::state_to_json(r.state)}});
  }
  return ok(std::move(out));
}

Response Api::submit_return(std::string_view body) {
  const json j = parse_body(body);
  if (!j.contains("record")) throw Error(Errc::ParseError, "missing 'record'");
  json rec = j["record"];
  if (!rec.is_object()) throw Error(Errc::ParseError, "'record' must be an object");
  rec["state"] = catalog::state_to_json(catalog::state::AtIntake{});
  catalog::BookRecord record = catalog::record_from_json(rec);
  if (record.width_mm < 1) throw Error(Errc::ConfigInvalid, "width_mm must be >= 1");
  const TaskId id = engine_.execute([record = std::move(record)](sim::Simulator& s) mutable {
    return s.submit_return(std::move(record));
  });
  return ok({{"task_id", id}});
}

Response Api::submit_retrieve(std::string_view body) {
  const json j = parse_body(body);
  const auto barcode = catalog::Barcode::validate(j.at("barcode").get<std::string>());
  const KioskId kiosk = j.contains("kiosk_id") ? j["kiosk_id"].get<std::string>() : j.at("kiosk").get<std::string>();
  const TaskId id = engine_.execute([&](sim::Simulator& s) { return s.submit_retrieve(barcode, kiosk); });
  return ok({{"task_id", id}});
}

Response Api::task(std::string_view id) const {
  TaskId n = 0;
  const auto [end, ec] = std::from_chars(id.data(), id.data() + id.size(), n);
  if (ec != std::errc{} || end != id.data() + id.size()) {
    return fail(400, "ParseError", "task id must be a positive integer");
  }
  const auto snap = engine_.snapshot();
  const auto it = snap->tasks.find(n);
  if (it == snap->tasks.end()) return fail(404, "UnknownTask", "task " + std::string(id));
  return ok(orchestrator::task_to_json(it->second));
}

Response Api::tasks() const {
  const auto snap = engine_.snapshot();
  json out = json::array();
  for (const auto& [id, t] : snap->tasks) out.push_back(orchestrator::task_to_json(t));
  return ok(std::move(out));
}

Response Api::arms() const {
  const auto snap = engine_.snapshot();
  json out = json::array();
  for (const auto& a : snap->arms) out.push_back(sim::arm_view_to_json(a));
  return ok({{"time_ms", snap->now_ms}, {"arms", std::move(out)}});
}

Response Api::layout() const { return ok(engine_.layout().document); }

Response Api::speed(std::string_view body) {
  const json j = parse_body(body);
  const json& f = j.at("factor");
  if (!f.is_number()) throw Error(Errc::ParseError, "'factor' must be a number");
  engine_.set_speed(f.get<double>());
  return ok({{"factor", f.get<double>()}});
}

}  // namespace lms::service
