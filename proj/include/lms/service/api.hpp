#pragma once

#include <map>
#include <string>
#include <string_view>

#include "lms/service/engine.hpp"

namespace lms::service {

struct Response {
  int status = 200;
  std::string body;  // JSON
};

/// The kiosk-facing HTTP surface minus transport, so it can be exercised
/// without sockets. Reads come from the current snapshot; writes go through
/// the engine's command queue. The event stream is transport-specific and
/// lives in HttpServer.
///
/// Errors map to 400 (malformed input, bad barcode, unknown kiosk, duplicate
/// return), 404 (unknown book, task or route), 405 (wrong method) and 409
/// (book not on the shelf).
class Api {
 public:
  explicit Api(Engine& engine) : engine_(engine) {}

  Response handle(std::string_view method, std::string_view path, const std::map<std::string, std::string>& query,
                  std::string_view body);

 private:
  Response books(const std::map<std::string, std::string>& query) const;
  Response submit_return(std::string_view body);
  Response submit_retrieve(std::string_view body);
  Response task(std::string_view id) const;
  Response tasks() const;
  Response arms() const;
  Response layout() const;
  Response speed(std::string_view body);

  Engine& engine_;
};

}  // namespace lms::service
