#pragma once

#include <memory>
#include <string>

#include "lms/service/engine.hpp"

namespace lms::service {

/// Binds Api and the /api/events stream to a socket.
class HttpServer {
 public:
  explicit HttpServer(Engine& engine);
  ~HttpServer();

  /// port 0 picks a free port. Returns the bound port; throws IoError.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void run();
  /// Safe from any thread; also ends open event streams.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lms::service
