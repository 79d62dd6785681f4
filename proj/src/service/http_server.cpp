#include "lms/service/http_server.hpp"

#include <atomic>
#include <chrono>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "lms/error.hpp"
#include "lms/service/api.hpp"

namespace lms::service {

namespace {
constexpr auto kPoll = std::chrono::milliseconds(250);
constexpr auto kHeartbeat = std::chrono::seconds(15);
}  // namespace

struct HttpServer::Impl {
  Engine& engine;
  Api api;
  httplib::Server server;
  std::atomic<bool> stopping{false};

  explicit Impl(Engine& e) : engine(e), api(e) {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      std::map<std::string, std::string> query;
      for (const auto& [k, v] : req.params) query.emplace(k, v);
      const Response r = api.handle(req.method, req.path, query, req.body);
      res.status = r.status;
      res.set_content(r.body, "application/json");
      spdlog::debug("{} {} -> {}", req.method, req.path, r.status);
    };
    server.Get("/api/events", [this](const httplib::Request&, httplib::Response& res) { stream(res); });
    server.Get(R"(/api/.*)", forward);
    server.Post(R"(/api/.*)", forward);
    server.Put(R"(/api/.*)", forward);
    server.Delete(R"(/api/.*)", forward);
  }

  void stream(httplib::Response& res) {
    auto sub = engine.events().subscribe();
    res.set_header("Cache-Control", "no-cache");
    auto last_write = std::make_shared<std::chrono::steady_clock::time_point>(std::chrono::steady_clock::now());
    res.set_chunked_content_provider("text/event-stream", [this, sub, last_write](size_t, httplib::DataSink& sink) {
      if (stopping) return false;
      if (auto e = sub->next(kPoll)) {
        const std::string msg = sse_message(*e);
        *last_write = std::chrono::steady_clock::now();
        return sink.write(msg.data(), msg.size());
      }
      if (sub->closed()) {
        sink.done();
        return true;
      }
      if (std::chrono::steady_clock::now() - *last_write > kHeartbeat) {
        static constexpr std::string_view beat = ": keep-alive\n\n";
        *last_write = std::chrono::steady_clock::now();
        return sink.write(beat.data(), beat.size());
      }
      return sink.is_writable();
    });
  }
};

HttpServer::HttpServer(Engine& engine) : impl_(std::make_unique<Impl>(engine)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(Errc::IoError, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  impl_->stopping = true;
  impl_->server.stop();
}

}  // namespace lms::service
