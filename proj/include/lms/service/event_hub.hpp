#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lms/sim/event.hpp"

namespace lms::service {

/// One subscriber's ordered backlog. Nothing is dropped; a subscriber that
/// falls more than `capacity` events behind is closed and must resync from a
/// fresh snapshot.
class Subscription {
 public:
  explicit Subscription(std::size_t capacity) : capacity_(capacity) {}

  /// Next event, or nothing on timeout or once closed and drained.
  std::optional<Event> next(std::chrono::milliseconds timeout);
  bool closed() const;

 private:
  friend class EventHub;
  bool push(const Event& e);  // false once closed
  void close();

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Event> backlog_;
  std::size_t capacity_;
  bool closed_ = false;
};

class EventHub {
 public:
  explicit EventHub(std::size_t capacity = 100000) : capacity_(capacity) {}

  std::shared_ptr<Subscription> subscribe();
  void publish(const Event& e);
  /// Closes every subscription; later subscriptions start closed.
  void close();
  std::size_t subscribers() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::weak_ptr<Subscription>> subs_;
  std::size_t capacity_;
  bool closed_ = false;
};

/// "event: <kind>\ndata: <Event JSON>\n\n"
std::string sse_message(const Event& e);

}  // namespace lms::service
