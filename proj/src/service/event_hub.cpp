#include "lms/service/event_hub.hpp"

#include <algorithm>

namespace lms::service {

std::optional<Event> Subscription::next(std::chrono::milliseconds timeout) {
  std::unique_lock lk(mu_);
  cv_.wait_for(lk, timeout, [&] { return !backlog_.empty() || closed_; });
  if (backlog_.empty()) return std::nullopt;
  Event e = std::move(backlog_.front());
  backlog_.pop_front();
  return e;
}

bool Subscription::closed() const {
  std::lock_guard lk(mu_);
  return closed_ && backlog_.empty();
}

bool Subscription::push(const Event& e) {
  {
    std::lock_guard lk(mu_);
    if (closed_) return false;
    if (backlog_.size() >= capacity_) {
      closed_ = true;
    } else {
      backlog_.push_back(e);
    }
  }
  cv_.notify_all();
  return true;
}

void Subscription::close() {
  {
    std::lock_guard lk(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

std::shared_ptr<Subscription> EventHub::subscribe() {
  auto sub = std::make_shared<Subscription>(capacity_);
  std::lock_guard lk(mu_);
  if (closed_) {
    sub->close();
  } else {
    subs_.push_back(sub);
  }
  return sub;
}

void EventHub::publish(const Event& e) {
  std::lock_guard lk(mu_);
  std::erase_if(subs_, [&](const std::weak_ptr<Subscription>& w) {
    auto s = w.lock();
    return !s || !s->push(e);
  });
}

void EventHub::close() {
  std::lock_guard lk(mu_);
  closed_ = true;
  for (auto& w : subs_) {
    if (auto s = w.lock()) s->close();
  }
  subs_.clear();
}

std::size_t EventHub::subscribers() const {
  std::lock_guard lk(mu_);
  return static_cast<std::size_t>(std::count_if(subs_.begin(), subs_.end(), [](const auto& w) { return !w.expired(); }));
}

std::string sse_message(const Event& e) {
  return "event: " + std::string(to_string(e.kind)) + "\ndata: " + e.to_line() + "\n\n";
}

}  // namespace lms::service
