#include "lms/service/engine.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "lms/error.hpp"

namespace lms::service {

namespace {
using Clock = std::chrono::steady_clock;
constexpr auto kIdleWake = std::chrono::milliseconds(100);
}  // namespace

Engine::Engine(Layout layout, catalog::Catalog initial, Options options)
    : layout_(std::move(layout)), speed_(options.speed), anchor_wall_(Clock::now()) {
  if (!std::isfinite(options.speed) || options.speed < 0) throw Error(Errc::ConfigInvalid, "speed must be >= 0");
  sim::SimOptions so;
  so.seed = options.seed;
  so.keep_trace = false;
  sim_ = std::make_unique<sim::Simulator>(layout_, std::move(initial), so);
  sim_->on_event([this](const Event& e) { hub_.publish(e); });
  publish();
  worker_ = std::thread([this] { loop(); });
}

Engine::~Engine() { stop(); }

void Engine::stop() {
  {
    std::lock_guard lk(mu_);
    if (stopping_) return;
    stopping_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
  hub_.close();
}

std::shared_ptr<const Snapshot> Engine::snapshot() const {
  std::lock_guard lk(snap_mu_);
  return snap_;
}

void Engine::post(Command c) {
  {
    std::lock_guard lk(mu_);
    if (stopping_) throw Error(Errc::IoError, "engine stopped");
    commands_.push_back(std::move(c));
  }
  cv_.notify_all();
}

void Engine::set_speed(double factor) {
  if (!std::isfinite(factor) || factor < 0) throw Error(Errc::ConfigInvalid, "speed must be a finite number >= 0");
  execute([this, factor](sim::Simulator& s) {
    // sync_clock already ran, so the new rate applies from this instant.
    anchor_wall_ = Clock::now();
    anchor_sim_ = s.now();
    speed_ = factor;
  });
}

void Engine::drain() {
  execute([this](sim::Simulator& s) {
    while (s.step() || s.wake_parked()) {
    }
    anchor_wall_ = Clock::now();
    anchor_sim_ = s.now();
  });
}

void Engine::sync_clock() {
  if (speed_ > 0) {
    const double elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - anchor_wall_).count();
    const auto target = anchor_sim_ + static_cast<TimeMs>(elapsed_ms * speed_);
    if (target > sim_->now()) sim_->advance_to(target);
  }
  sim_->wake_parked();
}

void Engine::publish() {
  if (sim_->events_emitted() == published_events_ && snap_ && snap_->now_ms == sim_->now() &&
      snap_->speed == speed_) {
    return;
  }
  auto s = std::make_shared<Snapshot>();
  s->version = ++version_;
  s->now_ms = sim_->now();
  s->speed = speed_;
  const auto& o = sim_->orchestrator();
  s->catalog = o.catalog();
  s->policy = o.policy();
  s->tasks = o.tasks();
  s->arms = sim_->arms();
  published_events_ = sim_->events_emitted();
  std::lock_guard lk(snap_mu_);
  snap_ = std::move(s);
}

void Engine::loop() {
  std::unique_lock lk(mu_);
  while (!stopping_) {
    auto wake = Clock::now() + kIdleWake;
    if (speed_ > 0) {
      if (auto next = sim_->next_time()) {
        const auto due = anchor_wall_ + std::chrono::duration_cast<Clock::duration>(
                                            std::chrono::duration<double, std::milli>((*next - anchor_sim_) / speed_));
        wake = std::min(wake, due);
      }
    }
    cv_.wait_until(lk, wake, [&] { return stopping_ || !commands_.empty(); });
    if (stopping_) break;
    std::deque<Command> batch;
    batch.swap(commands_);
    lk.unlock();
    try {
      sync_clock();
      for (auto& c : batch) c(*sim_);
      publish();
    } catch (const std::exception& ex) {
      // Only internal faults reach here; freeze the world so it can be inspected.
      spdlog::error("simulation halted: {}", ex.what());
      speed_ = 0;
      publish();
    }
    lk.lock();
  }
  // Fail whatever is still queued so no caller waits forever.
  for (auto& c : commands_) {
    try {
      c(*sim_);
    } catch (...) {
    }
  }
  commands_.clear();
}

}  // namespace lms::service
