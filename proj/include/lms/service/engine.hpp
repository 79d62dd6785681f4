#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

#include "lms/layout.hpp"
#include "lms/service/event_hub.hpp"
#include "lms/sim/simulator.hpp"

namespace lms::service {

/// Immutable view served to readers. Rebuilt by the writer after every
/// command and every clock advance that emitted events.
struct Snapshot {
  std::uint64_t version = 0;
  TimeMs now_ms = 0;
  double speed = 1.0;
  catalog::Catalog catalog;
  catalog::SortPolicy policy;
  std::map<TaskId, orchestrator::Task> tasks;
  std::vector<sim::ArmView> arms;
};

/// Runs a Simulator against the wall clock, scaled by `speed` (0 freezes
/// it). One writer thread owns the simulator; every mutation goes through
/// execute(), which queues a command and waits for its result.
class Engine {
 public:
  struct Options {
    double speed = 1.0;
    std::uint64_t seed = 0;
  };

  Engine(Layout layout, catalog::Catalog initial, Options options);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Runs `fn(simulator)` on the writer thread after bringing the simulated
  /// clock up to date; the snapshot is republished before the result (or
  /// exception) comes back.
  template <class F>
  auto execute(F&& fn) -> std::invoke_result_t<F&, sim::Simulator&> {
    using R = std::invoke_result_t<F&, sim::Simulator&>;
    auto done = std::make_shared<std::promise<R>>();
    auto result = done->get_future();
    post([this, fn = std::forward<F>(fn), done](sim::Simulator& s) mutable {
      try {
        if constexpr (std::is_void_v<R>) {
          fn(s);
          publish();
          done->set_value();
        } else {
          R r = fn(s);
          publish();
          done->set_value(std::move(r));
        }
      } catch (...) {
        publish();
        done->set_exception(std::current_exception());
      }
    });
    return result.get();
  }

  std::shared_ptr<const Snapshot> snapshot() const;
  EventHub& events() noexcept { return hub_; }
  const Layout& layout() const noexcept { return layout_; }

  /// Throws ConfigInvalid unless factor is finite and >= 0.
  void set_speed(double factor);
  /// Runs the simulation to quiescence regardless of speed (tests, demos).
  void drain();
  void stop();

 private:
  using Command = std::function<void(sim::Simulator&)>;
  void post(Command c);
  void loop();
  void sync_clock();
  void publish();

  Layout layout_;
  EventHub hub_;
  std::unique_ptr<sim::Simulator> sim_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Command> commands_;
  bool stopping_ = false;

  // Writer-thread state.
  double speed_;
  std::chrono::steady_clock::time_point anchor_wall_;
  TimeMs anchor_sim_ = 0;
  std::uint64_t published_events_ = ~std::uint64_t{0};
  std::uint64_t version_ = 0;

  mutable std::mutex snap_mu_;
  std::shared_ptr<const Snapshot> snap_;
  std::thread worker_;
};

}  // namespace lms::service
