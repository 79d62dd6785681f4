#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lms/catalog/book.hpp"

namespace lms::railnet {

/// Exclusive-occupancy unit: a segment id, or a turntable node id.
using ResourceId = std::string;

enum class ReserveOutcome { Granted, Queued };

/// Single arbiter for rail resources. Requests are all-or-nothing; a request
/// that cannot be granted waits FIFO on its first unavailable resource and
/// is re-evaluated, in arrival order, whenever something is released.
class ReservationTable {
 public:
  /// Grants iff every resource is free or already held by `arm`. An arm may
  /// have at most one outstanding queued request; a new one replaces it.
  ReserveOutcome reserve(ArmId arm, std::vector<ResourceId> resources);

  /// Frees resources and returns the arms whose queued requests became
  /// granted as a result, in grant order. Throws NotHolder (nothing is
  /// released) if `arm` does not hold every listed resource.
  std::vector<ArmId> release(ArmId arm, const std::vector<ResourceId>& resources);

  /// Withdraws a queued request. Returns false if there was none.
  bool cancel(ArmId arm);

  std::optional<ArmId> holder(const ResourceId& r) const;
  std::vector<ResourceId> held_by(ArmId arm) const;
  bool is_queued(ArmId arm) const;
  const std::vector<ResourceId>* queued_request(ArmId arm) const;

  /// Arms waiting FIFO on `r`.
  std::vector<ArmId> waiters(const ResourceId& r) const;

  /// Resources in `arm`'s queued request held by someone else.
  std::vector<ResourceId> contested(ArmId arm) const;

  /// waiter -> holders it is blocked by
  std::map<ArmId, std::set<ArmId>> wait_for() const;

  /// A cycle in the wait-for graph, rotated so the smallest arm id is first
  /// and following wait direction; none if the graph is acyclic.
  std::optional<std::vector<ArmId>> detect_deadlock() const;

  const std::map<ResourceId, ArmId>& holders() const noexcept { return holder_; }

 private:
  struct Request {
    ArmId arm;
    std::vector<ResourceId> resources;
  };

  bool grantable(const Request& r) const;
  void grant(const Request& r);
  void rebuild_queues();

  std::map<ResourceId, ArmId> holder_;
  std::vector<Request> pending_;  // arrival order
  std::map<ResourceId, std::deque<ArmId>> queues_;
};

}  // namespace lms::railnet
