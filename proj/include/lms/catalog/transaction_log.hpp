#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "lms/catalog/book.hpp"

namespace lms::catalog {

enum class TxKind { ReturnAccepted, Shelved, RetrievalRequested, Picked, Delivered, TaskFailed };

std::string_view to_string(TxKind kind);
TxKind parse_tx_kind(std::string_view name);

struct TransactionEntry {
  std::uint64_t seq = 0;
  TimeMs time_ms = 0;
  TxKind kind = TxKind::ReturnAccepted;
  Barcode barcode = Barcode::validate("0000000000000");
  std::optional<ShelfAddress> address;
  std::optional<ArmId> arm_id;
  std::optional<TaskId> task_id;
  std::optional<KioskId> kiosk;  // Delivered only

  friend bool operator==(const TransactionEntry&, const TransactionEntry&) = default;
};

/// Append-only record of every catalog-changing action. Sequence numbers
/// start at 1 and are contiguous; time never decreases.
class TransactionLog {
 public:
  /// Throws SeqGap when entry.seq != last_seq() + 1, StateMachineViolation
  /// when time_ms decreases.
  void append(const TransactionEntry& entry);

  /// Appends with the next sequence number filled in.
  const TransactionEntry& record(TransactionEntry entry);

  std::uint64_t last_seq() const noexcept { return entries_.empty() ? 0 : entries_.back().seq; }
  const std::vector<TransactionEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::vector<TransactionEntry> entries_;
};

/// State transition implied by one entry. Throws ParseError when a field the
/// kind requires is missing.
BookState apply(const TransactionEntry& entry);

/// Rebuilds book states from an empty catalog. Books never mentioned in the
/// log are absent from the result (their implied state is AtIntake).
std::map<Barcode, BookState> replay(const std::vector<TransactionEntry>& entries);

inline std::map<Barcode, BookState> replay(const TransactionLog& log) {
  return replay(log.entries());
}

}  // namespace lms::catalog
