#include "lms/catalog/transaction_log.hpp"

#include "lms/error.hpp"

namespace lms::catalog {

std::string_view to_string(TxKind kind) {
  switch (kind) {
    case TxKind::ReturnAccepted: return "ReturnAccepted";
    case TxKind::Shelved: return "Shelved";
    case TxKind::RetrievalRequested: return "RetrievalRequested";
    case TxKind::Picked: return "Picked";
    case TxKind::Delivered: return "Delivered";
    case TxKind::TaskFailed: return "TaskFailed";
  }
  return "?";
}

TxKind parse_tx_kind(std::string_view name) {
  for (TxKind k : {TxKind::ReturnAccepted, TxKind::Shelved, TxKind::RetrievalRequested,
                   TxKind::Picked, TxKind::Delivered, TxKind::TaskFailed}) {
    if (to_string(k) == name) return k;
  }
  throw Error(Errc::ParseError, "unknown transaction kind '" + std::string(name) + "'");
}

void TransactionLog::append(const TransactionEntry& entry) {
  if (entry.seq != last_seq() + 1) {
    throw Error(Errc::SeqGap, "expected seq " + std::to_string(last_seq() + 1) + ", got " +
                                  std::to_string(entry.seq));
  }
  if (!entries_.empty() && entry.time_ms < entries_.back().time_ms) {
    throw Error(Errc::StateMachineViolation,
                "transaction time went backwards at seq " + std::to_string(entry.seq));
  }
  entries_.push_back(entry);
}

const TransactionEntry& TransactionLog::record(TransactionEntry entry) {
  entry.seq = last_seq() + 1;
  append(entry);
  return entries_.back();
}

BookState apply(const TransactionEntry& e) {
  auto missing = [&](const char* field) {
    return Error(Errc::ParseError, std::string(to_string(e.kind)) + " entry seq " +
                                       std::to_string(e.seq) + " lacks " + field);
  };
  switch (e.kind) {
    case TxKind::ReturnAccepted:
    case TxKind::RetrievalRequested:
      if (!e.task_id) throw missing("task_id");
      return state::Queued{*e.task_id};
    case TxKind::Picked:
      if (!e.arm_id) throw missing("arm_id");
      return state::InTransit{*e.arm_id};
    case TxKind::Shelved:
      if (!e.address) throw missing("address");
      return state::Shelved{*e.address};
    case TxKind::Delivered:
      if (!e.kiosk) throw missing("kiosk");
      return state::AtKiosk{*e.kiosk};
    case TxKind::TaskFailed:
      return state::ManualHandling{};
  }
  throw missing("kind");
}

std::map<Barcode, BookState> replay(const std::vector<TransactionEntry>& entries) {
  std::map<Barcode, BookState> states;
  for (const auto& e : entries) states.insert_or_assign(e.barcode, apply(e));
  return states;
}

}  // namespace lms::catalog
