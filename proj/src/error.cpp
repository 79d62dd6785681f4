#include "lms/error.hpp"

namespace lms {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::BadLength: return "BadLength";
    case Errc::NonDigit: return "NonDigit";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::DuplicateBarcode: return "DuplicateBarcode";
    case Errc::SeqGap: return "SeqGap";
    case Errc::UnknownBook: return "UnknownBook";
    case Errc::NoEligibleLevel: return "NoEligibleLevel";
    case Errc::ShelfFull: return "ShelfFull";
    case Errc::EmptySlot: return "EmptySlot";
    case Errc::InvalidAddress: return "InvalidAddress";
    case Errc::LayoutInvalid: return "LayoutInvalid";
    case Errc::Disconnected: return "Disconnected";
    case Errc::PortConflict: return "PortConflict";
    case Errc::DanglingEdge: return "DanglingEdge";
    case Errc::MissingRackPort: return "MissingRackPort";
    case Errc::NoRoute: return "NoRoute";
    case Errc::NotHolder: return "NotHolder";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::IllegalTransition: return "IllegalTransition";
    case Errc::NonPositiveSpeed: return "NonPositiveSpeed";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::BookNotShelved: return "BookNotShelved";
    case Errc::UnknownKiosk: return "UnknownKiosk";
    case Errc::InvalidBarcode: return "InvalidBarcode";
    case Errc::UnknownTask: return "UnknownTask";
    case Errc::StateMachineViolation: return "StateMachineViolation";
    case Errc::ScenarioInvalid: return "ScenarioInvalid";
    case Errc::SimTimeBudgetExceeded: return "SimTimeBudgetExceeded";
    case Errc::UnknownFlag: return "UnknownFlag";
    case Errc::MissingArgument: return "MissingArgument";
    case Errc::ConflictingFlags: return "ConflictingFlags";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace lms
