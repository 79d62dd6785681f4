#include "lms/catalog/catalog.hpp"

#include <algorithm>

#include "lms/error.hpp"

namespace lms::catalog {

void Catalog::upsert(BookRecord record, UpsertMode mode) {
  if (record.width_mm < 1) {
    throw Error(Errc::ConfigInvalid, "book " + record.barcode.str() + " has width_mm < 1");
  }
  auto it = books_.find(record.barcode);
  if (it != books_.end()) {
    if (mode == UpsertMode::InsertOnly) {
      throw Error(Errc::DuplicateBarcode, record.barcode.str());
    }
    it->second = std::move(record);
    return;
  }
  books_.emplace(record.barcode, std::move(record));
}

const BookRecord* Catalog::find(const Barcode& barcode) const {
  auto it = books_.find(barcode);
  return it == books_.end() ? nullptr : &it->second;
}

const BookRecord& Catalog::at(const Barcode& barcode) const {
  auto it = books_.find(barcode);
  if (it == books_.end()) throw Error(Errc::UnknownBook, barcode.str());
  return it->second;
}

void Catalog::set_state(const Barcode& barcode, BookState state) {
  auto it = books_.find(barcode);
  if (it == books_.end()) throw Error(Errc::UnknownBook, barcode.str());
  it->second.state = std::move(state);
}

std::vector<BookRecord> Catalog::query(const BookQuery& q, const SortPolicy& policy) const {
  const std::string title = normalize(q.title);
  const std::string author = normalize(q.author);
  const std::string genre = normalize(q.genre);
  auto contains = [](const std::string& field, const std::string& needle) {
    return needle.empty() || normalize(field).find(needle) != std::string::npos;
  };

  std::vector<std::pair<SortKey, const BookRecord*>> hits;
  for (const auto& [barcode, rec] : books_) {
    if (contains(rec.title, title) && contains(rec.author, author) &&
        contains(rec.genre, genre)) {
      hits.emplace_back(sort_key(rec, policy), &rec);
    }
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second->barcode < b.second->barcode;
  });

  std::vector<BookRecord> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(*h.second);
  return out;
}

std::map<Barcode, BookState> Catalog::states() const {
  std::map<Barcode, BookState> out;
  for (const auto& [barcode, rec] : books_) out.emplace(barcode, rec.state);
  return out;
}

std::string state_name(const BookState& s) {
  struct Visitor {
    std::string operator()(const state::AtIntake&) const { return "AtIntake"; }
    std::string operator()(const state::Queued&) const { return "Queued"; }
    std::string operator()(const state::InTransit&) const { return "InTransit"; }
    std::string operator()(const state::Shelved&) const { return "Shelved"; }
    std::string operator()(const state::AtKiosk&) const { return "AtKiosk"; }
    std::string operator()(const state::ManualHandling&) const { return "ManualHandling"; }
  };
  return std::visit(Visitor{}, s);
}

std::string describe(const BookState& s) {
  struct Visitor {
    std::string operator()(const state::AtIntake&) const { return "AtIntake"; }
    std::string operator()(const state::Queued& q) const {
      return "Queued(" + std::to_string(q.task) + ")";
    }
    std::string operator()(const state::InTransit& t) const {
      return "InTransit(" + std::to_string(t.arm) + ")";
    }
    std::string operator()(const state::Shelved& sh) const {
      return "Shelved(" + to_string(sh.address) + ")";
    }
    std::string operator()(const state::AtKiosk& k) const { return "AtKiosk(" + k.kiosk + ")"; }
    std::string operator()(const state::ManualHandling&) const { return "ManualHandling"; }
  };
  return std::visit(Visitor{}, s);
}

}  // namespace lms::catalog
