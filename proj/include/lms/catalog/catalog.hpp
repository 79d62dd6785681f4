#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lms/catalog/book.hpp"
#include "lms/catalog/sort_key.hpp"

namespace lms::catalog {

enum class UpsertMode { Replace, InsertOnly };

/// Substring filters; an empty field matches everything.
struct BookQuery {
  std::string title;
  std::string author;
  std::string genre;
};

/// In-memory book table keyed by barcode. A value type: copies are
/// snapshots. Single writer; the orchestrator owns the live instance.
class Catalog {
 public:
  /// Throws DuplicateBarcode in InsertOnly mode when the barcode exists,
  /// ConfigInvalid when width_mm < 1.
  void upsert(BookRecord record, UpsertMode mode = UpsertMode::Replace);

  const BookRecord* find(const Barcode& barcode) const;
  const BookRecord& at(const Barcode& barcode) const;  // throws UnknownBook
  bool contains(const Barcode& barcode) const { return books_.contains(barcode); }

  void set_state(const Barcode& barcode, BookState state);

  /// Matching records sorted by sort key, then barcode.
  std::vector<BookRecord> query(const BookQuery& q, const SortPolicy& policy = {}) const;

  std::map<Barcode, BookState> states() const;
  const std::map<Barcode, BookRecord>& records() const noexcept { return books_; }
  std::size_t size() const noexcept { return books_.size(); }
  bool empty() const noexcept { return books_.empty(); }

 private:
  std::map<Barcode, BookRecord> books_;
};

}  // namespace lms::catalog
