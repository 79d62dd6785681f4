#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "lms/catalog/book.hpp"

namespace lms::catalog {

enum class SortField { Genre, Author, Title };

/// Field order for shelf arrangement. Must be non-empty and duplicate-free.
class SortPolicy {
 public:
  SortPolicy();  // genre, author, title
  explicit SortPolicy(std::vector<SortField> fields, bool strip_leading_articles = false);

  const std::vector<SortField>& fields() const noexcept { return fields_; }
  bool strip_leading_articles() const noexcept { return strip_articles_; }

 private:
  std::vector<SortField> fields_;
  bool strip_articles_ = false;
};

/// Byte-wise ordered composite key. UTF-8 byte order equals code point order.
class SortKey {
 public:
  static constexpr char kSeparator = '\x1f';

  SortKey() = default;
  explicit SortKey(std::string text) : text_(std::move(text)) {}

  const std::string& str() const noexcept { return text_; }

  friend auto operator<=>(const SortKey&, const SortKey&) = default;

 private:
  std::string text_;
};

/// Simple case folding by code point, ASCII whitespace runs collapsed to a
/// single space, then trimmed. Idempotent. Undecodable bytes pass through.
std::string normalize(std::string_view text);

/// Removes one leading "the ", "a " or "an " from already-normalized text.
std::string strip_article(std::string_view normalized);

SortKey sort_key(const BookRecord& record, const SortPolicy& policy);

SortField parse_sort_field(std::string_view name);

}  // namespace lms::catalog
