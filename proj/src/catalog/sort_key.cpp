#include "lms/catalog/sort_key.hpp"

#include <optional>

#include "lms/error.hpp"

namespace lms::catalog {

namespace {

bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

struct Decoded {
  char32_t cp;
  std::size_t length;
};

// Decodes a well-formed 2- or 3-byte sequence at `pos`. Everything that can
// fold lives below U+10000, so longer sequences are copied byte-wise.
std::optional<Decoded> decode_bmp(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 >= 0xC2 && b0 <= 0xDF && pos + 1 < s.size()) {
    const auto b1 = static_cast<unsigned char>(s[pos + 1]);
    if (!is_continuation(b1)) return std::nullopt;
    return Decoded{static_cast<char32_t>(((b0 & 0x1F) << 6) | (b1 & 0x3F)), 2};
  }
  if (b0 >= 0xE0 && b0 <= 0xEF && pos + 2 < s.size()) {
    const auto b1 = static_cast<unsigned char>(s[pos + 1]);
    const auto b2 = static_cast<unsigned char>(s[pos + 2]);
    if (!is_continuation(b1) || !is_continuation(b2)) return std::nullopt;
    const char32_t cp = ((b0 & 0x0F) << 12) | ((b1 & 0x3F) << 6) | (b2 & 0x3F);
    if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
    return Decoded{cp, 3};
  }
  return std::nullopt;
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

// Simple (1:1) case folding for Latin, Greek, Cyrillic, Armenian and
// fullwidth Latin. Every mapping preserves the UTF-8 length and lands on a
// code point that folds to itself.
char32_t fold(char32_t cp) {
  if (in(cp, 'A', 'Z')) return cp + 0x20;
  if (cp < 0x80) return cp;
  if (cp == 0xB5) return 0x3BC;
  if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
  if (in(cp, 0x100, 0x12F) || in(cp, 0x132, 0x137) || in(cp, 0x14A, 0x177)) {
    return cp % 2 == 0 ? cp + 1 : cp;
  }
  if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) return cp % 2 == 1 ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;
  if (cp == 0x386) return 0x3AC;
  if (in(cp, 0x388, 0x38A)) return cp + 0x25;
  if (cp == 0x38C) return 0x3CC;
  if (in(cp, 0x38E, 0x38F)) return cp + 0x3F;
  if (in(cp, 0x391, 0x3A1) || in(cp, 0x3A3, 0x3AB)) return cp + 0x20;
  if (cp == 0x3C2) return 0x3C3;
  if (in(cp, 0x400, 0x40F)) return cp + 0x50;
  if (in(cp, 0x410, 0x42F)) return cp + 0x20;
  if (in(cp, 0x460, 0x481) || in(cp, 0x48A, 0x4BF) || in(cp, 0x4D0, 0x52F)) {
    return cp % 2 == 0 ? cp + 1 : cp;
  }
  if (cp == 0x4C0) return 0x4CF;
  if (in(cp, 0x4C1, 0x4CE)) return cp % 2 == 1 ? cp + 1 : cp;
  if (in(cp, 0x531, 0x556)) return cp + 0x30;
  if (in(cp, 0x1E00, 0x1E95) || in(cp, 0x1EA0, 0x1EFF)) return cp % 2 == 0 ? cp + 1 : cp;
  if (in(cp, 0xFF21, 0xFF3A)) return cp + 0x20;
  return cp;
}

// Control characters count as whitespace so the key separator stays below
// every normalized byte.
bool is_space(char c) { return static_cast<unsigned char>(c) <= 0x20; }

const char* field_name(SortField f) {
  switch (f) {
    case SortField::Genre: return "genre";
    case SortField::Author: return "author";
    case SortField::Title: return "title";
  }
  return "?";
}

}  // namespace

SortPolicy::SortPolicy() : fields_{SortField::Genre, SortField::Author, SortField::Title} {}

SortPolicy::SortPolicy(std::vector<SortField> fields, bool strip_leading_articles)
    : fields_(std::move(fields)), strip_articles_(strip_leading_articles) {
  if (fields_.empty()) {
    throw Error(Errc::ConfigInvalid, "sort policy needs at least one field");
  }
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    for (std::size_t j = i + 1; j < fields_.size(); ++j) {
      if (fields_[i] == fields_[j]) {
        throw Error(Errc::ConfigInvalid,
                    std::string("duplicate sort field ") + field_name(fields_[i]));
      }
    }
  }
}

std::string normalize(std::string_view text) {
  std::string folded;
  folded.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b = static_cast<unsigned char>(text[i]);
    if (b < 0x80) {
      folded.push_back(static_cast<char>(fold(b)));
      ++i;
      continue;
    }
    if (auto d = decode_bmp(text, i)) {
      encode(fold(d->cp), folded);
      i += d->length;
    } else {
      folded.push_back(text[i]);
      ++i;
    }
  }

  std::string out;
  out.reserve(folded.size());
  bool pending_space = false;
  for (char c : folded) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

std::string strip_article(std::string_view normalized) {
  for (std::string_view article : {"the ", "an ", "a "}) {
    if (normalized.size() > article.size() && normalized.substr(0, article.size()) == article) {
      return std::string(normalized.substr(article.size()));
    }
  }
  return std::string(normalized);
}

SortKey sort_key(const BookRecord& record, const SortPolicy& policy) {
  std::string key;
  bool first = true;
  for (SortField f : policy.fields()) {
    if (!first) key.push_back(SortKey::kSeparator);
    first = false;
    switch (f) {
      case SortField::Genre:
        key += normalize(record.genre);
        break;
      case SortField::Author:
        key += normalize(record.author);
        break;
      case SortField::Title:
        key += policy.strip_leading_articles() ? strip_article(normalize(record.title))
                                               : normalize(record.title);
        break;
    }
  }
  return SortKey(std::move(key));
}

SortField parse_sort_field(std::string_view name) {
  if (name == "genre") return SortField::Genre;
  if (name == "author") return SortField::Author;
  if (name == "title") return SortField::Title;
  throw Error(Errc::ConfigInvalid, "unknown sort field '" + std::string(name) + "'");
}

}  // namespace lms::catalog
