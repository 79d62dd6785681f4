#include "lms/catalog/barcode.hpp"

#include "lms/error.hpp"

namespace lms::catalog {

namespace {
bool is_digit(char c) { return c >= '0' && c <= '9'; }
}  // namespace

int Barcode::check_digit(std::string_view prefix12) {
  int odd = 0;
  int even = 0;
  for (std::size_t i = 0; i < 12; ++i) {
    const int d = prefix12[i] - '0';
    // positions are 1-based: index 0 is position 1 (odd)
    if (i % 2 == 0) {
      odd += d;
    } else {
      even += d;
    }
  }
  return (10 - (odd + 3 * even) % 10) % 10;
}

Barcode Barcode::validate(std::string_view raw) {
  if (raw.size() != kLength) {
    throw Error(Errc::BadLength, "expected 13 digits, got " + std::to_string(raw.size()) +
                                     " characters");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!is_digit(raw[i])) {
      throw Error(Errc::NonDigit, "character " + std::to_string(i + 1) + " is not a digit");
    }
  }
  const int expected = check_digit(raw.substr(0, 12));
  if (raw[12] - '0' != expected) {
    throw Error(Errc::ChecksumMismatch,
                "check digit " + std::string(1, raw[12]) + ", expected " +
                    std::to_string(expected));
  }
  return Barcode(std::string(raw));
}

bool is_valid_barcode(std::string_view raw) noexcept {
  if (raw.size() != Barcode::kLength) return false;
  for (char c : raw) {
    if (!is_digit(c)) return false;
  }
  return raw[12] - '0' == Barcode::check_digit(raw.substr(0, 12));
}

}  // namespace lms::catalog
