#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace lms::catalog {

/// A validated 13-digit book identifier with a weighted check digit
/// (weights 1,3,1,3,... over the first twelve digits).
class Barcode {
 public:
  static constexpr std::size_t kLength = 13;

  /// Throws Error(BadLength | NonDigit | ChecksumMismatch), naming the first
  /// failed check.
  static Barcode validate(std::string_view raw);

  /// Check digit for a 12-digit prefix. The prefix must be all digits.
  static int check_digit(std::string_view prefix12);

  const std::string& str() const noexcept { return digits_; }

  friend auto operator<=>(const Barcode&, const Barcode&) = default;

 private:
  explicit Barcode(std::string digits) : digits_(std::move(digits)) {}
  std::string digits_;
};

bool is_valid_barcode(std::string_view raw) noexcept;

}  // namespace lms::catalog
