#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace devlore {

/// US dollars held as an integer count of femtodollars (1e-15 $), so sums of per-request
/// costs are exact. The representable range is about +/-9223 dollars; overflow throws.
class Money {
 public:
  static constexpr std::int64_t kPerDollar = 1'000'000'000'000'000;

  constexpr Money() = default;
  static Money from_femto(std::int64_t femto) { return Money(femto); }
  /// Parses a plain decimal such as "0.00015"; more than 15 fractional digits is an error.
  static Money parse(std::string_view text);

  std::int64_t femto() const { return femto_; }
  double dollars() const { return static_cast<double>(femto_) / static_cast<double>(kPerDollar); }

  /// Cost of `tokens` at this price per 1000 tokens, rounded half-up to a femtodollar.
  Money per_thousand(std::int64_t tokens) const;
  /// This amount split `n` ways, rounded half-up to a femtodollar.
  Money divided_by(std::int64_t n) const;

  /// Exact decimal text with trailing zeros removed ("0.03", "8.379", "0").
  std::string to_string() const;
  /// Rounded half-up to `places` decimals, for display.
  std::string format(int places) const;

  Money& operator+=(Money other);
  friend Money operator+(Money a, Money b) { return a += b; }
  auto operator<=>(const Money&) const = default;

 private:
  explicit constexpr Money(std::int64_t femto) : femto_(femto) {}
  std::int64_t femto_ = 0;
};

}  // namespace devlore
