#include "devlore/money.hpp"

#include "devlore/error.hpp"

#include <cstdlib>

namespace devlore {
namespace {

constexpr int kScaleDigits = 15;

std::int64_t div_half_up(__int128 num, __int128 den) {
  bool neg = (num < 0) != (den < 0);
  if (num < 0) num = -num;
  if (den < 0) den = -den;
  __int128 q = (num + den / 2) / den;
  if (neg) q = -q;
  if (q > INT64_MAX || q < INT64_MIN) throw Error(ErrorCode::PreconditionViolated, "money amount out of range");
  return static_cast<std::int64_t>(q);
}

}  // namespace

Money Money::parse(std::string_view text) {
  std::string_view t = text;
  bool neg = false;
  if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
    neg = t[0] == '-';
    t.remove_prefix(1);
  }
  if (!t.empty() && t[0] == '$') t.remove_prefix(1);
  auto dot = t.find('.');
  auto whole = t.substr(0, dot);
  auto frac = dot == std::string_view::npos ? std::string_view{} : t.substr(dot + 1);
  auto digits = [](std::string_view s) {
    for (char c : s) {
      if (c < '0' || c > '9') return false;
    }
    return true;
  };
  if ((whole.empty() && frac.empty()) || !digits(whole) || !digits(frac) || frac.size() > kScaleDigits || whole.size() > 4) {
    throw Error(ErrorCode::PreconditionViolated, "not a dollar amount: '" + std::string(text) + "'");
  }
  std::int64_t v = 0;
  for (char c : whole) v = v * 10 + (c - '0');
  v *= kPerDollar;
  std::int64_t f = 0;
  for (char c : frac) f = f * 10 + (c - '0');
  for (std::size_t i = frac.size(); i < kScaleDigits; ++i) f *= 10;
  return Money(neg ? -(v + f) : v + f);
}

Money Money::per_thousand(std::int64_t tokens) const {
  return Money(div_half_up(static_cast<__int128>(femto_) * tokens, 1000));
}

Money Money::divided_by(std::int64_t n) const {
  if (n <= 0) throw Error(ErrorCode::PreconditionViolated, "division of money by non-positive count");
  return Money(div_half_up(femto_, n));
}

Money& Money::operator+=(Money other) {
  if (__builtin_add_overflow(femto_, other.femto_, &femto_)) {
    throw Error(ErrorCode::PreconditionViolated, "money sum overflow");
  }
  return *this;
}

std::string Money::to_string() const {
  auto v = femto_ < 0 ? -static_cast<__int128>(femto_) : static_cast<__int128>(femto_);
  auto whole = static_cast<std::int64_t>(v / kPerDollar);
  auto frac = static_cast<std::int64_t>(v % kPerDollar);
  std::string out = (femto_ < 0 ? "-" : "") + std::to_string(whole);
  if (frac == 0) return out;
  std::string f = std::to_string(frac);
  f = std::string(kScaleDigits - f.size(), '0') + f;
  while (!f.empty() && f.back() == '0') f.pop_back();
  return out + "." + f;
}

std::string Money::format(int places) const {
  __int128 scale = 1;
  for (int i = places; i < kScaleDigits; ++i) scale *= 10;
  auto units = div_half_up(femto_, scale);
  bool neg = units < 0;
  auto mag = neg ? -units : units;
  std::int64_t den = 1;
  for (int i = 0; i < places; ++i) den *= 10;
  std::string out = (neg ? "-" : "") + std::to_string(mag / den);
  if (places > 0) {
    auto f = std::to_string(mag % den);
    out += "." + std::string(static_cast<std::size_t>(places) - f.size(), '0') + f;
  }
  return out;
}

}  // namespace devlore
