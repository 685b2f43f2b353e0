#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>

#include "interlex/error.hpp"

namespace interlex {

enum class Datatype { String, Decimal, Integer, Boolean, Datetime };

constexpr std::string_view datatype_name(Datatype d) noexcept {
  switch (d) {
    case Datatype::String: return "string";
    case Datatype::Decimal: return "decimal";
    case Datatype::Integer: return "integer";
    case Datatype::Boolean: return "boolean";
    case Datatype::Datetime: return "datetime";
  }
  return "string";
}

inline std::optional<Datatype> parse_datatype(std::string_view tag) {
  if (tag == "string") return Datatype::String;
  if (tag == "decimal") return Datatype::Decimal;
  if (tag == "integer") return Datatype::Integer;
  if (tag == "boolean") return Datatype::Boolean;
  if (tag == "datetime") return Datatype::Datetime;
  return std::nullopt;
}

namespace detail {

struct DecimalParts {
  bool negative = false;
  std::string int_digits;
  std::string frac_digits;
};

inline std::optional<DecimalParts> split_decimal(std::string_view s) {
  DecimalParts p;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    p.negative = s[i] == '-';
    ++i;
  }
  bool seen_point = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      (seen_point ? p.frac_digits : p.int_digits) += c;
    } else {
      return std::nullopt;
    }
  }
  if (p.int_digits.empty() && p.frac_digits.empty()) return std::nullopt;
  return p;
}

inline std::string join_decimal(DecimalParts p) {
  auto nz = p.int_digits.find_first_not_of('0');
  p.int_digits = nz == std::string::npos ? "0" : p.int_digits.substr(nz);
  while (!p.frac_digits.empty() && p.frac_digits.back() == '0') p.frac_digits.pop_back();
  bool zero = p.int_digits == "0" && p.frac_digits.empty();
  std::string out = (p.negative && !zero) ? "-" : "";
  out += p.int_digits;
  if (!p.frac_digits.empty()) out += "." + p.frac_digits;
  return out;
}

}  // namespace detail

inline bool is_decimal(std::string_view s) { return detail::split_decimal(s).has_value(); }

// Canonical trim: no '+', no superfluous leading or trailing zeros, "-0" -> "0".
inline std::string canonical_decimal(std::string_view s) {
  auto parts = detail::split_decimal(s);
  if (!parts) throw Error(Errc::NonDecimalValue, "'" + std::string(s) + "' is not a decimal");
  return detail::join_decimal(*parts);
}

// Exact multiplication by 10^exponent on the decimal string; no floating point.
inline std::string shift_decimal(std::string_view s, int exponent) {
  auto parts = detail::split_decimal(s);
  if (!parts) throw Error(Errc::NonDecimalValue, "'" + std::string(s) + "' is not a decimal");
  std::string digits = parts->int_digits + parts->frac_digits;
  long point = static_cast<long>(parts->int_digits.size()) + exponent;
  if (point < 0) {
    digits.insert(0, static_cast<std::size_t>(-point), '0');
    point = 0;
  }
  if (point > static_cast<long>(digits.size())) digits.append(static_cast<std::size_t>(point) - digits.size(), '0');
  detail::DecimalParts out;
  out.negative = parts->negative;
  out.int_digits = digits.substr(0, static_cast<std::size_t>(point));
  out.frac_digits = digits.substr(static_cast<std::size_t>(point));
  return detail::join_decimal(std::move(out));
}

inline bool decimal_equal(std::string_view a, std::string_view b) {
  if (!is_decimal(a) || !is_decimal(b)) return false;
  return canonical_decimal(a) == canonical_decimal(b);
}

inline bool literal_parses(std::string_view value, Datatype d) {
  switch (d) {
    case Datatype::String:
      return true;
    case Datatype::Decimal:
      return is_decimal(value);
    case Datatype::Integer: {
      static const std::regex re(R"([+-]?[0-9]+)");
      return std::regex_match(value.begin(), value.end(), re);
    }
    case Datatype::Boolean:
      return value == "true" || value == "false" || value == "1" || value == "0";
    case Datatype::Datetime: {
      static const std::regex re(
          R"(([0-9]{4})-([0-9]{2})-([0-9]{2})(T([0-9]{2}):([0-9]{2}):([0-9]{2})(\.[0-9]+)?(Z|[+-][0-9]{2}:[0-9]{2})?)?)");
      std::match_results<std::string_view::const_iterator> m;
      if (!std::regex_match(value.begin(), value.end(), m, re)) return false;
      int month = std::stoi(m[2].str());
      int day = std::stoi(m[3].str());
      if (month < 1 || month > 12 || day < 1 || day > 31) return false;
      if (m[4].matched) {
        if (std::stoi(m[5].str()) > 23 || std::stoi(m[6].str()) > 59 || std::stoi(m[7].str()) > 60) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace interlex
