#pragma once

#include <gmpxx.h>

#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "rtc/errors.hpp"

namespace rtc {

using Rational = mpq_class;

enum class TypeTag { Bool, Int, Real };

std::string_view to_string(TypeTag t);
std::optional<TypeTag> type_from_string(std::string_view s);

/// Parses "num/den", "num", or a decimal such as "-12.25". Throws Error on junk.
Rational parse_rational(std::string_view text);
/// Canonical "num/den" form (always carries the denominator).
std::string rational_to_fraction(const Rational& q);
/// Finite decimal rendering if the denominator has only 2 and 5 as factors.
std::optional<std::string> rational_to_decimal(const Rational& q);

/// A runtime value. Integers and reals share an exact rational payload but
/// keep their own kind so that no implicit coercion happens.
class Value {
 public:
  enum class Kind { Bool, Int, Real, Infinity };

  Value() : kind_(Kind::Bool) {}
  static Value boolean(bool b);
  static Value integer(const Rational& q);
  static Value integer(long v) { return integer(Rational(v)); }
  static Value real(const Rational& q);
  static Value infinity();

  Kind kind() const { return kind_; }
  bool is_bool() const { return kind_ == Kind::Bool; }
  bool is_infinity() const { return kind_ == Kind::Infinity; }
  bool is_numeric() const { return kind_ == Kind::Int || kind_ == Kind::Real; }

  bool as_bool() const;
  const Rational& as_rational() const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

  std::string to_string() const;

 private:
  Kind kind_;
  bool b_ = false;
  Rational q_;
};

std::ostream& operator<<(std::ostream& os, const Value& v);

}  // namespace rtc
