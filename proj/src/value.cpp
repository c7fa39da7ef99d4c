#include "rtc/value.hpp"

#include <cctype>
#include <sstream>

namespace rtc {

std::string_view to_string(TypeTag t) {
  switch (t) {
    case TypeTag::Bool: return "bool";
    case TypeTag::Int: return "int";
    case TypeTag::Real: return "real";
  }
  return "?";
}

std::optional<TypeTag> type_from_string(std::string_view s) {
  if (s == "bool" || s == "boolean") return TypeTag::Bool;
  if (s == "int" || s == "integer") return TypeTag::Int;
  if (s == "real") return TypeTag::Real;
  return std::nullopt;
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational q;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw Error("malformed rational '" + std::string(text) + "'");
    mpz_class d{std::string(den), 10};
    if (d == 0) throw Error("zero denominator in '" + std::string(text) + "'");
    q = Rational(mpz_class(std::string(num), 10), d);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto ip = s.substr(0, dot);
    auto fp = s.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty()))
      throw Error("malformed decimal '" + std::string(text) + "'");
    std::string digits = std::string(ip) + std::string(fp);
    if (digits.empty()) digits = "0";
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
    q = Rational(mpz_class(digits, 10), den);
  } else {
    if (!all_digits(s)) throw Error("malformed number '" + std::string(text) + "'");
    q = Rational(mpz_class(std::string(s), 10));
  }
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

std::string rational_to_fraction(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::optional<std::string> rational_to_decimal(const Rational& q) {
  mpz_class den = q.get_den();
  int twos = 0, fives = 0;
  while (den % 2 == 0) { den /= 2; ++twos; }
  while (den % 5 == 0) { den /= 5; ++fives; }
  if (den != 1) return std::nullopt;
  int places = std::max(twos, fives);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
  mpz_class scaled = q.get_num() * scale / q.get_den();
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string digits = scaled.get_str();
  if (places == 0) return std::string(neg ? "-" : "") + digits + ".0";
  if (static_cast<int>(digits.size()) <= places) digits.insert(0, places - digits.size() + 1, '0');
  digits.insert(digits.size() - places, ".");
  return std::string(neg ? "-" : "") + digits;
}

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.b_ = b;
  return v;
}

Value Value::integer(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  if (c.get_den() != 1) throw EvalError("non-integral integer value " + rational_to_fraction(c));
  Value v;
  v.kind_ = Kind::Int;
  v.q_ = q;
  v.q_.canonicalize();
  return v;
}

Value Value::real(const Rational& q) {
  Value v;
  v.kind_ = Kind::Real;
  v.q_ = q;
  v.q_.canonicalize();
  return v;
}

Value Value::infinity() {
  Value v;
  v.kind_ = Kind::Infinity;
  return v;
}

bool Value::as_bool() const {
  if (kind_ != Kind::Bool) throw EvalError("expected boolean value, got " + to_string());
  return b_;
}

const Rational& Value::as_rational() const {
  if (!is_numeric()) throw EvalError("expected numeric value, got " + to_string());
  return q_;
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Value::Kind::Bool: return a.b_ == b.b_;
    case Value::Kind::Infinity: return true;
    default: return a.q_ == b.q_;
  }
}

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::Bool: return b_ ? "true" : "false";
    case Kind::Int: return q_.get_num().get_str();
    case Kind::Real: return rational_to_fraction(q_);
    case Kind::Infinity: return "inf";
  }
  return "?";
}

std::ostream& operator<<(std::ostream& os, const Value& v) { return os << v.to_string(); }

}  // namespace rtc
