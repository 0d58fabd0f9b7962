#include "qpwalk/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace qpwalk {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Rat parse_decimal(std::string_view text) {
  // [sign] digits [. digits] [e [sign] digits]
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exp10 = 0;
  if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
    std::string expstr(s.substr(epos + 1));
    if (expstr.empty()) raise(Errc::ParseError, "empty exponent in '" + std::string(text) + "'");
    char* end = nullptr;
    exp10 = std::strtol(expstr.c_str(), &end, 10);
    if (end == nullptr || *end != '\0')
      raise(Errc::ParseError, "bad exponent in '" + std::string(text) + "'");
    s = s.substr(0, epos);
  }
  std::string digits;
  long frac_digits = 0;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (ip.empty() && fp.empty())
      raise(Errc::ParseError, "no digits in '" + std::string(text) + "'");
    if (!ip.empty() && !all_digits(ip))
      raise(Errc::ParseError, "bad number '" + std::string(text) + "'");
    if (!fp.empty() && !all_digits(fp))
      raise(Errc::ParseError, "bad number '" + std::string(text) + "'");
    digits = std::string(ip) + std::string(fp);
    frac_digits = static_cast<long>(fp.size());
  } else {
    if (!all_digits(s)) raise(Errc::ParseError, "bad number '" + std::string(text) + "'");
    digits = std::string(s);
  }
  if (digits.empty()) raise(Errc::ParseError, "no digits in '" + std::string(text) + "'");
  mpz_class numerator(digits, 10);
  if (negative) numerator = -numerator;
  mpz_class denominator(1);
  long shift = exp10 - frac_digits;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rat result;
  if (shift >= 0)
    result = Rat(numerator * pow10);
  else
    result = Rat(numerator, pow10);
  result.canonicalize();
  return result;
}

}  // namespace

Rat rat_from_string(std::string_view text) {
  // trim
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) raise(Errc::ParseError, "empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view ns = text.substr(0, slash), ds = text.substr(slash + 1);
    if (ns.empty() || ds.empty())
      raise(Errc::ParseError, "bad fraction '" + std::string(text) + "'");
    Rat num = parse_decimal(ns);
    Rat den = parse_decimal(ds);
    if (den == 0) raise(Errc::ParseError, "zero denominator in '" + std::string(text) + "'");
    return Rat(num / den);
  }
  return parse_decimal(text);
}

Rat rat_from_double(double value) {
  if (!std::isfinite(value)) raise(Errc::ParseError, "non-finite value");
  Rat r;
  mpq_set_d(r.get_mpq_t(), value);
  return r;
}

std::string rat_to_string(const Rat& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::optional<Rat> exact_sqrt(const Rat& value) {
  if (value < 0) return std::nullopt;
  mpz_class num = value.get_num(), den = value.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return std::nullopt;
  mpz_class sn, sd;
  mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
  return Rat(sn, sd);
}

}  // namespace qpwalk
