#include "loopsynth/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace loopsynth {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c)) == 0) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational result;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    std::string_view num = body.substr(0, slash);
    std::string_view den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw std::invalid_argument("malformed rational: " + std::string(text));
    }
    Integer d{std::string(den)};
    if (d == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
    result = Rational(Integer(std::string(num)), d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    std::string_view ip = body.substr(0, dot);
    std::string_view fp = body.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) ||
        (ip.empty() && fp.empty())) {
      throw std::invalid_argument("malformed decimal: " + std::string(text));
    }
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    Integer digits(std::string(ip.empty() ? "0" : ip) + std::string(fp));
    result = Rational(digits, scale);
  } else {
    if (!all_digits(body)) throw std::invalid_argument("malformed integer: " + std::string(text));
    result = Rational(Integer(std::string(body)));
  }
  result.canonicalize();
  return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Rational pow(const Rational& q, unsigned e) {
  Integer num;
  Integer den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), e);
  return Rational(num, den);
}

}  // namespace loopsynth
