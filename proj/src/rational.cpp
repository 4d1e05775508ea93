#include "falsify/rational.hpp"

#include <cctype>

#include "falsify/errors.hpp"

namespace falsify {

Rational::Rational(const mpz_class& numerator, const mpz_class& denominator) {
  if (denominator == 0) {
    throw input_error("rational with zero denominator");
  }
  q_ = mpq_class(numerator, denominator);
  q_.canonicalize();
}

Rational::Rational(mpq_class value) : q_(std::move(value)) {
  if (q_.get_den() == 0) {
    throw input_error("rational with zero denominator");
  }
  q_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) {
    throw domain_error("rational division by zero");
  }
  q_ /= o.q_;
  return *this;
}

namespace {

bool is_integer_text(std::string_view s) {
  if (!s.empty() && s.front() == '-') {
    s.remove_prefix(1);
  }
  if (s.empty()) {
    return false;
  }
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c)) == 0) {
      return false;
    }
  }
  return true;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  const std::string_view num = text.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? std::string_view("1")
                                                               : text.substr(slash + 1);
  if (!is_integer_text(num) || !is_integer_text(den) || den.front() == '-') {
    throw input_error("malformed rational '" + std::string(text) + "'");
  }
  return Rational(mpz_class(std::string(num)), mpz_class(std::string(den)));
}

std::string Rational::str() const {
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

Rational pow2(long exponent) {
  mpz_class p = 1;
  const unsigned long e = exponent < 0 ? static_cast<unsigned long>(-exponent)
                                       : static_cast<unsigned long>(exponent);
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), e);
  return exponent < 0 ? Rational(mpz_class(1), p) : Rational(p, mpz_class(1));
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace falsify
