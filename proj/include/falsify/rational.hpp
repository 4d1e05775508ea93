#pragma once

#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace falsify {

/// Exact rational number in lowest terms with a positive denominator.
///
/// Thin value wrapper over GMP's mpq_class. Every constructor canonicalizes, and
/// every arithmetic result is canonical, so two equal values always compare and
/// print identically.
class Rational {
 public:
  Rational() = default;

  template <std::integral I>
  Rational(I value) : q_(to_mpz(value)) {}  // NOLINT(google-explicit-constructor)

  template <std::integral I, std::integral J>
  Rational(I numerator, J denominator) : Rational(to_mpz(numerator), to_mpz(denominator)) {}

  Rational(const mpz_class& numerator, const mpz_class& denominator);
  explicit Rational(mpq_class value);

  /// Parses "p/q" or "p" (optional leading minus). Throws input_error on junk or q = 0.
  static Rational parse(std::string_view text);

  /// Canonical "p/q" text; integers are written "p/1" so every value has one form.
  [[nodiscard]] std::string str() const;
  [[nodiscard]] double to_double() const { return q_.get_d(); }

  [[nodiscard]] mpz_class numerator() const { return q_.get_num(); }
  [[nodiscard]] mpz_class denominator() const { return q_.get_den(); }
  [[nodiscard]] int sign() const { return sgn(q_); }
  [[nodiscard]] bool is_zero() const { return sign() == 0; }
  [[nodiscard]] const mpq_class& raw() const { return q_; }

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  template <std::integral I>
  static mpz_class to_mpz(I value) {
    if constexpr (std::is_signed_v<I>) {
      return mpz_class(static_cast<long>(value));
    } else {
      return mpz_class(static_cast<unsigned long>(value));
    }
  }

  mpq_class q_;
};

/// 2^exponent, exact (exponent may be negative).
Rational pow2(long exponent);

Rational abs(const Rational& r);
const Rational& min(const Rational& a, const Rational& b);
const Rational& max(const Rational& a, const Rational& b);

}  // namespace falsify

template <>
struct std::hash<falsify::Rational> {
  std::size_t operator()(const falsify::Rational& r) const noexcept {
    return std::hash<std::string>{}(r.str());
  }
};
