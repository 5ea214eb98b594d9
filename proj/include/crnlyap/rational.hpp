#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crnlyap {

/// Exact fraction on 64-bit numerator/denominator, always stored in lowest
/// terms with a positive denominator. Arithmetic goes through 128-bit
/// intermediates and throws std::overflow_error instead of wrapping.
class Rational {
public:
  using Int = long long;

  Rational() = default;
  Rational(Int n) : num_(n), den_(1) {}
  Rational(Int n, Int d) { assign(n, d); }

  Int num() const { return num_; }
  Int den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  bool is_positive() const { return num_ > 0; }
  bool is_negative() const { return num_ < 0; }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  explicit operator double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rational reciprocal() const {
    if (num_ == 0) throw std::domain_error("reciprocal of zero");
    return Rational(den_, num_);
  }

  /// Nonnegative integer power.
  Rational pow(long e) const {
    if (e < 0) return reciprocal().pow(-e);
    Rational result(1);
    Rational base = *this;
    while (e > 0) {
      if (e & 1) result *= base;
      base = (e > 1) ? base * base : base;
      e >>= 1;
    }
    return result;
  }

  Rational operator-() const { return Rational(-num_, den_, no_normalize{}); }

  Rational& operator+=(const Rational& o) {
    assign128(i128(num_) * o.den_ + i128(o.num_) * den_, i128(den_) * o.den_);
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    assign128(i128(num_) * o.den_ - i128(o.num_) * den_, i128(den_) * o.den_);
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    assign128(i128(num_) * o.num_, i128(den_) * o.den_);
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    assign128(i128(num_) * o.den_, i128(den_) * o.num_);
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  /// "p/q", or just "p" for integers.
  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) {
      s += '/';
      s += std::to_string(den_);
    }
    return s;
  }

  /// Accepts integers ("-3"), fractions ("5/3") and decimals with optional
  /// exponent ("0.25", "1.5e-2"). Returns nullopt when the text does not
  /// match or the value does not fit in 64/64 bits.
  static std::optional<Rational> parse(std::string_view text);

private:
  using i128 = __int128;
  struct no_normalize {};

  Rational(Int n, Int d, no_normalize) : num_(n), den_(d) {}

  void assign(Int n, Int d) { assign128(n, d); }

  static unsigned __int128 gcd128(unsigned __int128 a, unsigned __int128 b) {
    while (b != 0) {
      unsigned __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  void assign128(i128 n, i128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    if (n == 0) {
      num_ = 0;
      den_ = 1;
      return;
    }
    unsigned __int128 an = n < 0 ? static_cast<unsigned __int128>(-n)
                                 : static_cast<unsigned __int128>(n);
    unsigned __int128 g = gcd128(an, static_cast<unsigned __int128>(d));
    n /= static_cast<i128>(g);
    d /= static_cast<i128>(g);
    constexpr i128 kMax = std::numeric_limits<Int>::max();
    if (n > kMax || n < -kMax || d > kMax)
      throw std::overflow_error("rational overflow");
    num_ = static_cast<Int>(n);
    den_ = static_cast<Int>(d);
  }

  Int num_ = 0;
  Int den_ = 1;
};

inline Rational abs(const Rational& q) { return q.is_negative() ? -q : q; }

inline double to_double(const Rational& q) { return static_cast<double>(q); }

inline std::ostream& operator<<(std::ostream& os, const Rational& q) {
  return os << q.str();
}

inline std::optional<Rational> Rational::parse(std::string_view text) {
  size_t pos = 0;
  auto peek = [&]() -> int { return pos < text.size() ? text[pos] : -1; };
  bool negative = false;
  if (peek() == '+' || peek() == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  if (!std::isdigit(peek())) return std::nullopt;

  i128 mantissa = 0;
  int digits = 0;
  auto read_digits = [&](i128& out) -> int {
    int count = 0;
    while (std::isdigit(peek())) {
      out = out * 10 + (text[pos] - '0');
      ++pos;
      ++count;
      if (out > i128(1) << 100) return -1;  // way past representable
    }
    return count;
  };
  digits = read_digits(mantissa);
  if (digits < 0) return std::nullopt;

  if (peek() == '/') {
    ++pos;
    i128 den = 0;
    if (read_digits(den) <= 0 || pos != text.size() || den == 0)
      return std::nullopt;
    try {
      Rational q;
      q.assign128(negative ? -mantissa : mantissa, den);
      return q;
    } catch (const std::overflow_error&) {
      return std::nullopt;
    }
  }

  long frac_digits = 0;
  if (peek() == '.') {
    ++pos;
    size_t before = pos;
    if (read_digits(mantissa) < 0) return std::nullopt;
    frac_digits = static_cast<long>(pos - before);
  }
  long exponent = 0;
  if (peek() == 'e' || peek() == 'E') {
    ++pos;
    bool exp_neg = false;
    if (peek() == '+' || peek() == '-') {
      exp_neg = text[pos] == '-';
      ++pos;
    }
    i128 e = 0;
    if (read_digits(e) <= 0 || e > 4000) return std::nullopt;
    exponent = exp_neg ? -static_cast<long>(e) : static_cast<long>(e);
  }
  if (pos != text.size()) return std::nullopt;

  long net = exponent - frac_digits;
  i128 num = negative ? -mantissa : mantissa;
  i128 den = 1;
  try {
    while (net > 0) {
      num *= 10;
      if (num > i128(1) << 100 || num < -(i128(1) << 100)) return std::nullopt;
      --net;
    }
    while (net < 0) {
      den *= 10;
      if (den > i128(1) << 100) return std::nullopt;
      ++net;
    }
    Rational q;
    q.assign128(num, den);
    return q;
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

}  // namespace crnlyap

namespace Eigen {

template <>
struct NumTraits<crnlyap::Rational> : GenericNumTraits<crnlyap::Rational> {
  typedef crnlyap::Rational Real;
  typedef crnlyap::Rational NonInteger;
  typedef crnlyap::Rational Nested;

  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }

  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 20,
    MulCost = 20
  };
};

}  // namespace Eigen

namespace crnlyap {

using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

inline Eigen::VectorXd to_double(const RationalVector& v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

inline Eigen::MatrixXd to_double(const RationalMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) out(i, j) = to_double(m(i, j));
  return out;
}

}  // namespace crnlyap
