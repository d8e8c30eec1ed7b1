#pragma once

#include <cstdint>
#include <compare>
#include <numeric>
#include <stdexcept>
#include <string>

namespace biest {

/// Exact rational over int64 with 128-bit intermediates.
///
/// Canonical form: den > 0, gcd(|num|, den) == 1.  All geometry predicates
/// in the tile/grid layers run on these; endpoints of shifted dyadic
/// intervals have denominators of the form 3*2^m, so int64 is ample for the
/// scale ranges this project touches.  Overflow past int64 after reduction
/// throws instead of wrapping.
class Rat {
 public:
  constexpr Rat() : num_(0), den_(1) {}
  constexpr Rat(std::int64_t n) : num_(n), den_(1) {}
  Rat(std::int64_t n, std::int64_t d);

  static Rat pow2(int e);  // 2^e for |e| <= 62

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return double(num_) / double(den_); }
  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  bool is_integer() const { return den_ == 1; }

  Rat operator-() const;
  Rat& operator+=(const Rat& o);
  Rat& operator-=(const Rat& o);
  Rat& operator*=(const Rat& o);
  Rat& operator/=(const Rat& o);

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b);

  Rat abs() const { return num_ < 0 ? -*this : *this; }

  /// Largest integer <= value.
  std::int64_t floor() const;

  std::string str() const;            // "p/q" or "p"
  static Rat parse(const std::string& s);

 private:
  static Rat make_reduced(__int128 n, __int128 d);
  std::int64_t num_, den_;
};

inline Rat min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

/// Half-open interval [lo, hi) with rational endpoints.
struct QInterval {
  Rat lo, hi;

  Rat length() const { return hi - lo; }
  Rat center() const;
  bool empty() const { return !(lo < hi); }
  bool contains(const Rat& x) const { return !(x < lo) && x < hi; }
  bool contains(const QInterval& o) const { return !(o.lo < lo) && !(hi < o.hi); }
  bool intersects(const QInterval& o) const { return lo < o.hi && o.lo < hi; }

  /// Interval with the same center and c times the length.
  QInterval dilate(const Rat& c) const;

  /// Reflection about the origin (as a set).
  QInterval negate() const { return QInterval{-hi + Rat(0), -lo + Rat(0)}; }

  /// inf |x - y| over x in this, y in o (closures).
  Rat distance(const QInterval& o) const;

  friend bool operator==(const QInterval& a, const QInterval& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

}  // namespace biest
