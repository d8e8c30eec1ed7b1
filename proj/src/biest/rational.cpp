#include "biest/rational.hpp"

namespace biest {

namespace {

std::int64_t checked_cast(__int128 v) {
  if (v > __int128(INT64_MAX) || v < __int128(INT64_MIN))
    throw std::overflow_error("Rat: overflow past int64");
  return std::int64_t(v);
}

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rat Rat::make_reduced(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("Rat: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  Rat r;
  r.num_ = checked_cast(n);
  r.den_ = checked_cast(d);
  return r;
}

Rat::Rat(std::int64_t n, std::int64_t d) { *this = make_reduced(n, d); }

Rat Rat::pow2(int e) {
  if (e < -62 || e > 62) throw std::domain_error("Rat::pow2: exponent out of range");
  Rat r;
  if (e >= 0) {
    r.num_ = std::int64_t(1) << e;
    r.den_ = 1;
  } else {
    r.num_ = 1;
    r.den_ = std::int64_t(1) << (-e);
  }
  return r;
}

Rat Rat::operator-() const {
  Rat r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rat& Rat::operator+=(const Rat& o) {
  *this = make_reduced(__int128(num_) * o.den_ + __int128(o.num_) * den_,
                       __int128(den_) * o.den_);
  return *this;
}

Rat& Rat::operator-=(const Rat& o) { return *this += -o; }

Rat& Rat::operator*=(const Rat& o) {
  *this = make_reduced(__int128(num_) * o.num_, __int128(den_) * o.den_);
  return *this;
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.num_ == 0) throw std::domain_error("Rat: division by zero");
  *this = make_reduced(__int128(num_) * o.den_, __int128(den_) * o.num_);
  return *this;
}

std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
  __int128 l = __int128(a.num_) * b.den_;
  __int128 r = __int128(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::int64_t Rat::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::string Rat::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rat Rat::parse(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(std::stoll(s));
  return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

Rat QInterval::center() const { return (lo + hi) / Rat(2); }

QInterval QInterval::dilate(const Rat& c) const {
  Rat mid = center();
  Rat half = (hi - lo) / Rat(2) * c;
  return QInterval{mid - half, mid + half};
}

Rat QInterval::distance(const QInterval& o) const {
  if (intersects(o) || hi == o.lo || o.hi == lo) return Rat(0);
  if (hi < o.lo) return o.lo - hi;
  return lo - o.hi;
}

}  // namespace biest
