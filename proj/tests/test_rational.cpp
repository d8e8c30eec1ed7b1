#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "biest/rational.hpp"

using namespace biest;

TEST_CASE("arithmetic stays reduced and exact") {
  Rat a(1, 3), b(1, 6);
  CHECK(a + b == Rat(1, 2));
  CHECK(a - b == Rat(1, 6));
  CHECK(a * b == Rat(1, 18));
  CHECK(a / b == Rat(2));
  CHECK((-a).num() == -1);
  CHECK(Rat(4, 6) == Rat(2, 3));
  CHECK(Rat(-4, -6) == Rat(2, 3));
  CHECK(Rat(4, -6) == Rat(-2, 3));
}

TEST_CASE("comparisons and floor") {
  CHECK(Rat(1, 3) < Rat(1, 2));
  CHECK(Rat(-1, 3) > Rat(-1, 2));
  CHECK(Rat(7, 2).floor() == 3);
  CHECK(Rat(-7, 2).floor() == -4);
  CHECK(Rat(6, 3).floor() == 2);
  CHECK(Rat::pow2(-3) == Rat(1, 8));
  CHECK(Rat::pow2(5) == Rat(32));
}

TEST_CASE("string round trip") {
  for (const Rat& r : {Rat(0), Rat(5), Rat(-7, 3), Rat(1, 1024), Rat(22, 7)})
    CHECK(Rat::parse(r.str()) == r);
}

TEST_CASE("division by zero and overflow guard") {
  CHECK_THROWS(Rat(1, 0));
  CHECK_THROWS(Rat(1) / Rat(0));
  Rat big(INT64_MAX / 2, 1);
  CHECK_THROWS(big * Rat(8));
}

TEST_CASE("half-open interval predicates") {
  QInterval a{Rat(0), Rat(1)};
  QInterval b{Rat(1), Rat(2)};
  CHECK(!a.intersects(b));  // share only the boundary point
  CHECK(a.contains(Rat(0)));
  CHECK(!a.contains(Rat(1)));
  CHECK(QInterval{Rat(0), Rat(2)}.contains(a));
  CHECK(a.distance(b) == Rat(0));
  CHECK(a.distance(QInterval{Rat(3), Rat(4)}) == Rat(2));

  QInterval d = a.dilate(Rat(3));
  CHECK(d.lo == Rat(-1));
  CHECK(d.hi == Rat(2));
  CHECK(a.negate() == QInterval{Rat(-1), Rat(0)});
}
