#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include <nlohmann/json.hpp>

#include "uhpo/qset.hpp"

using namespace uhpo;
using namespace uhpo::qset;

namespace {

Rat rr(long long n, long long d = 1) { return make_rat(n, d); }

// Deterministic random expression trees over a small pool of endpoints.
struct TreeGen {
  std::mt19937 rng{987654321};
  std::vector<Cut> cuts{Cut::neg_inf(),  Cut::pos_inf(),    Cut(rr(-2)),
                        Cut(rr(0)),      Cut(rr(1, 2)),     Cut(rr(3)),
                        Cut(sqrt2()),    Cut(Quad(rr(-3), rr(1))), Cut(Quad(rr(0), rr(1, 2)))};

  Rat random_rat() {
    long long n = (long long)(rng() % 25) - 12;
    long long d = 1 + rng() % 8;
    return rr(n, d);
  }

  QSetPtr gen(int depth) {
    if (depth == 0 || rng() % 4 == 0) {
      switch (rng() % 4) {
        case 0: return q_full();
        case 1: return q_class(rng() % kDefaultModulus);
        case 2: {
          Cut a = cuts[rng() % cuts.size()], b = cuts[rng() % cuts.size()];
          return q_interval(a, b);
        }
        default: {
          std::vector<Rat> pts;
          for (unsigned i = 0, m = rng() % 4; i < m; ++i) pts.push_back(random_rat());
          return q_finite(std::move(pts));
        }
      }
    }
    QSetPtr a = gen(depth - 1), b = gen(depth - 1);
    switch (rng() % 3) {
      case 0: return q_union(a, b);
      case 1: return q_intersect(a, b);
      default: return q_diff(a, b);
    }
  }
};

}  // namespace

TEST_CASE("residue classes partition Q") {
  TreeGen g;
  for (int i = 0; i < 300; ++i) {
    Rat q = g.random_rat();
    int hits = 0;
    for (int c = 0; c < kDefaultModulus; ++c)
      if (member(q, q_class(c))) ++hits;
    CHECK(hits == 1);
  }
}

TEST_CASE("member basics") {
  CHECK(member(rr(1, 3), q_class(1), 3));  // numerator 1 = 1 mod 3
  CHECK(member(rr(7), q_full()));
  CHECK_FALSE(member(rr(7), q_diff(q_full(), q_point(rr(7)))));
  CHECK(member(rr(1, 2), q_interval(Cut(rr(0)), Cut(rr(1)))));
  CHECK_FALSE(member(rr(0), q_interval(Cut(rr(0)), Cut(rr(1)))));
  CHECK(member(rr(1), q_interval(Cut(rr(0)), Cut(sqrt2()))));
  CHECK_FALSE(member(rr(2), q_interval(Cut(rr(0)), Cut(sqrt2()))));
}

TEST_CASE("canonicalize: disjoint classes, partition to full, self-difference") {
  CHECK(canonicalize(q_intersect(q_class(0), q_class(1))).empty());

  QSetPtr all = q_class(0);
  for (int i = 1; i < kDefaultModulus; ++i) all = q_union(all, q_class(i));
  CHECK(set_equal(all, q_full()));

  QSetPtr iv = q_interval(Cut(rr(0)), Cut(rr(1)));
  CHECK(canonicalize(q_diff(iv, iv)).empty());
}

TEST_CASE("canonicalize merges across removable endpoints") {
  // (0,1) u {1} u (1,2) collapses to one piece when 1 is present
  QSetPtr e = q_union(q_union(q_interval(Cut(rr(0)), Cut(rr(1))), q_point(rr(1))),
                      q_interval(Cut(rr(1)), Cut(rr(2))));
  Canon c = canonicalize(e);
  REQUIRE(c.pieces.size() == 1);
  CHECK(c.pieces[0].lo == Cut(rr(0)));
  CHECK(c.pieces[0].hi == Cut(rr(2)));
  CHECK(c.add.empty());
  CHECK(c.remove.empty());

  // without the midpoint the merged piece carries a remove mark
  QSetPtr f = q_union(q_interval(Cut(rr(0)), Cut(rr(1))), q_interval(Cut(rr(1)), Cut(rr(2))));
  Canon cf = canonicalize(f);
  REQUIRE(cf.pieces.size() == 1);
  REQUIRE(cf.remove.size() == 1);
  CHECK(cf.remove[0] == rr(1));
  CHECK_FALSE(cf.contains(rr(1)));
  CHECK(cf.contains(rr(1, 2)));
}

TEST_CASE("canonicalize soundness on random trees") {
  TreeGen g;
  int checks = 0;
  for (int t = 0; t < 40; ++t) {
    QSetPtr e = g.gen(6);
    Canon c = canonicalize(e);
    for (int i = 0; i < 30; ++i) {
      Rat q = g.random_rat();
      CHECK(member(q, e) == c.contains(q));
      ++checks;
    }
    // canonical form survives a round trip through expression syntax
    CHECK(canonicalize(canon_to_expr(c)) == c);
    CHECK(canonicalize(parse_sexpr(to_sexpr(e))) == c);
    CHECK(canonicalize(from_json(to_json(e))) == c);
  }
  CHECK(checks >= 1000);
}

TEST_CASE("witness_in: deterministic minimal-height member") {
  auto w = witness_in(q_class(0), Cut(rr(0)), Cut(rr(1)), 3);
  REQUIRE(w.has_value());
  CHECK(member(*w, q_class(0), 3));
  CHECK(rr(0) < *w);
  CHECK(*w < rr(1));
  // 3/4 is the first height-enumerated rational in (0,1) with numerator = 0 mod 3
  CHECK(*w == rr(3, 4));

  CHECK_FALSE(witness_in(q_finite({rr(5)}), Cut(rr(0)), Cut(rr(1))).has_value());
  CHECK_FALSE(witness_in(q_full(), Cut(rr(2)), Cut(rr(2))).has_value());
}

TEST_CASE("witness_in None agrees with bounded enumeration") {
  TreeGen g;
  for (int t = 0; t < 25; ++t) {
    QSetPtr e = g.gen(4);
    Cut lo = Cut(rr(-1)), hi = Cut(rr(2));
    auto w = witness_in(e, lo, hi);
    bool canon_empty = canonicalize(q_intersect(e, q_interval(lo, hi))).empty();
    CHECK(w.has_value() == !canon_empty);
    if (w) {
      CHECK(member(*w, e));
    } else {
      // 10_000-term height-bounded scan must agree
      int found = 0;
      RationalEnumerator en;
      for (int i = 0; i < 10'000; ++i) {
        const Rat& q = en.at(i);
        if (cmp_cut_rat(lo, q) < 0 && cmp_cut_rat(hi, q) > 0 && member(q, e)) ++found;
      }
      CHECK(found == 0);
    }
  }
}

TEST_CASE("dense_in") {
  CHECK(dense_in(q_class(2), Cut::neg_inf(), Cut::pos_inf()));
  CHECK_FALSE(dense_in(q_finite({rr(0), rr(1)}), Cut(rr(0)), Cut(rr(2))));
  CHECK(dense_in(q_diff(q_full(), q_point(rr(0))), Cut(rr(-1)), Cut(rr(1))));
  CHECK(dense_in(q_class(1), Cut(rr(0)), Cut(rr(0))));  // empty interval: vacuous
  CHECK_FALSE(dense_in(q_intersect(q_class(0), q_interval(Cut(rr(0)), Cut(rr(1)))),
                       Cut(rr(0)), Cut(rr(2))));
  // spot check against witness scans on a grid of subintervals
  for (int i = -4; i < 4; ++i) {
    CHECK(witness_in(q_class(2), Cut(rr(i)), Cut(rr(i + 1))).has_value());
  }
}

TEST_CASE("density trichotomy") {
  TreeGen g;
  Cut lo = Cut(rr(0)), hi = Cut(rr(1));
  for (int t = 0; t < 60; ++t) {
    QSetPtr e = g.gen(5);
    bool dense = dense_in(e, lo, hi);
    bool finite = is_finite_expr(q_intersect(e, q_interval(lo, hi))).finite;
    bool both = dense && finite;
    CHECK_FALSE(both);
  }
}

TEST_CASE("max_of and min_of") {
  QSetPtr piece = q_intersect(q_interval(Cut(rr(0)), Cut(rr(1))), q_class(0));
  auto m = max_of(q_union(piece, q_point(rr(2))));
  REQUIRE(m.has_value());
  CHECK(*m == rr(2));

  CHECK_FALSE(max_of(q_interval(Cut(rr(0)), Cut(rr(1)))).has_value());
  auto m2 = max_of(q_finite({rr(3), rr(7)}));
  REQUIRE(m2.has_value());
  CHECK(*m2 == rr(7));
  CHECK_THROWS_AS(max_of(q_empty()), std::invalid_argument);

  auto mn = min_of(q_union(piece, q_point(rr(-5))));
  REQUIRE(mn.has_value());
  CHECK(*mn == rr(-5));
  CHECK_FALSE(min_of(q_class(3)).has_value());
}

TEST_CASE("max_of agrees with height-bounded brute force when it answers") {
  TreeGen g;
  for (int t = 0; t < 40; ++t) {
    QSetPtr e = g.gen(5);
    Canon c = canonicalize(e);
    if (c.empty()) continue;
    auto m = max_of(e);
    if (!m) continue;
    CHECK(member(*m, e));
    RationalEnumerator en;
    for (int i = 0; i < 3000; ++i) {
      const Rat& q = en.at(i);
      if (member(q, e)) CHECK(q <= *m);
    }
  }
}

TEST_CASE("almost_subset") {
  QSetPtr j = q_class(0);
  CHECK(almost_subset(q_union(j, q_point(rr(0))), j));
  CHECK_FALSE(almost_subset(q_full(), q_class(0)));
  TreeGen g;
  for (int t = 0; t < 10; ++t) {
    QSetPtr e = g.gen(4);
    CHECK(almost_subset(e, e));
  }
}

TEST_CASE("is_finite_expr") {
  auto f1 = is_finite_expr(q_diff(q_finite({rr(1), rr(2), rr(3)}), q_point(rr(2))));
  CHECK(f1.finite);
  CHECK(f1.cardinality == 2);
  CHECK_FALSE(is_finite_expr(q_class(0)).finite);
  auto f3 = is_finite_expr(q_intersect(q_class(0), q_class(1)));
  CHECK(f3.finite);
  CHECK(f3.cardinality == 0);
}

TEST_CASE("sexpr syntax round trip of the documented form") {
  QSetPtr e = parse_sexpr("(diff (interval -inf (sqrt2-plus -3)) (fin 0 1/2))");
  REQUIRE(e);
  CHECK(member(rr(-10), e));
  CHECK_FALSE(member(rr(0), e));
  CHECK_FALSE(member(rr(1, 2), e));
  // sqrt2 - 3 is about -1.586: -2 is inside, -1 is not
  CHECK(member(rr(-2), e));
  CHECK_FALSE(member(rr(-1), e));
  QSetPtr back = parse_sexpr(to_sexpr(e));
  CHECK(canonicalize(back) == canonicalize(e));
}

TEST_CASE("interval endpoints at quadratic irrationals have no max or min") {
  QSetPtr block = q_interval(Cut(Quad(rr(-2), rr(1))), Cut(Quad(rr(-1), rr(1))));
  CHECK_FALSE(max_of(block).has_value());
  CHECK_FALSE(min_of(block).has_value());
  CHECK(dense_in(block, Cut(Quad(rr(-2), rr(1))), Cut(Quad(rr(-1), rr(1)))));
}
