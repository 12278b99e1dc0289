#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include <nlohmann/json.hpp>

#include "uhpo/generic.hpp"

using namespace uhpo;
using namespace uhpo::gen;
using core::Rel;

namespace {

Rat rr(long long n, long long d = 1) { return make_rat(n, d); }

qset::QSetPtr J0() { return qset::q_class(0); }

Condition two_points() {
  Condition p = extend_with_point(Condition{}, rr(0));
  p = extend_with_point(p, rr(1));
  RatTriple t;
  t.L.push_back(rr(0));
  t.G.push_back(rr(1));
  // no realizer yet -> cannot be in C without a relation; build 0 lt 1 by hand
  return p;
}

}  // namespace

TEST_CASE("extend_with_point") {
  Condition empty;
  Condition p0 = extend_with_point(empty, rr(0));
  CHECK(p0.size() == 1);
  CHECK(p0.has(rr(0)));
  CHECK(p0.extends(empty));

  Condition same = extend_with_point(p0, rr(0));
  CHECK(same.size() == 1);

  // adding a point creates no relations
  Condition p = extend_with_point(p0, rr(1));
  p = extend_with_point(p, rr(1, 2));
  CHECK(p.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK_FALSE(p.rel(i, j));
  CHECK(p.extends(p0));
  p.validate();
}

TEST_CASE("extend_meet_triple: case G nonempty picks a fresh J-point between") {
  // first force 0 lt 1 via a triple over {0} with realizer, then use <{0},{1},0>
  Condition p;
  p = extend_with_point(p, rr(0));
  p = extend_with_point(p, rr(1));

  RatTriple t01;
  t01.L.push_back(rr(0));
  t01.G.push_back(rr(1));
  // 0 and 1 are incomparable here, so the triple leaves C and no point is added
  Condition q = extend_meet_triple(p, t01, 1, J0(), 8);
  CHECK(q.size() == 2);
  CHECK_FALSE(q.rel(rr(0), rr(1)));

  // a pure below-triple always extends: q in (m_t, m_t + 1/m) n J
  RatTriple below;
  below.L.push_back(rr(0));
  Condition r = extend_meet_triple(p, below, 2, J0(), 8);
  REQUIRE(r.size() == 3);
  const Rat fresh = r.points().back();
  CHECK(qset::member(fresh, J0(), 8));
  CHECK(rr(0) < fresh);
  CHECK(fresh < rr(1, 2));  // inside (0, 0 + 1/2)
  CHECK(r.rel(rr(0), fresh));
  CHECK_FALSE(r.rel(rr(1), fresh));
  CHECK_FALSE(r.rel(fresh, rr(1)));
  CHECK(r.extends(p));

  // now <{0},{fresh},0> is in C and a realizer lands strictly between
  RatTriple mid;
  mid.L.push_back(rr(0));
  mid.G.push_back(fresh);
  Condition s = extend_meet_triple(r, mid, 1, J0(), 8);
  REQUIRE(s.size() == 4);
  const Rat z = s.points().back();
  CHECK(qset::member(z, J0(), 8));
  CHECK(rr(0) < z);
  CHECK(z < fresh);
  CHECK(s.rel(rr(0), z));
  CHECK(s.rel(z, fresh));
  s.validate();
}

TEST_CASE("extend_meet_triple: incomparability via U and closure through L") {
  Condition p;
  p = extend_with_point(p, rr(0));
  RatTriple below;
  below.L.push_back(rr(0));
  Condition r = extend_meet_triple(p, below, 1, J0(), 8);
  const Rat a = r.points().back();  // 0 lt a

  // chain closure: a realizer above a must also sit above 0
  RatTriple above_a;
  above_a.L.push_back(a);
  Condition s = extend_meet_triple(r, above_a, 1, J0(), 8);
  const Rat b = s.points().back();
  CHECK(s.rel(a, b));
  CHECK(s.rel(rr(0), b));  // EQ-closure through L

  // an incomparable point stays incomparable
  RatTriple incmp;
  incmp.U.push_back(rr(0));
  Condition u = extend_meet_triple(s, incmp, 1, J0(), 8);
  const Rat c = u.points().back();
  CHECK_FALSE(u.rel(rr(0), c));
  CHECK_FALSE(u.rel(c, rr(0)));

  CHECK_THROWS_AS(extend_meet_triple(p, [] {
    RatTriple bad;
    bad.L.push_back(Rat(0));
    bad.U.push_back(Rat(0));
    return bad;
  }(), 1, J0(), 8), std::invalid_argument);
}

TEST_CASE("generic_query basics and order-extension invariant") {
  GenericOrder g;
  CHECK(g.query(rr(1, 2), rr(1, 2)) == Rel::Equal);

  // decided pairs are <_Q-increasing: Below implies q1 <_Q q2
  std::vector<Rat> pts = first_rationals(12);
  for (const auto& a : pts)
    for (const auto& b : pts) {
      Rel rel = g.query(a, b);
      if (rel == Rel::Below) CHECK(a < b);
      if (rel == Rel::Above) CHECK(b < a);
    }

  // decided relations restricted to the sample form a valid strict order
  Condition snap = g.current();
  CHECK_NOTHROW(snap.to_poset().lt_pairs());
}

TEST_CASE("query answers are stable under schedule advancement") {
  GenericOrder g;
  std::vector<Rat> pts = first_rationals(8);
  std::vector<Rel> before;
  for (const auto& a : pts)
    for (const auto& b : pts) before.push_back(g.query(a, b));
  g.advance(500);
  std::size_t i = 0;
  for (const auto& a : pts)
    for (const auto& b : pts) CHECK(g.query(a, b) == before[i++]);
}

TEST_CASE("determinism under interleaving") {
  std::vector<Rat> pts = first_rationals(10);
  GenericOrder g1, g2;
  // g1: row-major queries; g2: column-major plus extra schedule work
  std::vector<Rel> r1, r2;
  for (const auto& a : pts)
    for (const auto& b : pts) r1.push_back(g1.query(a, b));
  g2.advance(200);
  for (std::size_t j = 0; j < pts.size(); ++j)
    for (std::size_t i = 0; i < pts.size(); ++i) (void)g2.query(pts[i], pts[j]);
  for (const auto& a : pts)
    for (const auto& b : pts) r2.push_back(g2.query(a, b));
  CHECK(r1 == r2);
}

TEST_CASE("saturate realizes every small triple over the core") {
  GenericOrder g;
  std::vector<Rat> core = first_rationals(8);
  SaturateReport rep = g.saturate(core, 2, 5000);
  CHECK_FALSE(rep.budget_exhausted);
  CHECK(rep.unrealized.empty());
  CHECK(rep.steps <= 5000);
  CHECK(rep.realized > 0);

  // the snapshot passes the order-core randomness oracle on the core
  std::vector<std::string> labels;
  for (const auto& q : core) labels.push_back(rat_to_string(q));
  auto rnd = core::is_random_up_to(rep.snapshot, 2, labels);
  CHECK(rnd.random);

  // every decided pair is <_Q-increasing
  Condition snap = g.current();
  for (std::size_t i = 0; i < snap.size(); ++i)
    for (std::size_t j = 0; j < snap.size(); ++j)
      if (snap.rel(i, j)) CHECK(snap.points()[i] < snap.points()[j]);
}

TEST_CASE("saturate on empty core is a trivial success") {
  GenericOrder g;
  SaturateReport rep = g.saturate({}, 2, 100);
  CHECK_FALSE(rep.budget_exhausted);
  CHECK(rep.realized == 0);
  CHECK(rep.unrealized.empty());
}

TEST_CASE("pure below-triples get a realizer in the bounded window") {
  GenericOrder g;
  g.ensure_point(rr(5));
  RatTriple t;
  t.L.push_back(rr(5));
  g.ensure_triple(t, 3);
  Condition snap = g.current();
  bool found = false;
  for (const auto& q : snap.points())
    if (rr(5) < q && q < rr(5) + rr(1, 3) && snap.rel(rr(5), q)) found = true;
  CHECK(found);
}

TEST_CASE("schedule completeness: early tasks cover prescribed witnesses") {
  GenericOrder g;
  g.advance(64);
  Condition snap = g.current();
  // the first few height-enumerated rationals entered via point tasks
  for (const auto& q : first_rationals(8)) CHECK(snap.has(q));
  // and the smallest below-triple task <{q0},0,0>,m=1 produced a realizer above 0
  bool realized = false;
  for (const auto& q : snap.points())
    if (snap.rel(rr(0), q)) realized = true;
  CHECK(realized);
}

TEST_CASE("filter chain: conditions extend monotonically") {
  GenericOrder g;
  Condition c0 = g.current();
  g.ensure_point(rr(0));
  Condition c1 = g.current();
  RatTriple t;
  t.L.push_back(rr(0));
  g.ensure_triple(t, 1);
  Condition c2 = g.current();
  g.advance(50);
  Condition c3 = g.current();
  CHECK(c1.extends(c0));
  CHECK(c2.extends(c1));
  CHECK(c3.extends(c2));
  c3.validate();
}

TEST_CASE("check_no_max_copy") {
  using qset::q_interval;
  auto e1 = qset::q_union(q_interval(Cut::neg_inf(), Cut(rr(0))), qset::q_point(rr(0)));
  CopyResult v1 = check_no_max_copy(e1);
  REQUIRE(v1.verdict == Verdict::NotCopy);
  REQUIRE(v1.witness.has_value());
  CHECK(v1.witness->to_string() == "<0||>");

  CHECK(check_no_max_copy(q_interval(Cut::neg_inf(), Cut(rr(0)))).verdict ==
        Verdict::Inconclusive);
  CHECK(check_no_max_copy(qset::q_finite({rr(1), rr(2)})).verdict == Verdict::NotCopy);
}

TEST_CASE("is_copy_of_D: sandwich sets are copies, maxima are not") {
  GenericOrder g;
  auto J = g.J();
  auto half = qset::q_intersect(J, qset::q_interval(Cut::neg_inf(), Cut(rr(0))));
  CHECK(g.is_copy_of_D(half, 2, 200).verdict == Verdict::Copy);

  // A_x-style element: J-trace plus finitely many extra points below x
  auto ax = qset::q_union(half, qset::q_finite({rr(-1, 3)}));
  CHECK(g.is_copy_of_D(ax, 2, 200).verdict == Verdict::Copy);

  auto withmax = qset::q_union(half, qset::q_point(rr(0)));
  auto v = g.is_copy_of_D(withmax, 2, 200);
  CHECK(v.verdict == Verdict::NotCopy);

  CHECK(g.is_copy_of_D(qset::q_empty(), 2, 200).verdict == Verdict::NotCopy);

  // whole Q: sandwich with x = inf
  CHECK(g.is_copy_of_D(qset::q_full(), 2, 200).verdict == Verdict::Copy);

  // a set missing its J-trace stays undecided by the fragment
  auto sparse = qset::q_intersect(qset::q_class(1), qset::q_interval(Cut::neg_inf(), Cut(rr(0))));
  CHECK(g.is_copy_of_D(sparse, 1, 30).verdict == Verdict::Inconclusive);
}

TEST_CASE("deleting finitely many points keeps the core saturable") {
  // Lemma 4.3(b) shadow: remove a few realizers, re-saturate, realize again.
  GenericOrder g;
  std::vector<Rat> core = first_rationals(4);
  SaturateReport rep1 = g.saturate(core, 2, 2000);
  CHECK(rep1.unrealized.empty());

  // drop three non-core points from the snapshot
  std::set<Rat> forbidden;
  for (const auto& q : rep1.introduced) {
    bool is_core = std::find(core.begin(), core.end(), q) != core.end();
    if (!is_core && forbidden.size() < 3) forbidden.insert(q);
  }
  REQUIRE(forbidden.size() == 3);

  SaturateReport rep2 = g.saturate(core, 2, 2000);
  CHECK(rep2.unrealized.empty());
  // verify on the surviving points only: realizers outside the deleted set
  std::vector<Rat> kept;
  for (const auto& q : rep2.introduced)
    if (!forbidden.count(q)) kept.push_back(q);
  core::FinPoset sub = g.current().to_poset(kept);
  std::vector<std::string> labels;
  for (const auto& q : core) labels.push_back(rat_to_string(q));
  auto rnd = core::is_random_up_to(sub, 2, labels);
  CHECK(rnd.random);
}

TEST_CASE("replay reconstructs the exact state") {
  GenericOrder g;
  g.saturate(first_rationals(5), 2, 2000);
  g.advance(40);
  (void)g.query(rr(3, 2), rr(-2));
  std::string log = g.replay_log();

  GenericOrder h = GenericOrder::from_replay(log);
  CHECK(h.snapshot() == g.snapshot());
  CHECK(h.replay_log() == g.replay_log());
}

TEST_CASE("snapshot json shape") {
  GenericOrder g;
  g.ensure_point(rr(0));
  auto j = g.snapshot();
  CHECK(j.contains("step"));
  CHECK(j.contains("introduced_points"));
  CHECK(j["condition"].contains("elements"));
  CHECK(j["condition"].contains("lt"));
  CHECK(j["condition"].contains("introduction_order"));
}
