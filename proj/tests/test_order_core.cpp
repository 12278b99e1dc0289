#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "uhpo/order_core.hpp"

using namespace uhpo::core;

namespace {

FinPoset chain(int n) {
  std::vector<std::string> elems;
  std::vector<std::pair<std::string, std::string>> lt;
  for (int i = 0; i < n; ++i) elems.push_back(std::string(1, char('a' + i)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) lt.emplace_back(elems[i], elems[j]);
  return FinPoset(elems, lt);
}

FinPoset antichain(int n) {
  std::vector<std::string> elems;
  for (int i = 0; i < n; ++i) elems.push_back(std::string(1, char('a' + i)));
  return FinPoset(elems, {});
}

// Independent oracle: count injections of x into y preserving/reflecting the
// order by direct enumeration over all index tuples.
long long count_embeddings_bruteforce(const FinPoset& x, const FinPoset& y) {
  std::vector<std::size_t> img(x.size());
  std::vector<bool> used(y.size(), false);
  long long count = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == x.size()) {
      ++count;
      return;
    }
    for (std::size_t c = 0; c < y.size(); ++c) {
      if (used[c]) continue;
      bool ok = true;
      for (std::size_t u = 0; u < i && ok; ++u)
        ok = x.less(u, i) == y.less(img[u], c) && x.less(i, u) == y.less(c, img[u]);
      if (!ok) continue;
      img[i] = c;
      used[c] = true;
      rec(i + 1);
      used[c] = false;
    }
  };
  rec(0);
  return count;
}

}  // namespace

TEST_CASE("FinPoset constructor validates order axioms") {
  CHECK_THROWS_AS(FinPoset({"a"}, {{"a", "a"}}), std::invalid_argument);
  CHECK_THROWS_AS(FinPoset({"a", "b"}, {{"a", "b"}, {"b", "a"}}), std::invalid_argument);
  CHECK_THROWS_AS(FinPoset({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}), std::invalid_argument);
  CHECK_THROWS_AS(FinPoset({"a", "a"}, {}), std::invalid_argument);
  CHECK_THROWS_AS(FinPoset({"a"}, {{"a", "z"}}), std::invalid_argument);
  CHECK_NOTHROW(FinPoset({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"a", "c"}}));
}

TEST_CASE("restrict induces the relation") {
  FinPoset c3 = chain(3);
  FinPoset r = restrict_to(c3, {"a", "c"});
  CHECK(r.size() == 2);
  CHECK(r.less("a", "c"));
  CHECK(is_isomorphic(restrict_to(c3, c3.elements()), c3));
  FinPoset single = restrict_to(antichain(2), {"a"});
  CHECK(single.size() == 1);
  CHECK(single.lt_pairs().empty());
  CHECK_THROWS_AS(restrict_to(c3, {"z"}), std::invalid_argument);
}

TEST_CASE("embeddings against brute-force oracle") {
  // Expected values frozen from count_embeddings_bruteforce.
  CHECK(count_embeddings_bruteforce(antichain(2), antichain(2)) == 2);
  CHECK(embeddings(antichain(2), antichain(2)).size() == 2);

  CHECK(count_embeddings_bruteforce(chain(2), antichain(2)) == 0);
  CHECK(embeddings(chain(2), antichain(2)).size() == 0);

  FinPoset v({"a", "b", "c"}, {{"a", "c"}, {"b", "c"}});
  CHECK(embeddings(chain(1), v).size() == v.size());

  std::vector<FinPoset> zoo{v, chain(3), antichain(3)};
  for (const FinPoset& x : zoo)
    for (const FinPoset& y : zoo)
      CHECK((long long)embeddings(x, y).size() == count_embeddings_bruteforce(x, y));
}

TEST_CASE("embedding count invariant under relabeling") {
  FinPoset v({"a", "b", "c"}, {{"a", "c"}, {"b", "c"}});
  FinPoset v2({"x", "y", "z"}, {{"z", "x"}, {"y", "x"}});  // same shape, shuffled
  FinPoset c3 = chain(3);
  CHECK(embeddings(v, c3).size() == embeddings(v2, c3).size());
  CHECK(embeddings(c3, v).size() == embeddings(c3, v2).size());
}

TEST_CASE("is_isomorphic basics") {
  CHECK(is_isomorphic(chain(2), chain(2)));
  CHECK_FALSE(is_isomorphic(chain(2), antichain(2)));
  FinPoset v({"a", "b", "c"}, {{"a", "c"}, {"b", "c"}});
  FinPoset lam({"a", "b", "c"}, {{"c", "a"}, {"c", "b"}});
  CHECK_FALSE(is_isomorphic(v, lam));
  CHECK(is_isomorphic(v, FinPoset({"x", "y", "z"}, {{"y", "x"}, {"z", "x"}})));
}

TEST_CASE("one_point_extensions") {
  FinPoset a3 = antichain(3);
  PartialIso phi{{{"a", "b"}}};
  auto ext = one_point_extensions(a3, phi, "c");
  CHECK(ext == std::vector<std::string>{"a", "c"});

  FinPoset c2 = chain(2);
  PartialIso top{{{"a", "b"}}};
  CHECK(one_point_extensions(c2, top, "b").empty());

  // empty map: every element realizes the empty type
  CHECK(one_point_extensions(a3, PartialIso{}, "a") == a3.elements());

  CHECK_THROWS_AS(one_point_extensions(c2, top, "a"), std::invalid_argument);
}

TEST_CASE("ultrahomogeneity: both routes on known posets") {
  CHECK(is_ultrahomogeneous(antichain(4)).ultrahomogeneous);
  CHECK(extension_property(antichain(4)).ultrahomogeneous);

  auto r = is_ultrahomogeneous(chain(2));
  REQUIRE_FALSE(r.ultrahomogeneous);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->pairs == std::vector<std::pair<std::string, std::string>>{{"a", "b"}});

  // Two disjoint 2-chains: {a -> b} maps a minimal point to a maximal one and
  // has no automorphism extension, so the poset is not ultrahomogeneous.
  FinPoset two2({"a", "b", "c", "d"}, {{"a", "b"}, {"c", "d"}});
  auto direct = is_ultrahomogeneous(two2);
  auto ext = extension_property(two2);
  CHECK_FALSE(direct.ultrahomogeneous);
  CHECK_FALSE(ext.ultrahomogeneous);
  CHECK(direct.ultrahomogeneous == ext.ultrahomogeneous);
}

TEST_CASE("age enumerates iso classes of substructures") {
  auto a = age(chain(2), 2);
  REQUIRE(a.size() == 2);
  CHECK(a[0].size() == 1);
  CHECK(is_isomorphic(a[1], chain(2)));

  auto b = age(antichain(2), 2);
  REQUIRE(b.size() == 2);
  CHECK(is_isomorphic(b[1], antichain(2)));

  auto c = age(chain(3), 1);
  REQUIRE(c.size() == 1);
  CHECK(c[0].size() == 1);
}

TEST_CASE("enumerate_triples and realizers") {
  FinPoset c2 = chain(2);
  auto ts = enumerate_triples(c2, 2);
  auto has = [&](const Triple& t) {
    return std::any_of(ts.begin(), ts.end(), [&](const Triple& u) {
      return u.L == t.L && u.G == t.G && u.U == t.U;
    });
  };
  CHECK(has(Triple{{"a"}, {"b"}, {}}));
  CHECK_FALSE(has(Triple{{"b"}, {"a"}, {}}));
  CHECK(ts.front().empty());  // <0,0,0> listed first

  FinPoset a2 = antichain(2);
  auto ts2 = enumerate_triples(a2, 2);
  CHECK(std::any_of(ts2.begin(), ts2.end(), [](const Triple& t) {
    return t.L == std::vector<std::string>{"a"} && t.G.empty() &&
           t.U == std::vector<std::string>{"b"};
  }));

  FinPoset c3 = chain(3);
  CHECK(realizers(c3, Triple{}) == c3.elements());
  CHECK(realizers(c3, Triple{{"a"}, {"c"}, {}}) == std::vector<std::string>{"b"});
  CHECK(realizers(c2, Triple{{"a"}, {"b"}, {}}).empty());
  CHECK_THROWS_AS(realizers(c2, Triple{{"b"}, {"a"}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(realizers(c2, Triple{{"a"}, {}, {"a"}}), std::invalid_argument);
}

TEST_CASE("Fact 4.1 restriction laws on randomized instances") {
  std::mt19937 rng(20240817);
  auto classes5 = all_poset_classes(5, false);
  for (int trial = 0; trial < 200; ++trial) {
    const FinPoset& p = classes5[rng() % classes5.size()];
    // random nonempty subset A
    std::vector<std::string> a;
    for (const auto& e : p.elements())
      if (rng() % 2) a.push_back(e);
    if (a.empty()) a.push_back(p.elements()[rng() % p.size()]);
    FinPoset pa = restrict_to(p, a);

    auto in_a = [&](const std::vector<std::string>& v) {
      return std::all_of(v.begin(), v.end(), [&](const std::string& s) {
        return std::find(a.begin(), a.end(), s) != a.end();
      });
    };

    // C(A) = triples of P with parts inside A
    auto tri_a = enumerate_triples(pa, 3);
    auto tri_p = enumerate_triples(p, 3);
    std::set<std::string> keys_a, keys_p_in_a;
    for (const auto& t : tri_a) keys_a.insert(t.to_string());
    for (const auto& t : tri_p)
      if (in_a(t.L) && in_a(t.G) && in_a(t.U)) keys_p_in_a.insert(t.to_string());
    CHECK(keys_a == keys_p_in_a);

    // A-realizers = P-realizers intersected with A
    for (const auto& t : tri_a) {
      auto ra = realizers(pa, t);
      auto rp = realizers(p, t);
      std::vector<std::string> rp_in_a;
      for (const auto& x : rp)
        if (std::find(a.begin(), a.end(), x) != a.end()) rp_in_a.push_back(x);
      std::sort(ra.begin(), ra.end());
      std::sort(rp_in_a.begin(), rp_in_a.end());
      CHECK(ra == rp_in_a);
    }
  }
}

TEST_CASE("is_random_up_to fails on finite posets") {
  auto r1 = is_random_up_to(antichain(1), 1);
  REQUIRE_FALSE(r1.random);
  REQUIRE(r1.failing.has_value());
  CHECK(r1.failing->to_string() == "<{a},{},{}>");

  auto r2 = is_random_up_to(chain(4), 4);
  CHECK_FALSE(r2.random);
}

TEST_CASE("poset class counts match the known sequence") {
  // 1, 2, 5, 16, 63 iso classes on 1..5 points; brute-force enumeration.
  CHECK(all_poset_classes(1, false).size() == 1);
  CHECK(all_poset_classes(2, false).size() == 2);
  CHECK(all_poset_classes(3, false).size() == 5);
  CHECK(all_poset_classes(4, false).size() == 16);
  CHECK(all_poset_classes(5, false).size() == 63);
}

TEST_CASE("parallel enumeration kernel matches serial reference") {
  for (int n = 1; n <= 5; ++n) {
    auto serial = all_poset_classes(n, false);
    auto par = all_poset_classes(n, true);
    REQUIRE(serial.size() == par.size());
    for (std::size_t i = 0; i < serial.size(); ++i)
      CHECK(serial[i].canonical_key() == par[i].canonical_key());
  }
}

TEST_CASE("canonical key round trip and relabel invariance") {
  FinPoset v({"a", "b", "c"}, {{"a", "c"}, {"b", "c"}});
  FinPoset w({"p", "q", "r"}, {{"r", "q"}, {"p", "q"}});
  CHECK(v.canonical_key() == w.canonical_key());
  CHECK(is_isomorphic(FinPoset::from_canonical_key(v.canonical_key()), v));
}

TEST_CASE("json round trip keeps schema") {
  FinPoset v({"a", "b"}, {{"a", "b"}});
  auto j = v.to_json();
  CHECK(j["elements"] == nlohmann::json({"a", "b"}));
  CHECK(j["lt"] == nlohmann::json::array({nlohmann::json::array({"a", "b"})}));
  FinPoset back = FinPoset::from_json(j);
  CHECK(back.less("a", "b"));
  CHECK(back.elements() == v.elements());
}

TEST_CASE("dot export is the transitive reduction") {
  FinPoset c3 = chain(3);
  std::string dot = c3.to_dot();
  CHECK(dot.find("\"a\" -> \"b\"") != std::string::npos);
  CHECK(dot.find("\"b\" -> \"c\"") != std::string::npos);
  CHECK(dot.find("\"a\" -> \"c\"") == std::string::npos);
}
