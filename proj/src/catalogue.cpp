#include "uhpo/catalogue.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace uhpo::cat {

using qset::Canon;
using qset::QSetPtr;

std::string struct_name(StructId id, int n) {
  switch (id) {
    case StructId::A_omega: return "A_omega";
    case StructId::B_n: return "B_" + std::to_string(n);
    case StructId::B_omega: return "B_omega";
    case StructId::C_n: return "C_" + std::to_string(n);
    case StructId::C_omega: return "C_omega";
    case StructId::D: return "D";
    case StructId::Q_line: return "Q";
  }
  return "?";
}

std::pair<StructId, int> parse_struct(const std::string& name) {
  if (name == "A_omega") return {StructId::A_omega, 0};
  if (name == "B_omega") return {StructId::B_omega, 0};
  if (name == "C_omega") return {StructId::C_omega, 0};
  if (name == "D") return {StructId::D, 0};
  if (name == "Q" || name == "B_1") return {StructId::Q_line, 0};
  if (name.size() > 2 && (name[0] == 'B' || name[0] == 'C') && name[1] == '_') {
    int n = std::stoi(name.substr(2));
    if (n < 1) throw std::invalid_argument("structure parameter must be >= 1");
    return {name[0] == 'B' ? StructId::B_n : StructId::C_n, n};
  }
  throw std::invalid_argument("unknown structure: " + name);
}

std::string Elem::to_string(StructId id) const {
  switch (id) {
    case StructId::A_omega: return std::to_string(i);
    case StructId::B_n: return std::to_string(i) + ":" + rat_to_string(q);
    case StructId::C_n:
    case StructId::C_omega: return rat_to_string(q) + ":" + std::to_string(i);
    default: return rat_to_string(q);
  }
}

core::Rel order_pred(const AmbientStructure& s, const Elem& a, const Elem& b) {
  using core::Rel;
  switch (s.id) {
    case StructId::A_omega:
      return a.i == b.i ? Rel::Equal : Rel::Incomparable;
    case StructId::B_n: {
      if (a.i < 0 || a.i >= s.n || b.i < 0 || b.i >= s.n)
        throw std::invalid_argument("line index out of range for " + struct_name(s.id, s.n));
      if (a.i == b.i && a.q == b.q) return Rel::Equal;
      if (a.i != b.i) return Rel::Incomparable;
      return a.q < b.q ? Rel::Below : Rel::Above;
    }
    case StructId::B_omega: {
      if (a.q == b.q) return Rel::Equal;
      if (b_omega_block(a.q) != b_omega_block(b.q)) return Rel::Incomparable;
      return a.q < b.q ? Rel::Below : Rel::Above;
    }
    case StructId::C_n:
      if (a.i < 0 || a.i >= s.n || b.i < 0 || b.i >= s.n)
        throw std::invalid_argument("fiber index out of range for " + struct_name(s.id, s.n));
      [[fallthrough]];
    case StructId::C_omega: {
      if (a.q == b.q && a.i == b.i) return Rel::Equal;
      if (a.q == b.q) return Rel::Incomparable;
      return a.q < b.q ? Rel::Below : Rel::Above;
    }
    case StructId::D: {
      if (!s.d) throw std::invalid_argument("structure D needs a generic order handle");
      return s.d->query(a.q, b.q);
    }
    case StructId::Q_line: {
      if (a.q == b.q) return Rel::Equal;
      return a.q < b.q ? Rel::Below : Rel::Above;
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<Elem> sample_elements(const AmbientStructure& s, int count) {
  std::vector<Elem> out;
  RationalEnumerator rho;
  for (int j = 0; j < count; ++j) {
    Elem e;
    switch (s.id) {
      case StructId::A_omega: e.i = j; break;
      case StructId::B_n:
        e.i = j % s.n;
        e.q = rho.at(j / s.n);
        break;
      case StructId::C_n:
        e.q = rho.at(j / s.n);
        e.i = j % s.n;
        break;
      case StructId::C_omega:
        e.q = rho.at(j / 3);  // three fiber points per class in samples
        e.i = j % 3;
        break;
      default: e.q = rho.at(j); break;
    }
    out.push_back(std::move(e));
  }
  return out;
}

core::FinPoset sample_poset(const AmbientStructure& s, int count) {
  auto elems = sample_elements(s, count);
  std::vector<std::string> labels;
  for (const auto& e : elems) labels.push_back(e.to_string(s.id));
  std::vector<std::pair<std::string, std::string>> lt;
  for (std::size_t a = 0; a < elems.size(); ++a)
    for (std::size_t b = 0; b < elems.size(); ++b)
      if (order_pred(s, elems[a], elems[b]) == core::Rel::Below)
        lt.emplace_back(labels[a], labels[b]);
  return core::FinPoset(labels, lt);
}

Cut b_omega_cut(int i) {
  if (i < 0) throw std::invalid_argument("negative block cut index");
  if (i == 0) return Cut::pos_inf();
  return Cut(Quad(Rat(-i), Rat(1)));  // sqrt(2) - i
}

int b_omega_block(const Rat& q) {
  // q lies in (x_{i+1}, x_i); block 0 is everything above sqrt(2) - 1
  if (cmp_cut_rat(b_omega_cut(1), q) < 0) return 0;
  double est = 1.414213562373095 - q.convert_to<double>();
  int i = est < 1 ? 1 : (int)est;
  while (cmp_cut_rat(b_omega_cut(i), q) < 0) --i;      // want q < x_i
  while (cmp_cut_rat(b_omega_cut(i + 1), q) > 0) ++i;  // want x_{i+1} < q
  return i;
}

QSetPtr b_omega_block_expr(int i) {
  return qset::q_interval(b_omega_cut(i + 1), b_omega_cut(i));
}

FiberSpec FiberSpec::finite(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return {Kind::Finite, std::move(v)};
}

FiberSpec FiberSpec::cofinite(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return {Kind::Cofinite, std::move(v)};
}

bool FiberSpec::contains(std::uint64_t x) const {
  bool listed = std::binary_search(elems.begin(), elems.end(), x);
  switch (kind) {
    case Kind::Finite: return listed;
    case Kind::Cofinite: return !listed;
    case Kind::Full: return true;
  }
  return false;
}

bool FiberSpec::covers_n(int n) const {
  for (int i = 0; i < n; ++i)
    if (!contains(i)) return false;
  return true;
}

FiberSpec fiber_union(const FiberSpec& a, const FiberSpec& b) {
  using K = FiberSpec::Kind;
  if (a.kind == K::Full || b.kind == K::Full) return FiberSpec::full();
  if (a.kind == K::Finite && b.kind == K::Finite) {
    std::vector<std::uint64_t> v = a.elems;
    v.insert(v.end(), b.elems.begin(), b.elems.end());
    return FiberSpec::finite(std::move(v));
  }
  if (a.kind == K::Cofinite && b.kind == K::Cofinite) {
    std::vector<std::uint64_t> v;
    std::set_intersection(a.elems.begin(), a.elems.end(), b.elems.begin(), b.elems.end(),
                          std::back_inserter(v));
    return FiberSpec::cofinite(std::move(v));
  }
  const FiberSpec& cof = a.kind == K::Cofinite ? a : b;
  const FiberSpec& fin = a.kind == K::Finite ? a : b;
  std::vector<std::uint64_t> v;
  std::set_difference(cof.elems.begin(), cof.elems.end(), fin.elems.begin(), fin.elems.end(),
                      std::back_inserter(v));
  return FiberSpec::cofinite(std::move(v));
}

ProductSetExpr ProductSetExpr::rect(QSetPtr base, FiberSpec fiber) {
  ProductSetExpr x;
  x.comps.push_back({std::move(base), std::move(fiber)});
  return x;
}

ProductSetExpr product_union(const ProductSetExpr& a, const ProductSetExpr& b) {
  ProductSetExpr x = a;
  x.comps.insert(x.comps.end(), b.comps.begin(), b.comps.end());
  return x;
}

ProductSetExpr normalize(const ProductSetExpr& x, int k) {
  const std::size_t m = x.comps.size();
  if (m > 16) throw std::invalid_argument("too many product components");
  ProductSetExpr out;
  for (std::size_t mask = 1; mask < (std::size_t(1) << m); ++mask) {
    QSetPtr base;
    FiberSpec fiber = FiberSpec::finite({});
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1) {
        base = base ? qset::q_intersect(base, x.comps[i].base) : x.comps[i].base;
        fiber = fiber_union(fiber, x.comps[i].fiber);
      }
    }
    for (std::size_t i = 0; i < m; ++i)
      if (!(mask >> i & 1)) base = qset::q_diff(base, x.comps[i].base);
    if (fiber.empty_set()) continue;
    Canon c = qset::canonicalize(base, k);
    if (c.empty()) continue;
    out.comps.push_back({qset::canon_to_expr(c), fiber});
  }
  return out;
}

bool product_member(const Rat& q, std::uint64_t fiber, const ProductSetExpr& x, int k) {
  for (const auto& comp : x.comps)
    if (comp.fiber.contains(fiber) && qset::member(q, comp.base, k)) return true;
  return false;
}

namespace {

bool fiber_subset(const FiberSpec& a, const FiberSpec& b) {
  using K = FiberSpec::Kind;
  if (a.kind == K::Finite)
    return std::all_of(a.elems.begin(), a.elems.end(),
                       [&](std::uint64_t x) { return b.contains(x); });
  if (b.kind == K::Finite) return false;  // a is infinite
  if (b.kind == K::Full) return true;
  // b cofinite: its exclusions must be excluded by a as well
  if (a.kind == K::Full) return b.elems.empty();
  return std::all_of(b.elems.begin(), b.elems.end(), [&](std::uint64_t x) {
    return std::binary_search(a.elems.begin(), a.elems.end(), x);
  });
}

}  // namespace

bool product_subset(const ProductSetExpr& a, const ProductSetExpr& b, int k) {
  ProductSetExpr na = normalize(a, k), nb = normalize(b, k);
  const std::size_t m = nb.comps.size();
  if (m > 16) throw std::invalid_argument("too many product components");
  for (const auto& atom : na.comps) {
    // split the atom base by the pattern of b-components covering it
    for (std::size_t mask = 0; mask < (std::size_t(1) << m); ++mask) {
      QSetPtr region = atom.base;
      FiberSpec covered = FiberSpec::finite({});
      for (std::size_t i = 0; i < m; ++i) {
        if (mask >> i & 1) {
          region = qset::q_intersect(region, nb.comps[i].base);
          covered = fiber_union(covered, nb.comps[i].fiber);
        } else {
          region = qset::q_diff(region, nb.comps[i].base);
        }
      }
      if (qset::canonicalize(region, k).empty()) continue;
      if (!fiber_subset(atom.fiber, covered)) return false;
    }
  }
  return true;
}

bool product_equal(const ProductSetExpr& a, const ProductSetExpr& b, int k) {
  return product_subset(a, b, k) && product_subset(b, a, k);
}

bool product_empty(const ProductSetExpr& a, int k) { return normalize(a, k).comps.empty(); }

ProductSetExpr product_remove_point(const ProductSetExpr& x, const Rat& q, std::uint64_t i,
                                    int k) {
  ProductSetExpr out;
  for (const auto& comp : x.comps) {
    if (!comp.fiber.contains(i) || !qset::member(q, comp.base, k)) {
      out.comps.push_back(comp);
      continue;
    }
    // split the base at q: the rest of the class keeps the fiber, q loses i
    QSetPtr rest = qset::q_diff(comp.base, qset::q_point(q));
    out.comps.push_back({rest, comp.fiber});
    FiberSpec reduced = comp.fiber;
    switch (reduced.kind) {
      case FiberSpec::Kind::Full:
        reduced = FiberSpec::cofinite({i});
        break;
      case FiberSpec::Kind::Cofinite:
        reduced.elems.push_back(i);
        std::sort(reduced.elems.begin(), reduced.elems.end());
        break;
      case FiberSpec::Kind::Finite:
        std::erase(reduced.elems, i);
        break;
    }
    if (!reduced.empty_set()) out.comps.push_back({qset::q_point(q), reduced});
  }
  return out;
}

QSetPtr supp(const ProductSetExpr& x, int k) {
  QSetPtr acc = qset::q_empty();
  for (const auto& comp : x.comps) {
    if (comp.fiber.empty_set()) continue;
    acc = qset::q_union(acc, comp.base);
  }
  Canon c = qset::canonicalize(acc, k);
  return qset::canon_to_expr(c);
}

nlohmann::json product_to_json(const ProductSetExpr& x) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& comp : x.comps) {
    nlohmann::json fiber;
    switch (comp.fiber.kind) {
      case FiberSpec::Kind::Full: fiber["kind"] = "full"; break;
      case FiberSpec::Kind::Finite: fiber["kind"] = "finite"; break;
      case FiberSpec::Kind::Cofinite: fiber["kind"] = "cofinite"; break;
    }
    fiber["elems"] = comp.fiber.elems;
    comps.push_back({{"base", qset::to_json(comp.base)}, {"fiber", fiber}});
  }
  return {{"components", comps}};
}

ProductSetExpr product_from_json(const nlohmann::json& j) {
  ProductSetExpr x;
  for (const auto& cj : j.at("components")) {
    QSetPtr base = qset::from_json(cj.at("base"));
    const auto& fj = cj.at("fiber");
    auto kind = fj.at("kind").get<std::string>();
    auto elems = fj.at("elems").get<std::vector<std::uint64_t>>();
    FiberSpec f = kind == "full"   ? FiberSpec::full()
                : kind == "finite" ? FiberSpec::finite(std::move(elems))
                                   : FiberSpec::cofinite(std::move(elems));
    x.comps.push_back({base, f});
  }
  return x;
}

CopyVerdict q_line_copy(const QSetPtr& e, int k) {
  Canon c = qset::canonicalize(e, k);
  if (c.pieces.empty()) {
    return {gen::Verdict::NotCopy, c.add.empty() ? "empty set" : "finite set", std::nullopt};
  }
  if (auto mx = qset::max_of(e, k))
    return {gen::Verdict::NotCopy, "has maximum " + rat_to_string(*mx), mx};
  if (auto mn = qset::min_of(e, k))
    return {gen::Verdict::NotCopy, "has minimum " + rat_to_string(*mn), mn};
  for (std::size_t i = 0; i + 1 < c.add.size(); ++i) {
    QSetPtr gap = qset::q_intersect(e, qset::q_interval(Cut(c.add[i]), Cut(c.add[i + 1])));
    if (qset::canonicalize(gap, k).empty())
      return {gen::Verdict::NotCopy,
              "jump between " + rat_to_string(c.add[i]) + " and " + rat_to_string(c.add[i + 1]),
              c.add[i]};
  }
  return {gen::Verdict::Copy, "dense in itself, no endpoints", std::nullopt};
}

CopyVerdict is_copy_a_omega(const FiberSpec& x) {
  if (x.infinite()) return {gen::Verdict::Copy, "infinite subset of the antichain", std::nullopt};
  return {gen::Verdict::NotCopy, "finite set", std::nullopt};
}

CopyVerdict is_copy_bn(int n, const ProductSetExpr& x, int k) {
  for (const auto& comp : x.comps)
    if (comp.fiber.kind == FiberSpec::Kind::Finite)
      for (auto e : comp.fiber.elems)
        if (e >= (std::uint64_t)n)
          throw std::invalid_argument("line index outside the B_n universe");
  for (int line = 0; line < n; ++line) {
    QSetPtr trace = qset::q_empty();
    for (const auto& comp : x.comps)
      if (comp.fiber.contains(line)) trace = qset::q_union(trace, comp.base);
    CopyVerdict v = q_line_copy(trace, k);
    if (v.v != gen::Verdict::Copy)
      return {gen::Verdict::NotCopy, "line " + std::to_string(line) + ": " + v.detail,
              v.witness_q};
  }
  return {gen::Verdict::Copy, "every line carries a Q-copy", std::nullopt};
}

CopyVerdict is_copy_cn(int n, const ProductSetExpr& x, int k) {
  ProductSetExpr norm = normalize(x, k);
  if (norm.comps.empty()) return {gen::Verdict::NotCopy, "empty set", std::nullopt};
  for (const auto& comp : norm.comps) {
    for (auto e : comp.fiber.elems)
      if (e >= (std::uint64_t)n)
        throw std::invalid_argument("fiber index outside the C_n universe");
    if (!comp.fiber.covers_n(n)) {
      auto w = qset::witness_in(comp.base, Cut::neg_inf(), Cut::pos_inf(), k);
      return {gen::Verdict::NotCopy,
              "incomparability class of " + (w ? rat_to_string(*w) : std::string("?")) +
                  " has fewer than " + std::to_string(n) + " elements",
              w};
    }
  }
  CopyVerdict line = q_line_copy(supp(norm, k), k);
  if (line.v != gen::Verdict::Copy)
    return {gen::Verdict::NotCopy, "support: " + line.detail, line.witness_q};
  return {gen::Verdict::Copy, "A x n with A a Q-copy", std::nullopt};
}

CopyVerdict is_copy_comega(const ProductSetExpr& x, int k) {
  ProductSetExpr norm = normalize(x, k);
  if (norm.comps.empty()) return {gen::Verdict::NotCopy, "empty set", std::nullopt};
  QSetPtr sp = supp(norm, k);
  if (auto mx = qset::max_of(sp, k))
    return {gen::Verdict::NotCopy, "max supp = " + rat_to_string(*mx), mx};
  for (const auto& comp : norm.comps) {
    if (!comp.fiber.infinite()) {
      auto w = qset::witness_in(comp.base, Cut::neg_inf(), Cut::pos_inf(), k);
      return {gen::Verdict::NotCopy,
              "finite incomparability class at " + (w ? rat_to_string(*w) : std::string("?")),
              w};
    }
  }
  CopyVerdict line = q_line_copy(sp, k);
  if (line.v != gen::Verdict::Copy)
    return {gen::Verdict::NotCopy, "supp: " + line.detail, line.witness_q};
  return {gen::Verdict::Copy, "supp is a Q-copy and every class is infinite", std::nullopt};
}

CopyVerdict is_copy_bomega(const QSetPtr& e, int k) {
  Canon c = qset::canonicalize(e, k);
  if (c.pieces.empty())
    return {gen::Verdict::NotCopy, "finite (or empty) set", std::nullopt};
  if (!c.pieces.front().lo.is_neg_inf()) {
    // bounded below: only finitely many blocks can meet the set
    return {gen::Verdict::NotCopy, "only finitely many blocks meet the set", std::nullopt};
  }
  // Walk blocks from the top until one lies entirely inside the leftmost
  // piece; from there on every trace is a full class trace adjusted by
  // finitely many points, hence a Q-copy, and there are infinitely many.
  const Cut& tail_hi = c.pieces.front().hi;
  for (int i = 0;; ++i) {
    if (i > 1'000'000) throw std::logic_error("block scan runaway");
    if (!(tail_hi < b_omega_cut(i))) break;  // block i inside the tail piece
    QSetPtr trace = qset::q_intersect(e, b_omega_block_expr(i));
    if (qset::canonicalize(trace, k).empty()) continue;
    CopyVerdict v = q_line_copy(trace, k);
    if (v.v != gen::Verdict::Copy)
      return {gen::Verdict::NotCopy, "block " + std::to_string(i) + ": " + v.detail,
              v.witness_q};
  }
  return {gen::Verdict::Copy, "infinitely many blocks carry Q-copy traces", std::nullopt};
}

CopyVerdict is_copy_d(gen::GenericOrder& g, const QSetPtr& e, int size_bound, long long budget) {
  gen::CopyResult r = g.is_copy_of_D(e, size_bound, budget);
  return {r.verdict, r.detail, std::nullopt};
}

AxiomReport positive_family_qset(const std::function<bool(const QSetPtr&)>& member,
                                 const QSetPtr& universe, const std::vector<QSetPtr>& samples,
                                 int k) {
  AxiomReport rep;
  if (member(qset::q_empty())) {
    rep.p1.pass = false;
    rep.p1.witness = "empty set accepted";
  }
  std::vector<QSetPtr> members;
  for (const auto& s : samples)
    if (member(s)) members.push_back(s);
  for (const auto& b : members) {
    for (const auto& s : samples) {
      QSetPtr up = qset::q_union(b, s);
      if (!member(up)) {
        rep.p2.pass = false;
        rep.p2.witness = qset::to_sexpr(up);
        break;
      }
    }
    if (!rep.p2.pass) break;
  }
  for (const auto& b : members) {
    // delete up to three witness points
    std::vector<Rat> f;
    QSetPtr rest = b;
    for (int i = 0; i < 3; ++i) {
      auto w = qset::witness_in(rest, Cut::neg_inf(), Cut::pos_inf(), k);
      if (!w) break;
      f.push_back(*w);
      rest = qset::q_diff(rest, qset::q_point(*w));
    }
    QSetPtr deleted = qset::q_diff(b, qset::q_finite(f));
    if (!member(deleted)) {
      rep.p3.pass = false;
      rep.p3.witness = qset::to_sexpr(deleted);
      break;
    }
  }
  rep.p4.pass = false;
  rep.p4.witness = "no co-infinite member among samples";
  for (const auto& b : members) {
    if (!qset::is_finite_expr(qset::q_diff(universe, b), k).finite) {
      rep.p4.pass = true;
      rep.p4.witness = qset::to_sexpr(b);
      break;
    }
  }
  return rep;
}

AxiomReport positive_family_cn(int n, const std::vector<ProductSetExpr>& samples, int k) {
  AxiomReport rep;
  auto member = [&](const ProductSetExpr& x) { return is_copy_cn(n, x, k).v == gen::Verdict::Copy; };
  if (member(ProductSetExpr::empty())) {
    rep.p1.pass = false;
    rep.p1.witness = "empty set accepted";
  }
  std::vector<ProductSetExpr> members;
  for (const auto& s : samples)
    if (member(s)) members.push_back(s);
  for (const auto& b : members) {
    for (const auto& s : members) {
      ProductSetExpr up = product_union(b, s);
      if (!member(up)) {
        rep.p2.pass = false;
        rep.p2.witness = "union of two copies rejected";
        break;
      }
    }
    if (!rep.p2.pass) break;
  }
  // (P3): deleting one point of one fiber breaks copy-hood (Remark 2.3)
  for (const auto& b : members) {
    auto w = qset::witness_in(supp(b, k), Cut::neg_inf(), Cut::pos_inf(), k);
    if (!w) continue;
    ProductSetExpr deleted = product_remove_point(b, *w, 0, k);
    if (!member(deleted)) {
      rep.p3.pass = false;
      rep.p3.witness = struct_name(StructId::C_n, n) + "-copy minus {" + rat_to_string(*w) +
                       "} x {0}";
      break;
    }
  }
  rep.p4.pass = false;
  for (const auto& b : members) {
    // complement contains a whole rational class times the fibers
    QSetPtr co = qset::q_diff(qset::q_full(), supp(b, k));
    if (!qset::is_finite_expr(co, k).finite) {
      rep.p4.pass = true;
      rep.p4.witness = "complement of the support is infinite";
      break;
    }
  }
  if (!rep.p4.pass) rep.p4.witness = "no co-infinite member among samples";
  return rep;
}

}  // namespace uhpo::cat
