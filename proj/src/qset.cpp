#include "uhpo/qset.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace uhpo::qset {

namespace {

QSetPtr make(QSetExpr e) { return std::make_shared<const QSetExpr>(std::move(e)); }

std::uint64_t full_mask(int k) {
  if (k < 1 || k > 64) throw std::invalid_argument("modulus must be in 1..64");
  return k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
}

}  // namespace

QSetPtr q_full() {
  QSetExpr e;
  e.kind = QSetExpr::Node::Full;
  return make(std::move(e));
}

QSetPtr q_class(int i) {
  if (i < 0) throw std::invalid_argument("negative class index");
  QSetExpr e;
  e.kind = QSetExpr::Node::DenseClass;
  e.cls = i;
  return make(std::move(e));
}

QSetPtr q_interval(Cut lo, Cut hi) {
  QSetExpr e;
  e.kind = QSetExpr::Node::Interval;
  e.lo = std::move(lo);
  e.hi = std::move(hi);
  return make(std::move(e));
}

QSetPtr q_finite(std::vector<Rat> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  QSetExpr e;
  e.kind = QSetExpr::Node::FiniteSet;
  e.points = std::move(pts);
  return make(std::move(e));
}

QSetPtr q_empty() { return q_finite({}); }
QSetPtr q_point(const Rat& q) { return q_finite({q}); }

namespace {

QSetPtr binary(QSetExpr::Node kind, QSetPtr a, QSetPtr b) {
  QSetExpr e;
  e.kind = kind;
  e.left = std::move(a);
  e.right = std::move(b);
  return make(std::move(e));
}

}  // namespace

QSetPtr q_union(QSetPtr a, QSetPtr b) { return binary(QSetExpr::Node::Union, std::move(a), std::move(b)); }
QSetPtr q_intersect(QSetPtr a, QSetPtr b) { return binary(QSetExpr::Node::Intersect, std::move(a), std::move(b)); }
QSetPtr q_diff(QSetPtr a, QSetPtr b) { return binary(QSetExpr::Node::Diff, std::move(a), std::move(b)); }

bool member(const Rat& q, const QSetPtr& e, int k) {
  if (!e) throw std::invalid_argument("null expression");
  switch (e->kind) {
    case QSetExpr::Node::Full:
      return true;
    case QSetExpr::Node::DenseClass:
      if (e->cls >= k) throw std::invalid_argument("class index >= modulus");
      return residue_class(q, k) == e->cls;
    case QSetExpr::Node::Interval:
      return cmp_cut_rat(e->lo, q) < 0 && cmp_cut_rat(e->hi, q) > 0;
    case QSetExpr::Node::FiniteSet:
      return std::binary_search(e->points.begin(), e->points.end(), q);
    case QSetExpr::Node::Union:
      return member(q, e->left, k) || member(q, e->right, k);
    case QSetExpr::Node::Intersect:
      return member(q, e->left, k) && member(q, e->right, k);
    case QSetExpr::Node::Diff:
      return member(q, e->left, k) && !member(q, e->right, k);
  }
  throw std::logic_error("unreachable");
}

namespace {

bool sorted_contains(const std::vector<Rat>& v, const Rat& q) {
  return std::binary_search(v.begin(), v.end(), q);
}

void sorted_erase(std::vector<Rat>& v, const Rat& q) {
  auto it = std::lower_bound(v.begin(), v.end(), q);
  if (it != v.end() && *it == q) v.erase(it);
}

void sorted_insert(std::vector<Rat>& v, const Rat& q) {
  auto it = std::lower_bound(v.begin(), v.end(), q);
  if (it == v.end() || *it != q) v.insert(it, q);
}

// Strictly-inside piece cover with the class bit set.
bool piece_covered(const Canon& c, const Rat& q) {
  int cls = residue_class(q, c.k);
  for (const auto& p : c.pieces) {
    if (cmp_cut_rat(p.lo, q) < 0 && cmp_cut_rat(p.hi, q) > 0)
      return p.mask >> cls & 1;
    if (cmp_cut_rat(p.lo, q) >= 0) break;  // pieces sorted by lo
  }
  return false;
}

void normalize(Canon& c) {
  std::erase_if(c.pieces, [](const Canon::Piece& p) { return p.mask == 0 || !(p.lo < p.hi); });
  std::sort(c.pieces.begin(), c.pieces.end(),
            [](const Canon::Piece& a, const Canon::Piece& b) { return a.lo < b.lo; });
  std::vector<Canon::Piece> merged;
  for (const auto& p : c.pieces) {
    if (!merged.empty() && merged.back().hi == p.lo && merged.back().mask == p.mask) {
      const Cut& e = p.lo;
      if (e.is_rational()) {
        const Rat& q = e.rational();
        bool bit = p.mask >> residue_class(q, c.k) & 1;
        if (bit) {
          if (sorted_contains(c.add, q))
            sorted_erase(c.add, q);
          else
            sorted_insert(c.remove, q);
        }
      }
      merged.back().hi = p.hi;
    } else {
      merged.push_back(p);
    }
  }
  c.pieces = std::move(merged);
  std::erase_if(c.add, [&](const Rat& q) { return piece_covered(c, q); });
  std::erase_if(c.remove, [&](const Rat& q) { return !piece_covered(c, q); });
}

enum class BoolOp { Union, Intersect, Diff };

std::uint64_t mask_op(BoolOp op, std::uint64_t a, std::uint64_t b) {
  switch (op) {
    case BoolOp::Union: return a | b;
    case BoolOp::Intersect: return a & b;
    case BoolOp::Diff: return a & ~b;
  }
  return 0;
}

bool bool_op(BoolOp op, bool a, bool b) {
  switch (op) {
    case BoolOp::Union: return a || b;
    case BoolOp::Intersect: return a && b;
    case BoolOp::Diff: return a && !b;
  }
  return false;
}

std::uint64_t cover_mask(const Canon& c, const Cut& lo, const Cut& hi) {
  for (const auto& p : c.pieces)
    if (!(lo < p.lo) && !(p.hi < hi)) return p.mask;
  return 0;
}

Canon combine(BoolOp op, const Canon& a, const Canon& b) {
  Canon r;
  r.k = a.k;
  std::vector<Cut> cuts{Cut::neg_inf(), Cut::pos_inf()};
  for (const Canon* c : {&a, &b})
    for (const auto& p : c->pieces) {
      cuts.push_back(p.lo);
      cuts.push_back(p.hi);
    }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    std::uint64_t m = mask_op(op, cover_mask(a, cuts[i], cuts[i + 1]),
                              cover_mask(b, cuts[i], cuts[i + 1]));
    if (m) r.pieces.push_back({cuts[i], cuts[i + 1], m});
  }
  std::vector<Rat> cand;
  for (const Canon* c : {&a, &b}) {
    cand.insert(cand.end(), c->add.begin(), c->add.end());
    cand.insert(cand.end(), c->remove.begin(), c->remove.end());
  }
  for (const auto& cut : cuts)
    if (cut.is_rational()) cand.push_back(cut.rational());
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  for (const Rat& q : cand) {
    bool want = bool_op(op, a.contains(q), b.contains(q));
    bool have = piece_covered(r, q);
    if (want && !have)
      r.add.push_back(q);
    else if (!want && have)
      r.remove.push_back(q);
  }
  normalize(r);
  return r;
}

}  // namespace

bool Canon::contains(const Rat& q) const {
  if (piece_covered(*this, q)) return !sorted_contains(remove, q);
  return sorted_contains(add, q);
}

Canon canonicalize(const QSetPtr& e, int k) {
  if (!e) throw std::invalid_argument("null expression");
  Canon c;
  c.k = k;
  switch (e->kind) {
    case QSetExpr::Node::Full:
      c.pieces.push_back({Cut::neg_inf(), Cut::pos_inf(), full_mask(k)});
      return c;
    case QSetExpr::Node::DenseClass:
      if (e->cls >= k) throw std::invalid_argument("class index >= modulus");
      c.pieces.push_back({Cut::neg_inf(), Cut::pos_inf(), std::uint64_t{1} << e->cls});
      return c;
    case QSetExpr::Node::Interval:
      if (e->lo < e->hi) c.pieces.push_back({e->lo, e->hi, full_mask(k)});
      return c;
    case QSetExpr::Node::FiniteSet:
      c.add = e->points;
      return c;
    case QSetExpr::Node::Union:
      return combine(BoolOp::Union, canonicalize(e->left, k), canonicalize(e->right, k));
    case QSetExpr::Node::Intersect:
      return combine(BoolOp::Intersect, canonicalize(e->left, k), canonicalize(e->right, k));
    case QSetExpr::Node::Diff:
      return combine(BoolOp::Diff, canonicalize(e->left, k), canonicalize(e->right, k));
  }
  throw std::logic_error("unreachable");
}

QSetPtr canon_to_expr(const Canon& c) {
  QSetPtr acc = q_empty();
  bool first = true;
  std::uint64_t full = full_mask(c.k);
  for (const auto& p : c.pieces) {
    QSetPtr piece = q_interval(p.lo, p.hi);
    if (p.mask != full) {
      QSetPtr classes;
      for (int i = 0; i < c.k; ++i) {
        if (!(p.mask >> i & 1)) continue;
        classes = classes ? q_union(classes, q_class(i)) : q_class(i);
      }
      piece = q_intersect(piece, classes);
    }
    acc = first ? piece : q_union(acc, piece);
    first = false;
  }
  if (!c.remove.empty()) acc = q_diff(acc, q_finite(c.remove));
  if (!c.add.empty()) acc = first ? q_finite(c.add) : q_union(acc, q_finite(c.add));
  return acc;
}

std::optional<Rat> witness_in(const QSetPtr& e, const Cut& lo, const Cut& hi, int k) {
  QSetPtr trace = q_intersect(e, q_interval(lo, hi));
  if (canonicalize(trace, k).empty()) return std::nullopt;
  long long scanned = 0;
  for (long long h = 1;; ++h) {
    for (const Rat& q : rationals_of_height(h)) {
      if (++scanned > 20'000'000)
        throw std::logic_error("witness enumeration exceeded hard cap");
      if (cmp_cut_rat(lo, q) < 0 && cmp_cut_rat(hi, q) > 0 && member(q, e, k)) return q;
    }
  }
}

bool dense_in(const QSetPtr& e, const Cut& lo, const Cut& hi, int k) {
  if (!(lo < hi)) return true;  // no nonempty open subinterval
  Canon c = canonicalize(q_intersect(e, q_interval(lo, hi)), k);
  Cut cur = lo;
  for (const auto& p : c.pieces) {
    if (cur < p.lo) return false;
    if (cur < p.hi) cur = p.hi;
  }
  return !(cur < hi);
}

std::optional<Rat> max_of(const QSetPtr& e, int k) {
  Canon c = canonicalize(e, k);
  if (c.empty()) throw std::invalid_argument("max_of on empty expression");
  if (c.pieces.empty()) return c.add.back();
  const Cut& top = c.pieces.back().hi;
  if (top.is_pos_inf()) return std::nullopt;
  if (!c.add.empty() && !(Cut(c.add.back()) < top)) return c.add.back();
  return std::nullopt;
}

std::optional<Rat> min_of(const QSetPtr& e, int k) {
  Canon c = canonicalize(e, k);
  if (c.empty()) throw std::invalid_argument("min_of on empty expression");
  if (c.pieces.empty()) return c.add.front();
  const Cut& bot = c.pieces.front().lo;
  if (bot.is_neg_inf()) return std::nullopt;
  if (!c.add.empty() && !(bot < Cut(c.add.front()))) return c.add.front();
  return std::nullopt;
}

Cut sup_of(const Canon& c) {
  if (c.empty()) throw std::invalid_argument("sup of empty set");
  Cut best = Cut::neg_inf();
  if (!c.pieces.empty()) best = c.pieces.back().hi;
  if (!c.add.empty() && best < Cut(c.add.back())) best = Cut(c.add.back());
  return best;
}

Cut inf_of(const Canon& c) {
  if (c.empty()) throw std::invalid_argument("inf of empty set");
  Cut best = Cut::pos_inf();
  if (!c.pieces.empty()) best = c.pieces.front().lo;
  if (!c.add.empty() && Cut(c.add.front()) < best) best = Cut(c.add.front());
  return best;
}

bool almost_subset(const QSetPtr& e, const QSetPtr& f, int k) {
  return canonicalize(q_diff(e, f), k).pieces.empty();
}

Finiteness is_finite_expr(const QSetPtr& e, int k) {
  Canon c = canonicalize(e, k);
  return {c.pieces.empty(), c.add.size()};
}

bool set_equal(const QSetPtr& a, const QSetPtr& b, int k) {
  return canonicalize(a, k) == canonicalize(b, k);
}

bool subset_of(const QSetPtr& a, const QSetPtr& b, int k) {
  return canonicalize(q_diff(a, b), k).empty();
}

// ---------------------------------------------------------------------------
// serialization

namespace {

std::string cut_sexpr(const Cut& c) {
  if (c.is_neg_inf()) return "-inf";
  if (c.is_pos_inf()) return "inf";
  const Quad& v = c.value();
  if (v.b == 0) return rat_to_string(v.a);
  if (v.b == 1) return "(sqrt2-plus " + rat_to_string(v.a) + ")";
  return "(quad " + rat_to_string(v.a) + " " + rat_to_string(v.b) + ")";
}

struct Tokens {
  std::vector<std::string> toks;
  std::size_t pos = 0;
  const std::string& peek() const {
    if (pos >= toks.size()) throw std::invalid_argument("unexpected end of expression");
    return toks[pos];
  }
  std::string next() {
    auto t = peek();
    ++pos;
    return t;
  }
  void expect(const std::string& t) {
    if (next() != t) throw std::invalid_argument("expected '" + t + "'");
  }
  bool done() const { return pos == toks.size(); }
};

Tokens tokenize(const std::string& text) {
  Tokens t;
  std::string cur;
  for (char ch : text) {
    if (ch == '(' || ch == ')') {
      if (!cur.empty()) {
        t.toks.push_back(cur);
        cur.clear();
      }
      t.toks.push_back(std::string(1, ch));
    } else if (ch == ' ' || ch == '\n' || ch == '\t' || ch == '\r') {
      if (!cur.empty()) {
        t.toks.push_back(cur);
        cur.clear();
      }
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) t.toks.push_back(cur);
  return t;
}

Cut parse_cut_tokens(Tokens& t) {
  std::string tok = t.next();
  if (tok == "inf") return Cut::pos_inf();
  if (tok == "-inf") return Cut::neg_inf();
  if (tok == "(") {
    std::string op = t.next();
    if (op == "sqrt2-plus") {
      Rat a = rat_from_string(t.next());
      t.expect(")");
      return Cut(Quad(a, 1));
    }
    if (op == "quad") {
      Rat a = rat_from_string(t.next());
      Rat b = rat_from_string(t.next());
      t.expect(")");
      return Cut(Quad(a, b));
    }
    throw std::invalid_argument("unknown cut form: " + op);
  }
  return Cut(rat_from_string(tok));
}

QSetPtr parse_expr_tokens(Tokens& t) {
  std::string tok = t.next();
  if (tok == "full") return q_full();
  if (tok != "(") throw std::invalid_argument("expected '(' or 'full', got " + tok);
  std::string op = t.next();
  if (op == "class") {
    int i = std::stoi(t.next());
    t.expect(")");
    return q_class(i);
  }
  if (op == "interval") {
    Cut lo = parse_cut_tokens(t);
    Cut hi = parse_cut_tokens(t);
    t.expect(")");
    return q_interval(lo, hi);
  }
  if (op == "fin") {
    std::vector<Rat> pts;
    while (t.peek() != ")") pts.push_back(rat_from_string(t.next()));
    t.expect(")");
    return q_finite(std::move(pts));
  }
  if (op == "union" || op == "inter" || op == "diff") {
    std::vector<QSetPtr> args;
    while (t.peek() != ")") args.push_back(parse_expr_tokens(t));
    t.expect(")");
    if (args.size() < 2) throw std::invalid_argument(op + " needs at least two arguments");
    if (op == "diff" && args.size() != 2) throw std::invalid_argument("diff takes two arguments");
    QSetPtr acc = args[0];
    for (std::size_t i = 1; i < args.size(); ++i)
      acc = op == "union"  ? q_union(acc, args[i])
          : op == "inter" ? q_intersect(acc, args[i])
                          : q_diff(acc, args[i]);
    return acc;
  }
  throw std::invalid_argument("unknown operator: " + op);
}

}  // namespace

std::string to_sexpr(const QSetPtr& e) {
  if (!e) throw std::invalid_argument("null expression");
  switch (e->kind) {
    case QSetExpr::Node::Full:
      return "full";
    case QSetExpr::Node::DenseClass:
      return "(class " + std::to_string(e->cls) + ")";
    case QSetExpr::Node::Interval:
      return "(interval " + cut_sexpr(e->lo) + " " + cut_sexpr(e->hi) + ")";
    case QSetExpr::Node::FiniteSet: {
      std::string s = "(fin";
      for (const auto& q : e->points) s += " " + rat_to_string(q);
      return s + ")";
    }
    case QSetExpr::Node::Union:
      return "(union " + to_sexpr(e->left) + " " + to_sexpr(e->right) + ")";
    case QSetExpr::Node::Intersect:
      return "(inter " + to_sexpr(e->left) + " " + to_sexpr(e->right) + ")";
    case QSetExpr::Node::Diff:
      return "(diff " + to_sexpr(e->left) + " " + to_sexpr(e->right) + ")";
  }
  throw std::logic_error("unreachable");
}

QSetPtr parse_sexpr(const std::string& text) {
  Tokens t = tokenize(text);
  QSetPtr e = parse_expr_tokens(t);
  if (!t.done()) throw std::invalid_argument("trailing tokens in expression");
  return e;
}

namespace {

nlohmann::json cut_json(const Cut& c) {
  if (c.is_neg_inf()) return "-inf";
  if (c.is_pos_inf()) return "inf";
  return nlohmann::json{{"a", rat_to_string(c.value().a)}, {"b", rat_to_string(c.value().b)}};
}

Cut cut_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return Cut::pos_inf();
    if (s == "-inf") return Cut::neg_inf();
    throw std::invalid_argument("bad cut: " + s);
  }
  return Cut(Quad(rat_from_string(j.at("a").get<std::string>()),
                  rat_from_string(j.at("b").get<std::string>())));
}

}  // namespace

nlohmann::json to_json(const QSetPtr& e) {
  if (!e) throw std::invalid_argument("null expression");
  switch (e->kind) {
    case QSetExpr::Node::Full:
      return {{"op", "full"}};
    case QSetExpr::Node::DenseClass:
      return {{"op", "class"}, {"i", e->cls}};
    case QSetExpr::Node::Interval:
      return {{"op", "interval"}, {"lo", cut_json(e->lo)}, {"hi", cut_json(e->hi)}};
    case QSetExpr::Node::FiniteSet: {
      std::vector<std::string> pts;
      for (const auto& q : e->points) pts.push_back(rat_to_string(q));
      return {{"op", "fin"}, {"points", pts}};
    }
    case QSetExpr::Node::Union:
      return {{"op", "union"}, {"left", to_json(e->left)}, {"right", to_json(e->right)}};
    case QSetExpr::Node::Intersect:
      return {{"op", "inter"}, {"left", to_json(e->left)}, {"right", to_json(e->right)}};
    case QSetExpr::Node::Diff:
      return {{"op", "diff"}, {"left", to_json(e->left)}, {"right", to_json(e->right)}};
  }
  throw std::logic_error("unreachable");
}

QSetPtr from_json(const nlohmann::json& j) {
  auto op = j.at("op").get<std::string>();
  if (op == "full") return q_full();
  if (op == "class") return q_class(j.at("i").get<int>());
  if (op == "interval") return q_interval(cut_from_json(j.at("lo")), cut_from_json(j.at("hi")));
  if (op == "fin") {
    std::vector<Rat> pts;
    for (const auto& s : j.at("points")) pts.push_back(rat_from_string(s.get<std::string>()));
    return q_finite(std::move(pts));
  }
  if (op == "union") return q_union(from_json(j.at("left")), from_json(j.at("right")));
  if (op == "inter") return q_intersect(from_json(j.at("left")), from_json(j.at("right")));
  if (op == "diff") return q_diff(from_json(j.at("left")), from_json(j.at("right")));
  throw std::invalid_argument("unknown op: " + op);
}

}  // namespace uhpo::qset
