#include "uhpo/quad.hpp"

#include <stdexcept>

namespace uhpo {

int quad_sign(const Quad& q) {
  const Rat& t = q.a;
  const Rat& s = q.b;
  int st = t == 0 ? 0 : (t > 0 ? 1 : -1);
  int ss = s == 0 ? 0 : (s > 0 ? 1 : -1);
  if (ss == 0) return st;
  if (st == 0) return ss;
  if (st == ss) return st;
  // Mixed signs: compare t^2 against 2 s^2. Equality would make sqrt(2)
  // rational, so it cannot occur for nonzero t, s.
  Rat t2 = t * t, s2 = 2 * s * s;
  if (t2 == s2) throw std::logic_error("sqrt(2) appeared rational");
  if (st > 0) return t2 > s2 ? 1 : -1;
  return s2 > t2 ? 1 : -1;
}

Quad Quad::inverse() const {
  // 1/(a + b sqrt2) = (a - b sqrt2)/(a^2 - 2 b^2)
  Rat n = a * a - 2 * b * b;
  if (n == 0) throw std::invalid_argument("inverse of zero in Q(sqrt 2)");
  return {a / n, -b / n};
}

std::string quad_to_string(const Quad& q) {
  if (q.b == 0) return rat_to_string(q.a);
  std::string s;
  if (q.a != 0) s += rat_to_string(q.a);
  if (q.b == 1) {
    s += s.empty() ? "sqrt2" : "+sqrt2";
  } else if (q.b == -1) {
    s += "-sqrt2";
  } else {
    if (!s.empty() && q.b > 0) s += "+";
    s += rat_to_string(q.b) + "*sqrt2";
  }
  return s;
}

const Quad& Cut::value() const {
  if (!is_finite()) throw std::logic_error("infinite cut has no value");
  return value_;
}

const Rat& Cut::rational() const {
  if (!is_rational()) throw std::logic_error("cut is not a rational");
  return value_.a;
}

std::strong_ordering operator<=>(const Cut& x, const Cut& y) {
  auto rank = [](Cut::Kind k) { return k == Cut::Kind::NegInf ? 0 : k == Cut::Kind::Finite ? 1 : 2; };
  if (x.kind_ != y.kind_) return rank(x.kind_) <=> rank(y.kind_);
  if (x.kind_ != Cut::Kind::Finite) return std::strong_ordering::equal;
  return x.value_ <=> y.value_;
}

std::string Cut::to_string() const {
  if (is_neg_inf()) return "-inf";
  if (is_pos_inf()) return "inf";
  return quad_to_string(value_);
}

Cut Cut::from_string(const std::string& s) {
  if (s == "inf" || s == "+inf") return pos_inf();
  if (s == "-inf") return neg_inf();
  // Split an optional sqrt2 term off: forms accepted are
  //   R | [R{+,-}]sqrt2 | [R+]R*sqrt2 | R-R*sqrt2 | sqrt2{+,-}R
  auto pos = s.find("sqrt2");
  if (pos == std::string::npos) return Cut(rat_from_string(s));
  std::string before = s.substr(0, pos);
  std::string after = s.substr(pos + 5);
  Rat a = 0, b = 1;
  if (!before.empty()) {
    if (before.back() == '*') {
      // "b*sqrt2" possibly preceded by "a+" / "a-"
      std::string coef = before.substr(0, before.size() - 1);
      std::size_t split = std::string::npos;
      for (std::size_t i = coef.size(); i-- > 1;) {
        if (coef[i] == '+' || coef[i] == '-') {
          if (coef[i - 1] >= '0' && coef[i - 1] <= '9') { split = i; break; }
        }
      }
      if (split == std::string::npos) {
        b = rat_from_string(coef);
      } else {
        a = rat_from_string(coef.substr(0, split));
        std::string btxt = coef.substr(split);
        if (btxt == "+") b = 1; else if (btxt == "-") b = -1;
        else b = rat_from_string(btxt);
      }
    } else if (before == "-") {
      b = -1;
    } else if (before == "+") {
      b = 1;
    } else if (before.back() == '+' || before.back() == '-') {
      a = rat_from_string(before.substr(0, before.size() - 1));
      b = before.back() == '+' ? 1 : -1;
    } else {
      throw std::invalid_argument("bad cut literal: " + s);
    }
  }
  if (!after.empty()) {
    if (after[0] != '+' && after[0] != '-')
      throw std::invalid_argument("bad cut literal: " + s);
    a = rat_from_string(after);
  }
  return Cut(Quad(a, b));
}

int cmp_cut_rat(const Cut& c, const Rat& q) {
  if (c.is_neg_inf()) return -1;
  if (c.is_pos_inf()) return 1;
  return quad_sign(c.value() - Quad(q));
}

}  // namespace uhpo
