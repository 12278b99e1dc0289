#pragma once

#include <compare>
#include <string>

#include "uhpo/rational.hpp"

namespace uhpo {

/// Element a + b*sqrt(2) of the quadratic field Q(sqrt 2). Comparison with
/// rationals (and other field elements) is exact; the field is the smallest
/// one giving genuinely irrational interval endpoints.
struct Quad {
  Rat a;  // rational part
  Rat b;  // coefficient of sqrt(2)

  Quad() = default;
  Quad(Rat ra, Rat rb) : a(std::move(ra)), b(std::move(rb)) {}
  explicit Quad(const Rat& r) : a(r), b(0) {}

  bool is_rational() const { return b == 0; }

  Quad operator+(const Quad& o) const { return {a + o.a, b + o.b}; }
  Quad operator-(const Quad& o) const { return {a - o.a, b - o.b}; }
  Quad operator-() const { return {-a, -b}; }
  Quad operator*(const Quad& o) const {
    return {a * o.a + 2 * b * o.b, a * o.b + b * o.a};
  }
  /// Multiplicative inverse; throws on zero.
  Quad inverse() const;
};

/// Exact sign of a + b*sqrt(2).
int quad_sign(const Quad& q);

inline bool operator==(const Quad& x, const Quad& y) {
  return x.a == y.a && x.b == y.b;
}
inline std::strong_ordering operator<=>(const Quad& x, const Quad& y) {
  int s = quad_sign(x - y);
  return s < 0 ? std::strong_ordering::less
       : s > 0 ? std::strong_ordering::greater
               : std::strong_ordering::equal;
}

inline Quad sqrt2() { return Quad(Rat(0), Rat(1)); }

std::string quad_to_string(const Quad& q);

/// Point of [-inf, inf] with finite values in Q(sqrt 2). Used for interval
/// endpoints and for the index continuum of chain constructions.
class Cut {
 public:
  Cut() : kind_(Kind::NegInf) {}
  static Cut neg_inf() { return Cut(Kind::NegInf); }
  static Cut pos_inf() { return Cut(Kind::PosInf); }
  explicit Cut(Quad v) : kind_(Kind::Finite), value_(std::move(v)) {}
  explicit Cut(const Rat& r) : kind_(Kind::Finite), value_(r) {}

  bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_rational() const { return is_finite() && value_.is_rational(); }

  const Quad& value() const;     // throws unless finite
  const Rat& rational() const;   // throws unless finite rational

  friend bool operator==(const Cut& x, const Cut& y) {
    if (x.kind_ != y.kind_) return false;
    return x.kind_ != Kind::Finite || x.value_ == y.value_;
  }
  friend std::strong_ordering operator<=>(const Cut& x, const Cut& y);

  std::string to_string() const;
  /// Accepts "inf", "-inf", rational literals and "[a]{+,-}[b*]sqrt2" forms.
  static Cut from_string(const std::string& s);

 private:
  enum class Kind { NegInf, Finite, PosInf };
  explicit Cut(Kind k) : kind_(k) {}
  Kind kind_;
  Quad value_{};
};

/// -1, 0, +1 comparison of a cut against a rational.
int cmp_cut_rat(const Cut& c, const Rat& q);

inline bool cut_lt_rat(const Cut& c, const Rat& q) { return cmp_cut_rat(c, q) < 0; }
inline bool rat_lt_cut(const Rat& q, const Cut& c) { return cmp_cut_rat(c, q) > 0; }

}  // namespace uhpo
