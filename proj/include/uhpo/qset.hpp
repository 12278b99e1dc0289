#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uhpo/quad.hpp"
#include "uhpo/rational.hpp"

namespace uhpo::qset {

/// Default global modulus for the residue-class partition of Q.
inline constexpr int kDefaultModulus = 8;

struct QSetExpr;
using QSetPtr = std::shared_ptr<const QSetExpr>;

/// Symbolic subset of Q. DenseClass(i) is the set of rationals whose
/// lowest-terms numerator is congruent to i mod k; the classes partition Q
/// and each is dense in R. Interval(lo, hi) denotes the open trace
/// (lo, hi) n Q with endpoints in Q(sqrt 2) u {+-inf}.
struct QSetExpr {
  enum class Node { Full, DenseClass, Interval, FiniteSet, Union, Intersect, Diff };
  Node kind;
  int cls = 0;                // DenseClass
  Cut lo, hi;                 // Interval
  std::vector<Rat> points;    // FiniteSet, sorted
  QSetPtr left, right;        // binary operations
};

QSetPtr q_full();
QSetPtr q_class(int i);
QSetPtr q_interval(Cut lo, Cut hi);
QSetPtr q_finite(std::vector<Rat> pts);
QSetPtr q_empty();
QSetPtr q_point(const Rat& q);
QSetPtr q_union(QSetPtr a, QSetPtr b);
QSetPtr q_intersect(QSetPtr a, QSetPtr b);
QSetPtr q_diff(QSetPtr a, QSetPtr b);

/// Exact membership, evaluated directly on the syntax tree. Independent of
/// the canonical form on purpose: the agreement of the two routes is a
/// tested invariant.
bool member(const Rat& q, const QSetPtr& e, int k = kDefaultModulus);

/// Canonical form: disjoint open interval pieces carrying residue-class
/// masks, adjusted by finite add/remove sets. Equality of canonical forms
/// decides extensional equality within the fragment.
struct Canon {
  struct Piece {
    Cut lo, hi;
    std::uint64_t mask;
    friend bool operator==(const Piece&, const Piece&) = default;
  };
  int k = kDefaultModulus;
  std::vector<Piece> pieces;  // sorted by lo, pairwise disjoint, maximally merged
  std::vector<Rat> add;       // sorted; points not covered by pieces
  std::vector<Rat> remove;    // sorted; points strictly inside a piece with its class bit set

  bool contains(const Rat& q) const;
  bool empty() const { return pieces.empty() && add.empty(); }
  friend bool operator==(const Canon&, const Canon&) = default;
};

Canon canonicalize(const QSetPtr& e, int k = kDefaultModulus);

/// Semantics-preserving reconstruction of a canonical form as an expression.
QSetPtr canon_to_expr(const Canon& c);

/// Deterministic witness of E n (lo, hi): the member with minimal
/// enumeration height (|numerator| + denominator), ties by numerator.
/// nullopt iff the intersection is empty.
std::optional<Rat> witness_in(const QSetPtr& e, const Cut& lo, const Cut& hi,
                              int k = kDefaultModulus);

/// True iff every nonempty open subinterval of (lo, hi) meets E.
bool dense_in(const QSetPtr& e, const Cut& lo, const Cut& hi, int k = kDefaultModulus);

/// The <_Q-maximum of E when it exists; nullopt when E has no maximum.
/// Throws std::invalid_argument on an empty expression.
std::optional<Rat> max_of(const QSetPtr& e, int k = kDefaultModulus);
std::optional<Rat> min_of(const QSetPtr& e, int k = kDefaultModulus);

/// Least upper bound of a nonempty set as a point of [-inf, inf].
Cut sup_of(const Canon& c);
Cut inf_of(const Canon& c);

/// E subset* F: the difference is finite.
bool almost_subset(const QSetPtr& e, const QSetPtr& f, int k = kDefaultModulus);

struct Finiteness {
  bool finite;
  std::size_t cardinality;  // meaningful when finite
};
Finiteness is_finite_expr(const QSetPtr& e, int k = kDefaultModulus);

/// Extensional comparison helpers on the canonical fragment.
bool set_equal(const QSetPtr& a, const QSetPtr& b, int k = kDefaultModulus);
bool subset_of(const QSetPtr& a, const QSetPtr& b, int k = kDefaultModulus);

/// S-expression syntax, e.g. (diff (interval -inf (sqrt2-plus -3)) (fin 0 1/2)).
std::string to_sexpr(const QSetPtr& e);
QSetPtr parse_sexpr(const std::string& text);

nlohmann::json to_json(const QSetPtr& e);
QSetPtr from_json(const nlohmann::json& j);

}  // namespace uhpo::qset
