#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "uhpo/catalogue.hpp"
#include "uhpo/generic.hpp"
#include "uhpo/qset.hpp"

namespace uhpo::chains {

/// Finite description of the target linear order L as a sum of lumps over
/// the extended real line: M lists the cuts with |L_x| > 1 together with the
/// lump sizes; all other positions carry singletons and L_{-inf} is a
/// singleton (left lumps are out of the supported class).
struct LinOrderDesc {
  struct Lump {
    Cut x;
    int size;  // >= 2
  };
  std::vector<Lump> lumps;  // sorted by x, distinct, all x > -inf

  void validate() const;
  bool has_inf_lump() const;
  int lump_size(const Cut& x) const;            // 1 when x is not in M
  std::optional<std::size_t> lump_index(const Cut& x) const;

  /// "cut:size,cut:size" with cuts as in Cut::from_string; "" is no lumps.
  static LinOrderDesc parse(const std::string& text);
  std::string to_string() const;
};

/// Frozen deterministic data for one chain construction: the dense-class
/// partition roles (J = class j_class, J_y = the following classes in lump
/// order) and the chosen I_y sets, |I_y| = size_y - 1, picked from
/// J_y n (-inf, y) by minimal enumeration height.
struct ChainContext {
  int k = qset::kDefaultModulus;
  int j_class = 0;
  LinOrderDesc desc;
  std::vector<std::vector<Rat>> iy;

  static ChainContext make(LinOrderDesc desc, int k = qset::kDefaultModulus, int j_class = 0);
  qset::QSetPtr J() const { return qset::q_class(j_class); }
};

using SetExpr = std::variant<qset::QSetPtr, cat::ProductSetExpr>;

bool setexpr_equal(const SetExpr& a, const SetExpr& b, int k);
/// -1: a proper subset of b; 0: equal; 1: b proper subset of a; 2: incomparable.
int setexpr_compare(const SetExpr& a, const SetExpr& b, int k);
bool setexpr_empty(const SetExpr& a, int k);
std::string setexpr_to_string(const SetExpr& a);

/// The A_x family over the rational line (shared by the random poset and the
/// Q-line constructions): A_x = (J n (-inf,x)) u U_{y in M, y<x} I_y.
class AxFamilyQ {
 public:
  explicit AxFamilyQ(ChainContext ctx) : ctx_(std::move(ctx)) {}
  const ChainContext& ctx() const { return ctx_; }

  qset::QSetPtr A(const Cut& x) const;
  qset::QSetPtr A_plus(const Cut& x) const;             // x in M
  qset::QSetPtr lump_element(const Cut& x, int j) const;  // A_x plus first j points of I_x
  qset::QSetPtr top() const;

  /// Closed form of U_{x <= x0, lump included} A-side elements (EQ-union row).
  qset::QSetPtr union_below_with_lump(const Cut& x0) const;
  /// Closed form of U_{x < x0} A_x, which collapses to A_{x0}.
  qset::QSetPtr union_below_open(const Cut& x0) const;
  /// Closed form of the directed intersection across (x0, inf]; the empty
  /// family at x0 = inf is the ambient top.
  qset::QSetPtr inter_above(const Cut& x0) const;

 private:
  ChainContext ctx_;
};

/// Same family in the C_omega universe:
/// A_x = ((-inf,x)_Q x omega+) u U_{y in M, y<x} I_y x {0}.
class AxFamilyProduct {
 public:
  explicit AxFamilyProduct(ChainContext ctx) : ctx_(std::move(ctx)) {}
  const ChainContext& ctx() const { return ctx_; }

  cat::ProductSetExpr A(const Cut& x) const;
  cat::ProductSetExpr A_plus(const Cut& x) const;
  cat::ProductSetExpr lump_element(const Cut& x, int j) const;
  cat::ProductSetExpr top() const;
  cat::ProductSetExpr union_below_with_lump(const Cut& x0) const;
  cat::ProductSetExpr union_below_open(const Cut& x0) const;
  cat::ProductSetExpr inter_above(const Cut& x0) const;

 private:
  ChainContext ctx_;
};

enum class Ambient { D, Q, C_omega, B_n, C_n, B_omega };
std::string ambient_name(Ambient a);

/// Lazily served maximal chain: elements are indexed by (x, j) with x a cut
/// of [-inf, inf] and j a position inside the lump at x. Nothing uncountable
/// is materialized; verification happens on demand per served element.
class LazyChain {
 public:
  SetExpr element(const Cut& x, int j = 0) const;
  int lump_size(const Cut& x) const;
  Ambient ambient() const { return ambient_; }
  int transport_n() const { return n_; }
  const ChainContext& ctx() const;
  bool case2_trimmed() const { return trimmed_top_; }
  std::string provenance() const { return provenance_; }

  /// Ambient-appropriate copy test of a served (or candidate) element.
  cat::CopyVerdict check_copy(const SetExpr& e) const;

  friend LazyChain assemble_case1(Ambient s, const ChainContext& ctx);
  friend LazyChain assemble_case2(Ambient s, const ChainContext& ctx);
  friend LazyChain lift_Bn(const LazyChain& chain_q, int n);
  friend LazyChain transport_Cn(const LazyChain& chain_q, int n);
  friend LazyChain chain_B_omega(const ChainContext& ctx);

  const AxFamilyQ* family_q() const { return fam_q_ ? &*fam_q_ : nullptr; }
  const AxFamilyProduct* family_p() const { return fam_p_ ? &*fam_p_ : nullptr; }

 private:
  LazyChain() = default;
  Ambient ambient_ = Ambient::Q;
  std::optional<AxFamilyQ> fam_q_;
  std::optional<AxFamilyProduct> fam_p_;
  bool trimmed_top_ = false;  // Case II: the top element of desc+1 is dropped
  int n_ = 0;                 // B_n / C_n transport parameter
  std::string provenance_;
};

/// Case I: -inf not in M and inf in M.
LazyChain assemble_case1(Ambient s, const ChainContext& ctx);
/// Case II: -inf not in M, inf not in M; builds Case I for desc+1 and drops
/// the top element, serving the chain inside the copy below it.
LazyChain assemble_case2(Ambient s, const ChainContext& ctx);
/// A in the Q-chain goes to ({0} x A) u U_{0<i<n} {i} x Q; empty stays empty.
LazyChain lift_Bn(const LazyChain& chain_q, int n);
/// A goes to A x n; an isomorphism of the copy posets.
LazyChain transport_Cn(const LazyChain& chain_q, int n);
/// Reuses the Q-line chain, whose elements are dense initial-segment sets,
/// inside B_omega.
LazyChain chain_B_omega(const ChainContext& ctx);

/// Interval chain from A to B = A u {a_1..a_n}, adding one point at a time.
std::vector<qset::QSetPtr> chain_interval(const qset::QSetPtr& a, const qset::QSetPtr& b,
                                          const std::vector<Rat>& added,
                                          int k = qset::kDefaultModulus);

struct CutSide {
  enum class Kind { AtMaxBelow, AtMinAbove, WithinLump };
  Kind kind = Kind::AtMaxBelow;
  int j = 0;  // WithinLump: cut sits between lump positions j-1 and j
};

enum class CutVerdict { Equal, SingletonGapNonCopy, LumpCut };
std::string cut_verdict_name(CutVerdict v);

struct CutAnalysis {
  SetExpr union_below;
  SetExpr inter_above;
  CutVerdict verdict;
  int table_row;            // 1..4 as in the case tables; 0 for lump cuts
  std::string obstruction;  // justification for SingletonGapNonCopy
};

CutAnalysis cut_analysis(const LazyChain& chain, const Cut& x0, const CutSide& side);

struct ProbeResult {
  enum class Kind { AlreadyInChain, NotCopyObstruction, Incomparable, PotentialInsertion };
  Kind kind;
  std::string detail;
};
std::string probe_kind_name(ProbeResult::Kind k);

/// Maximality probe: locates the cut a candidate set would occupy and checks
/// that it is a chain element, fails the copy test, or is incomparable with
/// a sampled element. PotentialInsertion is a test failure.
ProbeResult maximality_probe(const LazyChain& chain, const SetExpr& c,
                             const std::vector<Cut>& sample_xs);

struct REmbedReport {
  std::vector<Int> numerators;  // over the common denominator 2^(terms-1)
  int terms;
  bool strictly_increasing;
  std::vector<std::size_t> ties;  // adjacent pairs the truncation failed to separate
};

/// f(A) = sum over the enumeration of 2^-n chi_A(x_n), truncated to `bits`
/// terms, computed exactly as dyadic rationals.
REmbedReport r_embedding(const std::vector<qset::QSetPtr>& elements,
                         const std::vector<Rat>& enumeration, int bits,
                         int k = qset::kDefaultModulus);

/// Union of a finite subset-chain of copies is again a copy (the chain-union
/// law specialized to symbolic elements).
cat::CopyVerdict union_of_chain_is_copy(const LazyChain& chain,
                                        const std::vector<SetExpr>& elements);

/// Index transform for the left-lump reduction: monotone bijection
/// (0, inf] -> (-inf, inf], y goes to y - 1/y, inf to inf. Exact on Q(sqrt2).
Cut reindex_left_lump(const Cut& y);

}  // namespace uhpo::chains
