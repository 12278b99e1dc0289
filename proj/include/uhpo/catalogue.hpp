#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uhpo/generic.hpp"
#include "uhpo/order_core.hpp"
#include "uhpo/qset.hpp"

namespace uhpo::cat {

enum class StructId { A_omega, B_n, B_omega, C_n, C_omega, D, Q_line };

std::string struct_name(StructId id, int n);
/// Parses "A_omega", "B_omega", "C_omega", "D", "Q", "B_3", "C_2", ...
std::pair<StructId, int> parse_struct(const std::string& name);

/// Ambient structure with a decidable order predicate. For D the order is
/// backed by a GenericOrder instance and inherits its access contract.
struct AmbientStructure {
  StructId id = StructId::Q_line;
  int n = 0;                        // B_n / C_n parameter
  gen::GenericOrder* d = nullptr;   // required when id == D
};

/// Element encoding: A_omega uses the natural i; B_n uses (line i, q);
/// B_omega, D and the rational line use q; C_n and C_omega use (q, fiber i).
struct Elem {
  Rat q;
  long long i = 0;
  std::string to_string(StructId id) const;
};

core::Rel order_pred(const AmbientStructure& s, const Elem& a, const Elem& b);

/// Deterministic sample of `count` elements plus the induced finite poset.
std::vector<Elem> sample_elements(const AmbientStructure& s, int count);
core::FinPoset sample_poset(const AmbientStructure& s, int count);

/// Block decomposition of B_omega: x_0 = inf, x_j = sqrt(2) - j for j >= 1;
/// block i is the trace of (x_{i+1}, x_i). Every rational lies in exactly
/// one block and the cuts are irrational.
Cut b_omega_cut(int i);
int b_omega_block(const Rat& q);
qset::QSetPtr b_omega_block_expr(int i);

/// Subset of omega in the finite / cofinite / full fragment.
struct FiberSpec {
  enum class Kind { Finite, Cofinite, Full };
  Kind kind = Kind::Full;
  std::vector<std::uint64_t> elems;  // members when Finite, exclusions when Cofinite

  static FiberSpec full() { return {}; }
  static FiberSpec finite(std::vector<std::uint64_t> v);
  static FiberSpec cofinite(std::vector<std::uint64_t> v);
  static FiberSpec omega_plus() { return cofinite({0}); }

  bool contains(std::uint64_t x) const;
  bool empty_set() const { return kind == Kind::Finite && elems.empty(); }
  bool infinite() const { return kind != Kind::Finite; }
  /// Contains all of 0..n-1.
  bool covers_n(int n) const;

  friend bool operator==(const FiberSpec&, const FiberSpec&) = default;
};

FiberSpec fiber_union(const FiberSpec& a, const FiberSpec& b);

/// Finite union of rectangles E_i x F_i inside a product universe
/// (C_n, C_omega, or B_n where the fiber indexes the line).
struct ProductComponent {
  qset::QSetPtr base;
  FiberSpec fiber;
};

struct ProductSetExpr {
  std::vector<ProductComponent> comps;

  static ProductSetExpr rect(qset::QSetPtr base, FiberSpec fiber);
  static ProductSetExpr empty() { return {}; }
};

ProductSetExpr product_union(const ProductSetExpr& a, const ProductSetExpr& b);
/// Disjoint-base normal form; drops empty components.
ProductSetExpr normalize(const ProductSetExpr& x, int k = qset::kDefaultModulus);
bool product_member(const Rat& q, std::uint64_t fiber, const ProductSetExpr& x,
                    int k = qset::kDefaultModulus);
bool product_equal(const ProductSetExpr& a, const ProductSetExpr& b,
                   int k = qset::kDefaultModulus);
bool product_subset(const ProductSetExpr& a, const ProductSetExpr& b,
                    int k = qset::kDefaultModulus);
bool product_empty(const ProductSetExpr& a, int k = qset::kDefaultModulus);
/// Removes a single point (q, i); used by the positive-family deletion axiom.
ProductSetExpr product_remove_point(const ProductSetExpr& x, const Rat& q, std::uint64_t i,
                                    int k = qset::kDefaultModulus);

/// supp X = set of rationals whose fiber is touched.
qset::QSetPtr supp(const ProductSetExpr& x, int k = qset::kDefaultModulus);

nlohmann::json product_to_json(const ProductSetExpr& x);
ProductSetExpr product_from_json(const nlohmann::json& j);

struct CopyVerdict {
  gen::Verdict v;
  std::string detail;
  std::optional<Rat> witness_q;
};

/// Q-copy test on the canonical fragment: nonempty, no maximum, no minimum,
/// dense in itself.
CopyVerdict q_line_copy(const qset::QSetPtr& e, int k = qset::kDefaultModulus);

CopyVerdict is_copy_a_omega(const FiberSpec& x);
CopyVerdict is_copy_bn(int n, const ProductSetExpr& x, int k = qset::kDefaultModulus);
CopyVerdict is_copy_cn(int n, const ProductSetExpr& x, int k = qset::kDefaultModulus);
CopyVerdict is_copy_comega(const ProductSetExpr& x, int k = qset::kDefaultModulus);
CopyVerdict is_copy_bomega(const qset::QSetPtr& e, int k = qset::kDefaultModulus);
CopyVerdict is_copy_d(gen::GenericOrder& g, const qset::QSetPtr& e, int size_bound = 2,
                      long long budget = 300);

struct AxiomReport {
  struct Item {
    bool pass = true;
    std::string witness;
  };
  Item p1, p2, p3, p4;
  bool all_pass() const { return p1.pass && p2.pass && p3.pass && p4.pass; }
};

/// (P1)-(P4) for a family of symbolic subsets of Q given by a sufficient
/// membership predicate, on the supplied samples.
AxiomReport positive_family_qset(const std::function<bool(const qset::QSetPtr&)>& member,
                                 const qset::QSetPtr& universe,
                                 const std::vector<qset::QSetPtr>& samples,
                                 int k = qset::kDefaultModulus);

/// (P1)-(P4) for the copy family of C_n; (P3) fails by single-point deletion.
AxiomReport positive_family_cn(int n, const std::vector<ProductSetExpr>& samples,
                               int k = qset::kDefaultModulus);

}  // namespace uhpo::cat
