#pragma once

#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uhpo/order_core.hpp"
#include "uhpo/qset.hpp"
#include "uhpo/rational.hpp"

namespace uhpo::gen {

/// One-point extension type over rational points.
struct RatTriple {
  std::vector<Rat> L, G, U;  // each sorted, pairwise disjoint
  bool empty() const { return L.empty() && G.empty() && U.empty(); }
  std::string to_string() const;
  static RatTriple from_string(const std::string& s);
};

/// Forcing condition p = (P_p, lt_p): a finite rational set with a strict
/// order that the rational order extends. Points are kept in introduction
/// order; relations between already-present points never change under the
/// extension operations below, which is the coherence property the generic
/// order relies on.
class Condition {
 public:
  std::size_t size() const { return pts_.size(); }
  const std::vector<Rat>& points() const { return pts_; }
  std::optional<std::size_t> index_of(const Rat& q) const;
  bool has(const Rat& q) const { return index_of(q).has_value(); }
  bool rel(std::size_t i, std::size_t j) const { return rel_[i][j]; }
  bool rel(const Rat& a, const Rat& b) const;

  /// Extension relation on conditions: p <= q iff P_p contains P_q and
  /// lt_p agrees with lt_q on P_q x P_q.
  bool extends(const Condition& weaker) const;

  /// Order axioms plus rational-order compatibility; throws std::logic_error.
  void validate() const;

  /// Induced finite poset, elements sorted by rational value.
  core::FinPoset to_poset() const;
  core::FinPoset to_poset(const std::vector<Rat>& subset) const;

  nlohmann::json to_json() const;

  friend Condition extend_with_point(const Condition& p, const Rat& q);
  friend Condition extend_meet_triple(const Condition& p, const RatTriple& t, int m,
                                      const qset::QSetPtr& J, int k);

 private:
  std::vector<Rat> pts_;
  std::vector<std::vector<bool>> rel_;
};

/// The point dense set D_q: adds q with no new relations when missing.
Condition extend_with_point(const Condition& p, const Rat& q);

/// The dense set D_{t,m}: ensures the condition contains L u G u U and
/// either t is no longer in C, or a fresh realizer from J has been added
/// with the below/above closure relations; the order axioms are re-audited
/// rather than trusted. Throws std::invalid_argument on an overlapping
/// triple, std::logic_error if an audit fails.
Condition extend_meet_triple(const Condition& p, const RatTriple& t, int m,
                             const qset::QSetPtr& J, int k);

/// Membership test for D_{t,m}; extend_meet_triple is a no-op on members.
bool in_dense_set(const Condition& p, const RatTriple& t, int m,
                  const qset::QSetPtr& J, int k);

struct SaturateReport {
  long long steps = 0;
  long long realized = 0;
  long long left_c = 0;
  bool budget_exhausted = false;
  std::vector<RatTriple> unrealized;
  core::FinPoset snapshot;
  std::vector<Rat> introduced;
};

enum class Verdict { Copy, NotCopy, Inconclusive };

struct CopyResult {
  Verdict verdict;
  std::optional<RatTriple> witness;  // for NotCopy
  std::string detail;
};

/// Max-obstruction check: a set with a rational maximum cannot be a copy of
/// the random poset (any realizer of <{max},0,0> would lie above it).
CopyResult check_no_max_copy(const qset::QSetPtr& e, int k = qset::kDefaultModulus);

/// The decidable part of the D-copy test: empty and max-obstructed sets are
/// not copies; sets sandwiching (-inf, x) n J inside (-inf, x) n Q are.
CopyResult copy_of_D_symbolic(const qset::QSetPtr& e, int j_class,
                              int k = qset::kDefaultModulus);

class GenericOrder;

/// Embeds a finite poset into the generic order by realizing the one-point
/// extension type of each element over the images chosen so far; returns the
/// image points. The age of the generic order contains all finite posets.
std::vector<Rat> embed_poset(GenericOrder& g, const core::FinPoset& p);

/// Deterministic generic filter for the forcing poset: a fixed interleaved
/// task stream (point tasks by enumeration height, triple tasks over
/// already-introduced points ordered by a total task weight) plus targeted
/// dense-set processing. Once two points are both present their relation is
/// frozen, so query answers do not depend on interleaving.
class GenericOrder {
 public:
  struct Config {
    int modulus = qset::kDefaultModulus;
    int j_class = 0;  // J = DenseClass(j_class)
  };

  GenericOrder() : GenericOrder(Config{}) {}
  explicit GenericOrder(Config cfg);
  GenericOrder(GenericOrder&& o) noexcept
      : cfg_(o.cfg_), cond_(std::move(o.cond_)), rho_(std::move(o.rho_)),
        step_(o.step_), next_point_(o.next_point_), pending_(std::move(o.pending_)),
        next_weight_(o.next_weight_), log_(std::move(o.log_)) {}
  GenericOrder(const GenericOrder&) = delete;
  GenericOrder& operator=(const GenericOrder&) = delete;

  const Config& config() const { return cfg_; }
  qset::QSetPtr J() const;

  /// Thread-safe; advances the filter just enough to see both points.
  core::Rel query(const Rat& a, const Rat& b);

  void ensure_point(const Rat& q);
  void ensure_triple(const RatTriple& t, int m);

  /// Processes `steps` tasks of the fixed schedule; returns tasks executed.
  long long advance(long long steps);

  /// Realizes every triple over `points` of size <= size_bound (or observes
  /// it leave C), one dense set per step, within the budget.
  SaturateReport saturate(const std::vector<Rat>& points, int size_bound, long long budget);

  /// First decided point realizing t, in introduction order.
  std::optional<Rat> realizer_of(const RatTriple& t);

  CopyResult is_copy_of_D(const qset::QSetPtr& e, int size_bound, long long budget);

  Condition current() const;
  long long step_count() const;
  nlohmann::json snapshot() const;

  /// Replay file: config line plus one line per public operation. Feeding it
  /// back reconstructs an identical instance.
  std::string replay_log() const;
  static GenericOrder from_replay(const std::string& log);

 private:
  struct TripleTask {
    std::vector<int> support;  // introduction-order indices, ascending
    int assign;                // base-3 slot code, digit order = support order
    int m;
  };

  void ensure_point_locked(const Rat& q);
  void ensure_triple_locked(const RatTriple& t, int m);
  long long advance_locked(long long steps);
  SaturateReport saturate_locked(const std::vector<Rat>& points, int size_bound,
                                 long long budget);
  void refill_tasks();
  RatTriple task_triple(const TripleTask& task) const;

  Config cfg_;
  Condition cond_;
  RationalEnumerator rho_;
  long long step_ = 0;
  std::size_t next_point_ = 0;
  std::deque<TripleTask> pending_;
  int next_weight_ = 3;
  std::vector<std::string> log_;
  mutable std::mutex mu_;
};

}  // namespace uhpo::gen
