#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace uhpo::core {

enum class Rel { Below, Above, Incomparable, Equal };

/// Finite strict partial order over opaque string labels. Immutable after
/// construction; every constructor and restriction re-checks irreflexivity,
/// transitivity and asymmetry.
class FinPoset {
 public:
  FinPoset() = default;
  FinPoset(std::vector<std::string> elements,
           const std::vector<std::pair<std::string, std::string>>& lt);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& elements() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  std::optional<std::size_t> index_of(const std::string& label) const;

  bool less(std::size_t i, std::size_t j) const {
    return bits_[i * words_ + j / 64] >> (j % 64) & 1;
  }
  bool less(const std::string& a, const std::string& b) const;
  bool incomparable(std::size_t i, std::size_t j) const {
    return i != j && !less(i, j) && !less(j, i);
  }

  std::vector<std::pair<std::string, std::string>> lt_pairs() const;

  /// Minimal adjacency-matrix string over all relabelings; exact isomorphism
  /// key for n <= 8 (throws beyond that).
  std::string canonical_key() const;
  static FinPoset from_canonical_key(const std::string& key);

  nlohmann::json to_json() const;
  static FinPoset from_json(const nlohmann::json& j);
  /// DOT of the Hasse diagram (transitive reduction).
  std::string to_dot(const std::string& name = "poset") const;

  /// Unchecked fast path for enumeration kernels: rows[i] bit j set iff
  /// element i < element j. Returns nullopt when the relation is not a
  /// strict partial order.
  static std::optional<FinPoset> try_from_rows(std::vector<std::string> labels,
                                               const std::vector<std::uint64_t>& rows);

 private:
  void build(const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
  void validate() const;

  std::vector<std::string> labels_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Finite injective partial map between element labels, order-preserving and
/// order-reflecting on its domain.
struct PartialIso {
  std::vector<std::pair<std::string, std::string>> pairs;  // sorted by domain
  bool empty() const { return pairs.empty(); }
};

/// One-point extension type: sets required below (L), above (G) and
/// incomparable (U) to the new point.
struct Triple {
  std::vector<std::string> L, G, U;  // each sorted, pairwise disjoint
  bool empty() const { return L.empty() && G.empty() && U.empty(); }
  std::string to_string() const;
};

FinPoset restrict_to(const FinPoset& p, const std::vector<std::string>& subset);

bool is_partial_iso(const FinPoset& x, const FinPoset& y,
                    const std::vector<std::pair<std::string, std::string>>& pairs);

/// All embeddings of X into Y (injections that preserve and reflect the
/// order), in lexicographic order of the image tuple.
std::vector<PartialIso> embeddings(const FinPoset& x, const FinPoset& y);

/// Existence-only variant of embeddings().
bool embeds(const FinPoset& x, const FinPoset& y);

bool is_isomorphic(const FinPoset& x, const FinPoset& y);

/// All y such that phi + {x -> y} is again a finite isomorphism of p.
std::vector<std::string> one_point_extensions(const FinPoset& p, const PartialIso& phi,
                                              const std::string& x);

struct UhResult {
  bool ultrahomogeneous;
  std::optional<PartialIso> witness;  // a partial iso with no automorphism extension
};

/// Direct definition: every partial isomorphism extends to an automorphism.
UhResult is_ultrahomogeneous(const FinPoset& p);

/// One-point-extension criterion; independent route kept for cross-checks.
UhResult extension_property(const FinPoset& p);

/// One canonical representative per isomorphism class of substructures with
/// at most k elements, sorted by (size, canonical key).
std::vector<FinPoset> age(const FinPoset& p, int k);

bool triple_valid(const FinPoset& p, const Triple& t);  // C1-C3

/// All triples of C(p) with |L u G u U| <= k, deterministic order (support
/// subsets by size then index-lex; slot assignments in base-3 lex).
std::vector<Triple> enumerate_triples(const FinPoset& p, int k);

/// Points satisfying (S1)-(S3) for t; throws if t violates C1-C3.
std::vector<std::string> realizers(const FinPoset& p, const Triple& t);

struct RandomnessResult {
  bool random;
  std::optional<Triple> failing;
};

/// True iff every triple of size <= k (over `support`, all elements when
/// empty) has a realizer anywhere in p.
RandomnessResult is_random_up_to(const FinPoset& p, int k,
                                 const std::vector<std::string>& support = {});

/// All isomorphism classes of posets on exactly n labeled points, canonical
/// representatives sorted by key. OpenMP-parallel scan of all candidate
/// relations when `parallel`; the serial path is the reference used by tests
/// and the benchmark.
std::vector<FinPoset> all_poset_classes(int n, bool parallel);

struct AgreementReport {
  long long classes_checked = 0;
  std::vector<std::string> mismatches;  // canonical keys where the routes differ
};

/// Runs both ultrahomogeneity routes over every iso class with <= max_n
/// elements.
AgreementReport ultrahomogeneity_agreement(int max_n, bool parallel);

}  // namespace uhpo::core
