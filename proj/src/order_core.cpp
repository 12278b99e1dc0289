#include "uhpo/order_core.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace uhpo::core {

namespace {

std::vector<std::string> default_labels(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(std::string(1, char('a' + i)));
  return out;
}

}  // namespace

FinPoset::FinPoset(std::vector<std::string> elements,
                   const std::vector<std::pair<std::string, std::string>>& lt)
    : labels_(std::move(elements)) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index.emplace(labels_[i], i).second)
      throw std::invalid_argument("duplicate label: " + labels_[i]);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(lt.size());
  for (const auto& [a, b] : lt) {
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end()) throw std::invalid_argument("unknown label: " + a);
    if (ib == index.end()) throw std::invalid_argument("unknown label: " + b);
    pairs.emplace_back(ia->second, ib->second);
  }
  build(pairs);
}

void FinPoset::build(const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  const std::size_t n = labels_.size();
  words_ = (n + 63) / 64;
  bits_.assign(n * words_, 0);
  for (auto [i, j] : pairs) bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
  validate();
}

void FinPoset::validate() const {
  const std::size_t n = labels_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (less(i, i))
      throw std::invalid_argument("relation is reflexive at " + labels_[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (!less(i, j)) continue;
      if (less(j, i))
        throw std::invalid_argument("relation is symmetric at (" + labels_[i] + "," + labels_[j] + ")");
      // transitivity: successors of j must be successors of i
      for (std::size_t w = 0; w < words_; ++w) {
        if (bits_[j * words_ + w] & ~bits_[i * words_ + w])
          throw std::invalid_argument("relation not transitive through " + labels_[j]);
      }
    }
  }
}

std::optional<std::size_t> FinPoset::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  return std::nullopt;
}

bool FinPoset::less(const std::string& a, const std::string& b) const {
  auto ia = index_of(a), ib = index_of(b);
  if (!ia || !ib) throw std::invalid_argument("unknown label in less()");
  return less(*ia, *ib);
}

std::vector<std::pair<std::string, std::string>> FinPoset::lt_pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j)
      if (less(i, j)) out.emplace_back(labels_[i], labels_[j]);
  return out;
}

std::string FinPoset::canonical_key() const {
  const std::size_t n = size();
  if (n > 8) throw std::invalid_argument("canonical_key is exact only for n <= 8");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  std::string cur(n * n, '0');
  do {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        cur[i * n + j] = less(perm[i], perm[j]) ? '1' : '0';
    if (best.empty() || cur < best) best = cur;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::string(1, char('0' + n)) + ":" + best;
}

FinPoset FinPoset::from_canonical_key(const std::string& key) {
  if (key.size() < 2 || key[1] != ':')
    throw std::invalid_argument("bad canonical key");
  int n = key[0] - '0';
  if (n < 0 || key.size() != 2 + std::size_t(n) * n)
    throw std::invalid_argument("bad canonical key length");
  auto labels = default_labels(n);
  std::vector<std::pair<std::string, std::string>> lt;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (key[2 + i * n + j] == '1') lt.emplace_back(labels[i], labels[j]);
  return FinPoset(labels, lt);
}

nlohmann::json FinPoset::to_json() const {
  nlohmann::json j;
  j["elements"] = labels_;
  auto lt = nlohmann::json::array();
  for (const auto& [a, b] : lt_pairs()) lt.push_back({a, b});
  j["lt"] = lt;
  return j;
}

FinPoset FinPoset::from_json(const nlohmann::json& j) {
  std::vector<std::string> elems = j.at("elements").get<std::vector<std::string>>();
  std::vector<std::pair<std::string, std::string>> lt;
  for (const auto& pair : j.at("lt"))
    lt.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
  return FinPoset(std::move(elems), lt);
}

std::string FinPoset::to_dot(const std::string& name) const {
  std::ostringstream os;
  os << "digraph \"" << name << "\" {\n  rankdir=BT;\n";
  for (const auto& l : labels_) os << "  \"" << l << "\";\n";
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) {
      if (!less(i, j)) continue;
      bool covering = true;
      for (std::size_t m = 0; m < size() && covering; ++m)
        if (less(i, m) && less(m, j)) covering = false;
      if (covering) os << "  \"" << labels_[i] << "\" -> \"" << labels_[j] << "\";\n";
    }
  os << "}\n";
  return os.str();
}

std::optional<FinPoset> FinPoset::try_from_rows(std::vector<std::string> labels,
                                                const std::vector<std::uint64_t>& rows) {
  const std::size_t n = labels.size();
  if (n > 64 || rows.size() != n) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i] >> i & 1) return std::nullopt;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(rows[i] >> j & 1)) continue;
      if (rows[j] >> i & 1) return std::nullopt;
      if (rows[j] & ~rows[i]) return std::nullopt;
    }
  }
  FinPoset p;
  p.labels_ = std::move(labels);
  p.words_ = 1;
  p.bits_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) p.bits_[i] = rows[i];
  return p;
}

std::string Triple::to_string() const {
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) {
      if (!s.empty()) s += ",";
      s += x;
    }
    return s;
  };
  return "<{" + join(L) + "},{" + join(G) + "},{" + join(U) + "}>";
}

FinPoset restrict_to(const FinPoset& p, const std::vector<std::string>& subset) {
  std::vector<std::string> elems;
  for (const auto& s : subset) {
    if (!p.index_of(s)) throw std::invalid_argument("unknown label in restriction: " + s);
    elems.push_back(s);
  }
  std::vector<std::pair<std::string, std::string>> lt;
  for (const auto& a : elems)
    for (const auto& b : elems)
      if (p.less(a, b)) lt.emplace_back(a, b);
  return FinPoset(elems, lt);
}

bool is_partial_iso(const FinPoset& x, const FinPoset& y,
                    const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  for (const auto& [a, b] : pairs) {
    auto ia = x.index_of(a), ib = y.index_of(b);
    if (!ia || !ib) return false;
    idx.emplace_back(*ia, *ib);
  }
  for (std::size_t u = 0; u < idx.size(); ++u)
    for (std::size_t v = 0; v < idx.size(); ++v) {
      if (u == v) continue;
      if (idx[u].first == idx[v].first || idx[u].second == idx[v].second) return false;
      if (x.less(idx[u].first, idx[v].first) != y.less(idx[u].second, idx[v].second))
        return false;
    }
  return true;
}

namespace {

// Backtracking search for image tuples; emits every consistent full injection
// of x into y in lexicographic order.
void search_embeddings(const FinPoset& x, const FinPoset& y, std::vector<std::size_t>& img,
                       std::vector<bool>& used, std::vector<PartialIso>* out, bool* found_any,
                       bool stop_at_first) {
  const std::size_t i = img.size();
  if (i == x.size()) {
    if (found_any) *found_any = true;
    if (out) {
      PartialIso iso;
      for (std::size_t u = 0; u < x.size(); ++u)
        iso.pairs.emplace_back(x.label(u), y.label(img[u]));
      out->push_back(std::move(iso));
    }
    return;
  }
  for (std::size_t c = 0; c < y.size(); ++c) {
    if (used[c]) continue;
    bool ok = true;
    for (std::size_t u = 0; u < i && ok; ++u) {
      if (x.less(u, i) != y.less(img[u], c)) ok = false;
      if (ok && x.less(i, u) != y.less(c, img[u])) ok = false;
    }
    if (!ok) continue;
    img.push_back(c);
    used[c] = true;
    search_embeddings(x, y, img, used, out, found_any, stop_at_first);
    used[c] = false;
    img.pop_back();
    if (stop_at_first && found_any && *found_any) return;
  }
}

}  // namespace

std::vector<PartialIso> embeddings(const FinPoset& x, const FinPoset& y) {
  std::vector<PartialIso> out;
  std::vector<std::size_t> img;
  std::vector<bool> used(y.size(), false);
  search_embeddings(x, y, img, used, &out, nullptr, false);
  return out;
}

bool embeds(const FinPoset& x, const FinPoset& y) {
  std::vector<std::size_t> img;
  std::vector<bool> used(y.size(), false);
  bool found = false;
  search_embeddings(x, y, img, used, nullptr, &found, true);
  return found;
}

bool is_isomorphic(const FinPoset& x, const FinPoset& y) {
  if (x.size() != y.size()) return false;
  return embeds(x, y);
}

std::vector<std::string> one_point_extensions(const FinPoset& p, const PartialIso& phi,
                                              const std::string& x) {
  auto ix = p.index_of(x);
  if (!ix) throw std::invalid_argument("unknown element: " + x);
  for (const auto& [a, b] : phi.pairs)
    if (a == x) throw std::invalid_argument("x already in dom(phi)");
  if (!is_partial_iso(p, p, phi.pairs))
    throw std::invalid_argument("phi is not a finite isomorphism of p");
  std::set<std::string> ran;
  for (const auto& [a, b] : phi.pairs) ran.insert(b);
  std::vector<std::string> out;
  for (std::size_t c = 0; c < p.size(); ++c) {
    const std::string& y = p.label(c);
    if (ran.count(y)) continue;
    bool ok = true;
    for (const auto& [a, b] : phi.pairs) {
      std::size_t ia = *p.index_of(a), ib = *p.index_of(b);
      if (p.less(ia, *ix) != p.less(ib, c) || p.less(*ix, ia) != p.less(c, ib)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(y);
  }
  return out;
}

namespace {

// True iff the index-level partial map dom[i] -> ran[i] extends to an
// automorphism of p.
bool extends_to_automorphism(const FinPoset& p, const std::vector<std::size_t>& dom,
                             const std::vector<std::size_t>& ran) {
  const std::size_t n = p.size();
  std::vector<std::size_t> img(n, n);  // n = unassigned
  std::vector<bool> used(n, false);
  for (std::size_t u = 0; u < dom.size(); ++u) {
    img[dom[u]] = ran[u];
    used[ran[u]] = true;
  }
  // Assign remaining positions in index order by backtracking.
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i)
    if (img[i] == n) free.push_back(i);

  auto consistent = [&](std::size_t i, std::size_t c) {
    for (std::size_t j = 0; j < n; ++j) {
      if (img[j] == n || j == i) continue;
      if (p.less(i, j) != p.less(c, img[j])) return false;
      if (p.less(j, i) != p.less(img[j], c)) return false;
    }
    return true;
  };

  std::vector<std::size_t> stack;
  std::size_t pos = 0, cand = 0;
  while (true) {
    if (pos == free.size()) return true;
    bool advanced = false;
    for (std::size_t c = cand; c < n; ++c) {
      if (used[c]) continue;
      if (!consistent(free[pos], c)) continue;
      img[free[pos]] = c;
      used[c] = true;
      stack.push_back(c);
      ++pos;
      cand = 0;
      advanced = true;
      break;
    }
    if (advanced) continue;
    if (stack.empty()) return false;
    std::size_t c = stack.back();
    stack.pop_back();
    --pos;
    img[free[pos]] = n;
    used[c] = false;
    cand = c + 1;
  }
}

// Enumerates every partial isomorphism of p (as index vectors) in a fixed
// depth-first order and calls visit; stops early when visit returns false.
bool for_each_partial_iso(const FinPoset& p,
                          const std::function<bool(const std::vector<std::size_t>&,
                                                   const std::vector<std::size_t>&)>& visit) {
  const std::size_t n = p.size();
  std::vector<std::size_t> dom, ran;
  std::vector<bool> used(n, false);
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == n) return visit(dom, ran);
    // Option 1: map element i to each consistent target.
    for (std::size_t c = 0; c < n; ++c) {
      if (used[c]) continue;
      bool ok = true;
      for (std::size_t u = 0; u < dom.size() && ok; ++u) {
        if (p.less(dom[u], i) != p.less(ran[u], c)) ok = false;
        if (ok && p.less(i, dom[u]) != p.less(c, ran[u])) ok = false;
      }
      if (!ok) continue;
      dom.push_back(i);
      ran.push_back(c);
      used[c] = true;
      bool cont = rec(i + 1);
      used[c] = false;
      dom.pop_back();
      ran.pop_back();
      if (!cont) return false;
    }
    // Option 2: leave element i out of the domain.
    return rec(i + 1);
  };
  return rec(0);
}

PartialIso make_witness(const FinPoset& p, const std::vector<std::size_t>& dom,
                        const std::vector<std::size_t>& ran) {
  PartialIso w;
  for (std::size_t u = 0; u < dom.size(); ++u)
    w.pairs.emplace_back(p.label(dom[u]), p.label(ran[u]));
  return w;
}

}  // namespace

UhResult is_ultrahomogeneous(const FinPoset& p) {
  UhResult res{true, std::nullopt};
  for_each_partial_iso(p, [&](const auto& dom, const auto& ran) {
    if (extends_to_automorphism(p, dom, ran)) return true;
    res.ultrahomogeneous = false;
    res.witness = make_witness(p, dom, ran);
    return false;
  });
  return res;
}

UhResult extension_property(const FinPoset& p) {
  UhResult res{true, std::nullopt};
  for_each_partial_iso(p, [&](const auto& dom, const auto& ran) {
    for (std::size_t x = 0; x < p.size(); ++x) {
      if (std::find(dom.begin(), dom.end(), x) != dom.end()) continue;
      PartialIso phi = make_witness(p, dom, ran);
      if (one_point_extensions(p, phi, p.label(x)).empty()) {
        res.ultrahomogeneous = false;
        res.witness = std::move(phi);
        return false;
      }
    }
    return true;
  });
  return res;
}

std::vector<FinPoset> age(const FinPoset& p, int k) {
  if (k < 1) throw std::invalid_argument("age requires k >= 1");
  std::set<std::string> seen;
  std::vector<FinPoset> out;
  const std::size_t n = p.size();
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (!pick.empty()) {
      std::vector<std::string> subset;
      for (auto i : pick) subset.push_back(p.label(i));
      FinPoset sub = restrict_to(p, subset);
      std::string key = sub.canonical_key();
      if (seen.insert(key).second) out.push_back(FinPoset::from_canonical_key(key));
    }
    if (pick.size() == std::size_t(k)) return;
    for (std::size_t i = start; i < n; ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  std::sort(out.begin(), out.end(), [](const FinPoset& a, const FinPoset& b) {
    return std::make_pair(a.size(), a.canonical_key()) <
           std::make_pair(b.size(), b.canonical_key());
  });
  return out;
}

bool triple_valid(const FinPoset& p, const Triple& t) {
  for (const auto& l : t.L)
    for (const auto& g : t.G)
      if (!p.less(l, g)) return false;  // C1
  for (const auto& u : t.U) {
    for (const auto& l : t.L)
      if (p.less(u, l)) return false;  // C2
    for (const auto& g : t.G)
      if (p.less(g, u)) return false;  // C3
  }
  return true;
}

namespace {

bool pairwise_disjoint(const Triple& t) {
  std::set<std::string> seen;
  for (const auto* part : {&t.L, &t.G, &t.U})
    for (const auto& x : *part)
      if (!seen.insert(x).second) return false;
  return true;
}

}  // namespace

std::vector<Triple> enumerate_triples(const FinPoset& p, int k) {
  std::vector<Triple> out;
  out.push_back(Triple{});  // <0,0,0> is always in C(p)
  const std::size_t n = p.size();
  std::vector<std::size_t> pick;
  // supports by size then lex; slot assignment digits: 0 -> L, 1 -> G, 2 -> U
  for (int size = 1; size <= k; ++size) {
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
      if (pick.size() == std::size_t(size)) {
        std::size_t total = 1;
        for (int i = 0; i < size; ++i) total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
          Triple t;
          std::size_t c = code;
          for (int i = 0; i < size; ++i) {
            const std::string& lbl = p.label(pick[i]);
            switch (c % 3) {
              case 0: t.L.push_back(lbl); break;
              case 1: t.G.push_back(lbl); break;
              default: t.U.push_back(lbl); break;
            }
            c /= 3;
          }
          if (triple_valid(p, t)) out.push_back(std::move(t));
        }
        return;
      }
      for (std::size_t i = start; i < n; ++i) {
        pick.push_back(i);
        rec(i + 1);
        pick.pop_back();
      }
    };
    rec(0);
  }
  return out;
}

std::vector<std::string> realizers(const FinPoset& p, const Triple& t) {
  if (!pairwise_disjoint(t)) throw std::invalid_argument("triple parts overlap");
  for (const auto* part : {&t.L, &t.G, &t.U})
    for (const auto& x : *part)
      if (!p.index_of(x)) throw std::invalid_argument("triple names unknown element: " + x);
  if (!triple_valid(p, t)) throw std::invalid_argument("triple violates C1-C3");
  std::set<std::string> excluded;
  for (const auto* part : {&t.L, &t.G, &t.U}) excluded.insert(part->begin(), part->end());
  std::vector<std::string> out;
  for (std::size_t c = 0; c < p.size(); ++c) {
    const std::string& cand = p.label(c);
    if (excluded.count(cand)) continue;
    bool ok = true;
    for (const auto& l : t.L)
      if (!p.less(l, cand)) { ok = false; break; }
    for (const auto& g : t.G)
      if (ok && !p.less(cand, g)) { ok = false; break; }
    for (const auto& u : t.U)
      if (ok && !p.incomparable(*p.index_of(u), c)) { ok = false; break; }
    if (ok) out.push_back(cand);
  }
  return out;
}

RandomnessResult is_random_up_to(const FinPoset& p, int k,
                                 const std::vector<std::string>& support) {
  FinPoset base = support.empty() ? p : restrict_to(p, support);
  for (const Triple& t : enumerate_triples(base, k)) {
    if (realizers(p, t).empty()) return {false, t};
  }
  return {true, std::nullopt};
}

namespace {

// Candidate relation -> canonical key, or empty when not a strict order.
std::string classify_mask(int n, std::uint64_t mask,
                          const std::vector<std::pair<int, int>>& slots) {
  std::uint64_t rows[8] = {0};
  for (std::size_t b = 0; b < slots.size(); ++b)
    if (mask >> b & 1) rows[slots[b].first] |= std::uint64_t{1} << slots[b].second;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!(rows[i] >> j & 1)) continue;
      if (rows[j] >> i & 1) return {};
      if (rows[j] & ~rows[i]) return {};
    }
  }
  // minimal matrix string over all permutations
  int perm[8];
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::string best;
  std::string cur(std::size_t(n) * n, '0');
  do {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        cur[i * n + j] = (rows[perm[i]] >> perm[j] & 1) ? '1' : '0';
    if (best.empty() || cur < best) best = cur;
  } while (std::next_permutation(perm, perm + n));
  return std::string(1, char('0' + n)) + ":" + best;
}

}  // namespace

std::vector<FinPoset> all_poset_classes(int n, bool parallel) {
  if (n < 0 || n > 6)
    throw std::invalid_argument("poset class enumeration supported for n <= 6");
  if (n == 0) return {FinPoset()};
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) slots.emplace_back(i, j);
  const std::uint64_t total = std::uint64_t{1} << slots.size();
  std::set<std::string> keys;
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel
    {
      std::set<std::string> local;
#pragma omp for schedule(static)
      for (long long mask = 0; mask < (long long)total; ++mask) {
        std::string key = classify_mask(n, (std::uint64_t)mask, slots);
        if (!key.empty()) local.insert(std::move(key));
      }
#pragma omp critical
      keys.merge(local);
    }
#else
    parallel = false;
#endif
  }
  if (!parallel) {
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      std::string key = classify_mask(n, mask, slots);
      if (!key.empty()) keys.insert(std::move(key));
    }
  }
  std::vector<FinPoset> out;
  out.reserve(keys.size());
  for (const auto& key : keys) out.push_back(FinPoset::from_canonical_key(key));
  return out;
}

AgreementReport ultrahomogeneity_agreement(int max_n, bool parallel) {
  AgreementReport report;
  for (int n = 1; n <= max_n; ++n) {
    auto classes = all_poset_classes(n, parallel);
    report.classes_checked += (long long)classes.size();
    std::vector<std::string> bad(classes.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (long long i = 0; i < (long long)classes.size(); ++i) {
      bool direct = is_ultrahomogeneous(classes[i]).ultrahomogeneous;
      bool ext = extension_property(classes[i]).ultrahomogeneous;
      if (direct != ext) bad[i] = classes[i].canonical_key();
    }
    for (auto& key : bad)
      if (!key.empty()) report.mismatches.push_back(std::move(key));
  }
  std::sort(report.mismatches.begin(), report.mismatches.end());
  return report;
}

}  // namespace uhpo::core
