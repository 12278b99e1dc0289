#include "uhpo/generic.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace uhpo::gen {

using qset::QSetPtr;

namespace {

std::string join_rats(const std::vector<Rat>& v) {
  std::string s;
  for (const auto& q : v) {
    if (!s.empty()) s += ",";
    s += rat_to_string(q);
  }
  return s;
}

std::vector<Rat> split_rats(const std::string& s) {
  std::vector<Rat> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(rat_from_string(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(rat_from_string(cur));
  std::sort(out.begin(), out.end());
  return out;
}

bool triple_disjoint(const RatTriple& t) {
  std::set<Rat> seen;
  for (const auto* part : {&t.L, &t.G, &t.U})
    for (const auto& q : *part)
      if (!seen.insert(q).second) return false;
  return true;
}

}  // namespace

std::string RatTriple::to_string() const {
  return "<" + join_rats(L) + "|" + join_rats(G) + "|" + join_rats(U) + ">";
}

RatTriple RatTriple::from_string(const std::string& s) {
  if (s.size() < 4 || s.front() != '<' || s.back() != '>')
    throw std::invalid_argument("bad triple literal: " + s);
  std::string body = s.substr(1, s.size() - 2);
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : body) {
    if (ch == '|') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 3) throw std::invalid_argument("bad triple literal: " + s);
  RatTriple t;
  t.L = split_rats(parts[0]);
  t.G = split_rats(parts[1]);
  t.U = split_rats(parts[2]);
  return t;
}

std::optional<std::size_t> Condition::index_of(const Rat& q) const {
  for (std::size_t i = 0; i < pts_.size(); ++i)
    if (pts_[i] == q) return i;
  return std::nullopt;
}

bool Condition::rel(const Rat& a, const Rat& b) const {
  auto ia = index_of(a), ib = index_of(b);
  if (!ia || !ib) throw std::invalid_argument("point not in condition");
  return rel_[*ia][*ib];
}

bool Condition::extends(const Condition& weaker) const {
  for (std::size_t i = 0; i < weaker.size(); ++i) {
    auto mi = index_of(weaker.pts_[i]);
    if (!mi) return false;
    for (std::size_t j = 0; j < weaker.size(); ++j) {
      auto mj = index_of(weaker.pts_[j]);
      if (!mj) return false;
      if (rel_[*mi][*mj] != weaker.rel_[i][j]) return false;
    }
  }
  return true;
}

void Condition::validate() const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    if (rel_[i][i]) throw std::logic_error("condition relation reflexive");
    for (std::size_t j = 0; j < n; ++j) {
      if (!rel_[i][j]) continue;
      if (rel_[j][i]) throw std::logic_error("condition relation symmetric");
      if (!(pts_[i] < pts_[j]))
        throw std::logic_error("condition relation not <_Q-increasing");
      for (std::size_t l = 0; l < n; ++l)
        if (rel_[j][l] && !rel_[i][l])
          throw std::logic_error("condition relation not transitive");
    }
  }
}

core::FinPoset Condition::to_poset() const { return to_poset(pts_); }

core::FinPoset Condition::to_poset(const std::vector<Rat>& subset) const {
  std::vector<Rat> sorted = subset;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::string> labels;
  std::vector<std::size_t> idx;
  for (const auto& q : sorted) {
    auto i = index_of(q);
    if (!i) throw std::invalid_argument("snapshot point not in condition");
    labels.push_back(rat_to_string(q));
    idx.push_back(*i);
  }
  std::vector<std::pair<std::string, std::string>> lt;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b)
      if (rel_[idx[a]][idx[b]]) lt.emplace_back(labels[a], labels[b]);
  return core::FinPoset(labels, lt);
}

nlohmann::json Condition::to_json() const {
  nlohmann::json j = to_poset().to_json();
  std::vector<std::string> intro;
  for (const auto& q : pts_) intro.push_back(rat_to_string(q));
  j["introduction_order"] = intro;
  return j;
}

Condition extend_with_point(const Condition& p, const Rat& q) {
  if (p.has(q)) return p;
  Condition r = p;
  r.pts_.push_back(q);
  for (auto& row : r.rel_) row.push_back(false);
  r.rel_.emplace_back(r.pts_.size(), false);
  return r;
}

namespace {

bool triple_in_c(const Condition& p, const RatTriple& t) {
  for (const auto& l : t.L)
    for (const auto& g : t.G)
      if (!p.rel(l, g)) return false;
  for (const auto& u : t.U) {
    for (const auto& l : t.L)
      if (p.rel(u, l)) return false;
    for (const auto& g : t.G)
      if (p.rel(g, u)) return false;
  }
  return true;
}

bool realizes(const Condition& p, std::size_t c, const RatTriple& t) {
  const Rat& q = p.points()[c];
  for (const auto* part : {&t.L, &t.G, &t.U})
    if (std::binary_search(part->begin(), part->end(), q)) return false;
  for (const auto& l : t.L)
    if (!p.rel(*p.index_of(l), c)) return false;
  for (const auto& g : t.G)
    if (!p.rel(c, *p.index_of(g))) return false;
  for (const auto& u : t.U) {
    std::size_t iu = *p.index_of(u);
    if (iu == c || p.rel(iu, c) || p.rel(c, iu)) return false;
  }
  return true;
}

std::optional<std::size_t> find_realizer(const Condition& p, const RatTriple& t) {
  for (std::size_t c = 0; c < p.size(); ++c)
    if (realizes(p, c, t)) return c;
  return std::nullopt;
}

Rat max_point(const RatTriple& t) {
  // <_Q maximum of L u G u U; the triple must be nonempty
  std::optional<Rat> m;
  for (const auto* part : {&t.L, &t.G, &t.U})
    for (const auto& q : *part)
      if (!m || *m < q) m = q;
  return *m;
}

}  // namespace

bool in_dense_set(const Condition& p, const RatTriple& t, int m, const QSetPtr& J, int k) {
  if (t.empty()) return true;
  for (const auto* part : {&t.L, &t.G, &t.U})
    for (const auto& q : *part)
      if (!p.has(q)) return false;
  if (!triple_in_c(p, t)) return true;
  Rat mt = max_point(t);
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (!realizes(p, c, t)) continue;
    const Rat& q = p.points()[c];
    if (!qset::member(q, J, k)) continue;
    if (t.G.empty() && !(mt < q && q < mt + Rat(1, m))) continue;
    return true;
  }
  return false;
}

Condition extend_meet_triple(const Condition& p, const RatTriple& t, int m,
                             const QSetPtr& J, int k) {
  if (!triple_disjoint(t)) throw std::invalid_argument("triple parts overlap");
  if (m < 1) throw std::invalid_argument("m must be positive");
  Condition r = p;
  for (const auto* part : {&t.L, &t.G, &t.U})
    for (const auto& q : *part) r = extend_with_point(r, q);
  if (t.empty()) return r;
  if (!triple_in_c(r, t)) return r;  // already in the dense set, first disjunct
  if (in_dense_set(r, t, m, J, k)) return r;

  Cut lo, hi;
  if (!t.G.empty()) {
    lo = t.L.empty() ? Cut::neg_inf() : Cut(t.L.back());
    hi = Cut(t.G.front());
  } else {
    Rat mt = max_point(t);
    lo = Cut(mt);
    hi = Cut(mt + Rat(1, m));
  }
  auto fresh = qset::witness_in(qset::q_diff(J, qset::q_finite(r.points())), lo, hi, k);
  if (!fresh) throw std::logic_error("dense class exhausted: no fresh realizer");
  const Rat q = *fresh;

  std::size_t nq = r.size();
  r = extend_with_point(r, q);
  auto at_or_below_some = [&](std::size_t x, const std::vector<Rat>& part) {
    for (const auto& b : part) {
      std::size_t ib = *r.index_of(b);
      if (x == ib || r.rel_[x][ib]) return true;
    }
    return false;
  };
  auto at_or_above_some = [&](std::size_t x, const std::vector<Rat>& part) {
    for (const auto& b : part) {
      std::size_t ib = *r.index_of(b);
      if (x == ib || r.rel_[ib][x]) return true;
    }
    return false;
  };
  for (std::size_t x = 0; x < nq; ++x) {
    if (at_or_below_some(x, t.L)) r.rel_[x][nq] = true;          // below-closure through L
    if (!t.G.empty() && at_or_above_some(x, t.G)) r.rel_[nq][x] = true;  // above-closure through G
  }

  // The proof's (ii)/(iii) checks run as assertions, plus the extension law.
  r.validate();
  if (!r.extends(p)) throw std::logic_error("extension relation violated");
  if (!realizes(r, nq, t)) throw std::logic_error("fresh point fails (S1)-(S3)");
  return r;
}

CopyResult check_no_max_copy(const QSetPtr& e, int k) {
  qset::Canon c = qset::canonicalize(e, k);
  if (c.empty()) return {Verdict::Inconclusive, std::nullopt, "empty expression"};
  auto mx = qset::max_of(e, k);
  if (!mx) return {Verdict::Inconclusive, std::nullopt, "no maximum"};
  RatTriple witness;
  witness.L.push_back(*mx);
  return {Verdict::NotCopy, witness,
          "maximum " + rat_to_string(*mx) + " obstructs every realizer of " + witness.to_string()};
}

GenericOrder::GenericOrder(Config cfg) : cfg_(cfg) {
  if (cfg_.modulus < 1 || cfg_.j_class < 0 || cfg_.j_class >= cfg_.modulus)
    throw std::invalid_argument("bad generic order config");
  log_.push_back("config " + std::to_string(cfg_.modulus) + " " + std::to_string(cfg_.j_class));
}

QSetPtr GenericOrder::J() const { return qset::q_class(cfg_.j_class); }

core::Rel GenericOrder::query(const Rat& a, const Rat& b) {
  std::lock_guard<std::mutex> lock(mu_);
  ensure_point_locked(a);
  ensure_point_locked(b);
  if (a == b) return core::Rel::Equal;
  if (cond_.rel(a, b)) return core::Rel::Below;
  if (cond_.rel(b, a)) return core::Rel::Above;
  return core::Rel::Incomparable;
}

void GenericOrder::ensure_point(const Rat& q) {
  std::lock_guard<std::mutex> lock(mu_);
  ensure_point_locked(q);
}

void GenericOrder::ensure_triple(const RatTriple& t, int m) {
  std::lock_guard<std::mutex> lock(mu_);
  ensure_triple_locked(t, m);
}

void GenericOrder::ensure_point_locked(const Rat& q) {
  if (cond_.has(q)) return;
  cond_ = extend_with_point(cond_, q);
  log_.push_back("point " + rat_to_string(q));
}

void GenericOrder::ensure_triple_locked(const RatTriple& t, int m) {
  if (in_dense_set(cond_, t, m, J(), cfg_.modulus)) return;
  cond_ = extend_meet_triple(cond_, t, m, J(), cfg_.modulus);
  log_.push_back("triple " + t.to_string() + " " + std::to_string(m));
}

void GenericOrder::refill_tasks() {
  const int w = next_weight_++;
  if (w > 18) throw std::logic_error("schedule weight cap exceeded");
  for (int i_max = 0; i_max + 3 <= w; ++i_max) {
    for (int sigma = 1; sigma <= i_max + 1 && i_max + 1 + sigma + 1 <= w; ++sigma) {
      int m = w - (i_max + 1) - sigma;
      // supports: sigma-subsets of {0..i_max} containing i_max, lex order
      std::vector<int> comb(sigma - 1);
      std::function<void(int, int)> rec = [&](int start, int picked) {
        if (picked == sigma - 1) {
          std::vector<int> support(comb.begin(), comb.begin() + picked);
          support.push_back(i_max);
          int total = 1;
          for (int i = 0; i < sigma; ++i) total *= 3;
          for (int assign = 0; assign < total; ++assign)
            pending_.push_back({support, assign, m});
          return;
        }
        for (int v = start; v < i_max; ++v) {
          comb[picked] = v;
          rec(v + 1, picked + 1);
        }
      };
      rec(0, 0);
    }
  }
}

RatTriple GenericOrder::task_triple(const TripleTask& task) const {
  RatTriple t;
  int code = task.assign;
  for (int idx : task.support) {
    const Rat& q = cond_.points()[idx];
    switch (code % 3) {
      case 0: t.L.push_back(q); break;
      case 1: t.G.push_back(q); break;
      default: t.U.push_back(q); break;
    }
    code /= 3;
  }
  std::sort(t.L.begin(), t.L.end());
  std::sort(t.G.begin(), t.G.end());
  std::sort(t.U.begin(), t.U.end());
  return t;
}

long long GenericOrder::advance(long long steps) {
  std::lock_guard<std::mutex> lock(mu_);
  long long done = advance_locked(steps);
  log_.push_back("advance " + std::to_string(steps));
  return done;
}

long long GenericOrder::advance_locked(long long steps) {
  for (long long s = 0; s < steps; ++s) {
    if (step_ % 2 == 0) {
      cond_ = extend_with_point(cond_, rho_.at(next_point_++));
    } else {
      while (pending_.empty()) refill_tasks();
      const TripleTask& task = pending_.front();
      if (task.support.back() < (int)cond_.size()) {
        RatTriple t = task_triple(task);
        if (!in_dense_set(cond_, t, task.m, J(), cfg_.modulus))
          cond_ = extend_meet_triple(cond_, t, task.m, J(), cfg_.modulus);
        pending_.pop_front();
      }
      // otherwise the task waits for its points; the step still counts
    }
    ++step_;
  }
  return steps;
}

SaturateReport GenericOrder::saturate(const std::vector<Rat>& points, int size_bound,
                                      long long budget) {
  std::lock_guard<std::mutex> lock(mu_);
  return saturate_locked(points, size_bound, budget);
}

SaturateReport GenericOrder::saturate_locked(const std::vector<Rat>& points, int size_bound,
                                             long long budget) {
  SaturateReport rep;
  std::vector<Rat> pts = points;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  for (const auto& q : pts) {
    if (rep.steps >= budget) {
      rep.budget_exhausted = true;
      break;
    }
    ++rep.steps;
    ensure_point_locked(q);
  }

  const int n = (int)pts.size();
  std::vector<int> pick;
  std::function<bool(int, int)> supports = [&](int start, int size) -> bool {
    if ((int)pick.size() == size) {
      int total = 1;
      for (int i = 0; i < size; ++i) total *= 3;
      for (int assign = 0; assign < total; ++assign) {
        RatTriple t;
        int code = assign;
        for (int i = 0; i < size; ++i) {
          switch (code % 3) {
            case 0: t.L.push_back(pts[pick[i]]); break;
            case 1: t.G.push_back(pts[pick[i]]); break;
            default: t.U.push_back(pts[pick[i]]); break;
          }
          code /= 3;
        }
        if (rep.steps >= budget) {
          rep.budget_exhausted = true;
          rep.unrealized.push_back(t);
          return false;
        }
        ++rep.steps;
        if (!triple_in_c(cond_, t)) {
          ++rep.left_c;
          continue;
        }
        if (!find_realizer(cond_, t)) ensure_triple_locked(t, 1);
        if (find_realizer(cond_, t))
          ++rep.realized;
        else
          rep.unrealized.push_back(t);
      }
      return true;
    }
    for (int v = start; v < n; ++v) {
      pick.push_back(v);
      bool cont = supports(v + 1, size);
      pick.pop_back();
      if (!cont) return false;
    }
    return true;
  };
  bool done = !rep.budget_exhausted;
  for (int size = 1; size <= size_bound && done; ++size) done = supports(0, size);

  rep.snapshot = cond_.to_poset();
  rep.introduced = cond_.points();
  return rep;
}

std::optional<Rat> GenericOrder::realizer_of(const RatTriple& t) {
  std::lock_guard<std::mutex> lock(mu_);
  if (auto c = find_realizer(cond_, t)) return cond_.points()[*c];
  return std::nullopt;
}

std::vector<Rat> embed_poset(GenericOrder& g, const core::FinPoset& p) {
  std::vector<Rat> images;
  for (std::size_t i = 0; i < p.size(); ++i) {
    RatTriple t;
    for (std::size_t j = 0; j < i; ++j) {
      if (p.less(j, i))
        t.L.push_back(images[j]);
      else if (p.less(i, j))
        t.G.push_back(images[j]);
      else
        t.U.push_back(images[j]);
    }
    std::sort(t.L.begin(), t.L.end());
    std::sort(t.G.begin(), t.G.end());
    std::sort(t.U.begin(), t.U.end());
    g.ensure_triple(t, 1);
    auto r = g.realizer_of(t);
    if (!r && t.empty()) {
      g.ensure_point(Rat(0));  // the empty type needs some point to realize it
      r = g.realizer_of(t);
    }
    if (!r) throw std::logic_error("extension property failed to produce a realizer");
    images.push_back(*r);
  }
  return images;
}

CopyResult copy_of_D_symbolic(const QSetPtr& e, int j_class, int k) {
  qset::Canon c = qset::canonicalize(e, k);
  if (c.empty()) return {Verdict::NotCopy, std::nullopt, "empty set"};
  CopyResult maxcheck = check_no_max_copy(e, k);
  if (maxcheck.verdict == Verdict::NotCopy) return maxcheck;

  // Claim 5.12(a) sandwich: (-inf, x) n J inside E inside (-inf, x) n Q
  Cut x = qset::sup_of(c);
  if (qset::subset_of(qset::q_intersect(qset::q_class(j_class),
                                        qset::q_interval(Cut::neg_inf(), x)),
                      e, k))
    return {Verdict::Copy, std::nullopt, "sandwich below " + x.to_string()};
  return {Verdict::Inconclusive, std::nullopt, "outside the decidable fragment"};
}

CopyResult GenericOrder::is_copy_of_D(const QSetPtr& e, int size_bound, long long budget) {
  std::lock_guard<std::mutex> lock(mu_);
  const int k = cfg_.modulus;
  CopyResult symbolic = copy_of_D_symbolic(e, cfg_.j_class, k);
  if (symbolic.verdict != Verdict::Inconclusive) return symbolic;

  // Bounded probe: realize triples over a small internal sample.
  std::vector<Rat> sample;
  QSetPtr rest = e;
  for (int i = 0; i < 6; ++i) {
    auto w = qset::witness_in(rest, Cut::neg_inf(), Cut::pos_inf(), k);
    if (!w) break;
    sample.push_back(*w);
    rest = qset::q_diff(rest, qset::q_point(*w));
  }
  for (const auto& q : sample) ensure_point_locked(q);
  long long steps = 0, inside = 0, total = 0;
  std::sort(sample.begin(), sample.end());
  const int n = (int)sample.size();
  std::vector<int> pick;
  std::function<void(int, int)> rec = [&](int start, int size) {
    if ((int)pick.size() == size) {
      int pow3 = 1;
      for (int i = 0; i < size; ++i) pow3 *= 3;
      for (int assign = 0; assign < pow3 && steps < budget; ++assign) {
        RatTriple t;
        int code = assign;
        for (int i = 0; i < size; ++i) {
          switch (code % 3) {
            case 0: t.L.push_back(sample[pick[i]]); break;
            case 1: t.G.push_back(sample[pick[i]]); break;
            default: t.U.push_back(sample[pick[i]]); break;
          }
          code /= 3;
        }
        if (!triple_in_c(cond_, t)) continue;
        ++total;
        ++steps;
        auto has_inside = [&]() {
          for (std::size_t ci = 0; ci < cond_.size(); ++ci)
            if (realizes(cond_, ci, t) && qset::member(cond_.points()[ci], e, k)) return true;
          return false;
        };
        if (!has_inside()) ensure_triple_locked(t, 1);
        if (has_inside()) ++inside;
      }
      return;
    }
    for (int v = start; v < n && steps < budget; ++v) {
      pick.push_back(v);
      rec(v + 1, size);
      pick.pop_back();
    }
  };
  for (int size = 1; size <= size_bound; ++size) rec(0, size);
  std::ostringstream os;
  os << "probe: " << inside << "/" << total << " sampled triples realized inside the set";
  return {Verdict::Inconclusive, std::nullopt, os.str()};
}

Condition GenericOrder::current() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cond_;
}

long long GenericOrder::step_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return step_;
}

nlohmann::json GenericOrder::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  nlohmann::json j;
  j["step"] = step_;
  std::vector<std::string> intro;
  for (const auto& q : cond_.points()) intro.push_back(rat_to_string(q));
  j["introduced_points"] = intro;
  j["condition"] = cond_.to_json();
  return j;
}

std::string GenericOrder::replay_log() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::string out;
  for (const auto& line : log_) out += line + "\n";
  return out;
}

GenericOrder GenericOrder::from_replay(const std::string& log) {
  std::istringstream in(log);
  std::string line;
  std::optional<GenericOrder> g;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string op;
    ls >> op;
    if (op == "config") {
      Config cfg;
      ls >> cfg.modulus >> cfg.j_class;
      g.emplace(cfg);
    } else if (!g) {
      throw std::invalid_argument("replay log must start with a config line");
    } else if (op == "point") {
      std::string q;
      ls >> q;
      g->ensure_point(rat_from_string(q));
    } else if (op == "triple") {
      std::string t;
      int m;
      ls >> t >> m;
      g->ensure_triple(RatTriple::from_string(t), m);
    } else if (op == "advance") {
      long long n;
      ls >> n;
      g->advance(n);
    } else {
      throw std::invalid_argument("unknown replay op: " + op);
    }
  }
  if (!g) throw std::invalid_argument("empty replay log");
  return std::move(*g);
}

}  // namespace uhpo::gen
