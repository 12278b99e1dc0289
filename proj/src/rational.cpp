#include "uhpo/rational.hpp"

#include <stdexcept>

namespace uhpo {

std::string rat_to_string(const Rat& q) {
  std::string s = numerator(q).str();
  if (denominator(q) != 1) {
    s += "/";
    s += denominator(q).str();
  }
  return s;
}

Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = s.find('/');
  auto check_int = [&](const std::string& t) {
    if (t.empty()) throw std::invalid_argument("bad rational literal: " + s);
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) throw std::invalid_argument("bad rational literal: " + s);
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9')
        throw std::invalid_argument("bad rational literal: " + s);
  };
  if (slash == std::string::npos) {
    check_int(s);
    return Rat(Int(s));
  }
  std::string num = s.substr(0, slash), den = s.substr(slash + 1);
  check_int(num);
  check_int(den);
  Int d(den);
  if (d == 0) throw std::invalid_argument("zero denominator: " + s);
  return Rat(Int(num), d);
}

int residue_class(const Rat& q, int k) {
  if (k < 1) throw std::invalid_argument("modulus must be positive");
  Int r = numerator(q) % k;
  if (r < 0) r += k;
  return static_cast<int>(r);
}

std::vector<Rat> rationals_of_height(long long h) {
  std::vector<Rat> out;
  if (h < 1) return out;
  if (h == 1) {
    out.push_back(Rat(0));
    return out;
  }
  for (long long p = -(h - 1); p <= h - 1; ++p) {
    if (p == 0) continue;  // 0 = 0/1 appears only at height 1
    long long d = h - (p < 0 ? -p : p);
    if (gcd(Int(p < 0 ? -p : p), Int(d)) != 1) continue;
    out.push_back(Rat(Int(p), Int(d)));
  }
  return out;
}

const Rat& RationalEnumerator::at(std::size_t i) {
  while (memo_.size() <= i) {
    auto batch = rationals_of_height(next_height_++);
    memo_.insert(memo_.end(), batch.begin(), batch.end());
  }
  return memo_[i];
}

std::vector<Rat> first_rationals(std::size_t n) {
  RationalEnumerator e;
  std::vector<Rat> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(e.at(i));
  return out;
}

}  // namespace uhpo
