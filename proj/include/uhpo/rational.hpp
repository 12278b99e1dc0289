#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace uhpo {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat make_rat(long long num, long long den = 1) {
  return Rat(Int(num), Int(den));
}

/// Enumeration height of q = p/d in lowest terms: |p| + d.
inline Int rat_height(const Rat& q) {
  return abs(numerator(q)) + denominator(q);
}

std::string rat_to_string(const Rat& q);

/// Parses "p" or "p/q" (optional leading '-'). Throws std::invalid_argument.
Rat rat_from_string(const std::string& s);

/// Residue class of q: numerator (lowest terms, positive denominator) mod k,
/// normalized into [0, k). The classes partition the rationals and each is
/// dense in the reals.
int residue_class(const Rat& q, int k);

/// All rationals of height h, ordered by numerator ascending. Within one
/// height the denominator is determined by the numerator, so this order is
/// total.
std::vector<Rat> rationals_of_height(long long h);

/// q_0, q_1, ...: the fixed global enumeration of the rationals, ordered by
/// (height, numerator). Memoized random access.
class RationalEnumerator {
 public:
  const Rat& at(std::size_t i);

 private:
  std::vector<Rat> memo_;
  long long next_height_ = 1;
};

/// First n rationals of the global enumeration.
std::vector<Rat> first_rationals(std::size_t n);

}  // namespace uhpo
