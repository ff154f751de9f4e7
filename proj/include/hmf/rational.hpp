#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmf {

using Int = mpz_class;
using Rat = mpq_class;

// Parses "p/q" or "p" (decimal strings) into an exact rational.
inline Rat parse_rat(const std::string& s) {
  Rat q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  q.canonicalize();
  return q;
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline Int rat_num(const Rat& q) { return q.get_num(); }
inline Int rat_den(const Rat& q) { return q.get_den(); }

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

inline double to_double(const Rat& q) { return q.get_d(); }

inline Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// Round to nearest integer, ties toward +infinity.
inline Int round_rat(const Rat& q) {
  Rat shifted = q + Rat(1, 2);
  return floor_div(shifted.get_num(), shifted.get_den());
}

}  // namespace hmf
