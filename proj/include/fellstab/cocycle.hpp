#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "fellstab/integer_lattice.hpp"

namespace fellstab {

using Rational = boost::rational<std::int64_t>;
using RatMat = std::vector<std::vector<Rational>>;

/// Accepts "p/q" or an integer; anything else is rejected with IrrationalPhase.
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& r);
/// Representative in [0, 1).
Rational mod_one(const Rational& r);

/// sigma(s, t) = exp(2 pi i s^T theta t) on Z^m, theta taken mod 1.
struct RationalCocycle {
  int m = 0;
  RatMat theta;
};

RationalCocycle make_cocycle(RatMat theta);

/// omega = theta - theta^T mod 1.
struct Bicharacter {
  int m = 0;
  RatMat omega;
  bool operator==(const Bicharacter& o) const { return omega == o.omega; }
  bool operator<(const Bicharacter& o) const;
  /// Least common denominator of the entries.
  std::int64_t denominator() const;
  bool trivial() const;
};

Bicharacter bicharacter(const RationalCocycle& c);

/// theta_H = B^T theta B for H's basis B.
RationalCocycle restrict_cocycle(const RationalCocycle& c, const Subgroup& h);

struct Symmetrizer {
  Subgroup subgroup;   // Z(omega) inside the ambient Z^k
  IntMat h_coords;     // basis in coordinates of H's basis
  std::int64_t index = 1;  // [H : Z(omega)]
  DualShape dual;
};

/// Z(omega) = {h in H : omega(h, b) = 0 mod 1 for every basis element b};
/// omega is given in coordinates of H's basis. H's basis must be independent.
Symmetrizer symmetrizer(const Bicharacter& omega, const Subgroup& h);

/// Direct check of the defining condition.
bool in_symmetrizer(const Bicharacter& omega, const IntVec& h_coords);

}  // namespace fellstab
