#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fellstab/linalg.hpp"

namespace fellstab {

using ArrowId = int;
using UnitId = int;
inline constexpr ArrowId kNoArrow = -1;

struct Violation {
  std::string axiom;
  std::string witness;
  double residual = 0.0;
};

/// Collected axiom violations; empty means valid.
struct ValidationReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
  bool has(std::string_view axiom) const;
  void add(std::string axiom, std::string witness, double residual = 0.0);
  void append(const ValidationReport& other);
  std::string to_text() const;
};

/// Finite groupoid given by explicit tables. Arrow and unit identifiers are
/// indices; names are kept for interchange and reports. The Haar system is
/// counting measure on the fibres r^{-1}(x).
class FiniteGroupoid {
 public:
  FiniteGroupoid() = default;
  /// `compose` is a row-major num_arrows x num_arrows table with kNoArrow
  /// where the product is undefined.
  FiniteGroupoid(std::vector<std::string> unit_names, std::vector<std::string> arrow_names,
                 std::vector<UnitId> range, std::vector<UnitId> source,
                 std::vector<ArrowId> compose, std::vector<ArrowId> inverse,
                 std::vector<ArrowId> unit_arrow);

  int num_units() const { return static_cast<int>(unit_names_.size()); }
  int num_arrows() const { return static_cast<int>(arrow_names_.size()); }

  const std::string& unit_name(UnitId x) const { return unit_names_[x]; }
  const std::string& arrow_name(ArrowId g) const { return arrow_names_[g]; }
  std::optional<UnitId> find_unit(std::string_view name) const;
  std::optional<ArrowId> find_arrow(std::string_view name) const;

  UnitId range(ArrowId g) const { return range_[g]; }
  UnitId source(ArrowId g) const { return source_[g]; }
  ArrowId inverse(ArrowId g) const { return inverse_[g]; }
  ArrowId unit_arrow(UnitId x) const { return unit_arrow_[x]; }
  bool is_unit_arrow(ArrowId g) const { return unit_arrow_[range_[g]] == g && range_[g] == source_[g]; }

  bool composable(ArrowId g, ArrowId h) const { return source_[g] == range_[h]; }
  /// Table lookup; kNoArrow when undefined.
  ArrowId compose(ArrowId g, ArrowId h) const { return compose_[index(g, h)]; }
  void set_compose(ArrowId g, ArrowId h, ArrowId gh) { compose_[index(g, h)] = gh; }

  /// G^x = r^{-1}(x), ascending.
  const std::vector<ArrowId>& arrows_with_range(UnitId x) const { return with_range_[x]; }
  /// G_x = s^{-1}(x), ascending.
  const std::vector<ArrowId>& arrows_with_source(UnitId x) const { return with_source_[x]; }

 private:
  std::size_t index(ArrowId g, ArrowId h) const {
    return static_cast<std::size_t>(g) * arrow_names_.size() + static_cast<std::size_t>(h);
  }

  std::vector<std::string> unit_names_;
  std::vector<std::string> arrow_names_;
  std::vector<UnitId> range_, source_;
  std::vector<ArrowId> compose_, inverse_, unit_arrow_;
  std::vector<std::vector<ArrowId>> with_range_, with_source_;
};

ValidationReport validate_groupoid(const FiniteGroupoid& g, Exec exec = Exec::parallel);

/// Partition of the units into orbits, blocks ordered by smallest unit.
std::vector<std::vector<UnitId>> orbits(const FiniteGroupoid& g);

struct IsotropyGroup {
  UnitId unit = 0;
  std::vector<ArrowId> elements;               // ascending
  std::vector<std::vector<int>> multiplication;  // indices into elements
  int identity = 0;
};

IsotropyGroup isotropy(const FiniteGroupoid& g, UnitId x);

/// Left translation by every arrow is a bijection G^{s(g)} -> G^{r(g)}.
bool left_translation_bijective(const FiniteGroupoid& g);

/// Conjugation by some arrow x <- y maps Iso(y) isomorphically onto Iso(x).
bool isotropy_conjugate(const FiniteGroupoid& g, UnitId x, UnitId y);

// Constructors.
FiniteGroupoid pair_groupoid(int n);
/// One-unit groupoid from a group multiplication table with identity 0.
FiniteGroupoid group_groupoid(const std::vector<std::vector<int>>& table,
                              std::vector<std::string> element_names = {});
FiniteGroupoid cyclic_group(int m);
/// (Z/2)^2 with element (a,b) at index 2a+b.
FiniteGroupoid klein_four();
/// Transformation groupoid of a group (table, identity 0) acting on points;
/// action[g][x] is g.x. Arrow (g,x) has source x and range g.x.
FiniteGroupoid action_groupoid(const std::vector<std::vector<int>>& table,
                               const std::vector<std::vector<int>>& action);
FiniteGroupoid disjoint_union(const FiniteGroupoid& a, const FiniteGroupoid& b);

}  // namespace fellstab
