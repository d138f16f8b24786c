#pragma once

#include <string>
#include <vector>

#include "fellstab/cocycle.hpp"
#include "fellstab/kgraph.hpp"

namespace fellstab {

/// Z(lambda) for a path of the pullback graph, or Z(v) when the path is empty.
struct Cylinder {
  std::string vertex;
  std::vector<std::string> path;  // edge names of the pullback graph
};

std::string to_string(const Cylinder& c);

/// Locally constant cocycle data: theta on Z^k per cylinder.
struct CocycleAssignment {
  std::vector<std::pair<Cylinder, RationalCocycle>> entries;
};

CocycleAssignment untwisted(const KGraphSkeleton& lambda);

struct IsotropyInterior {
  Subgroup h;
  Tri hypothesis = Tri::unknown;  // strong aperiodicity of Gamma
  std::string description;
};

/// Throws HypothesisFailed when Gamma is certified periodic, HypothesisUnknown
/// when undecided unless `assume` is set.
IsotropyInterior isotropy_interior(const PGraphPresentation& pg, const StrongAperiodicity& gamma_check,
                                   bool assume = false);

struct Stratum {
  Bicharacter omega;
  std::vector<std::string> cylinders;
  std::vector<std::vector<std::string>> orbit_classes;
  Symmetrizer symmetrizer;
};

struct PrimStratification {
  std::vector<Stratum> strata;  // sorted by omega
};

/// Throws InvalidInput when the cylinders do not partition the path space and
/// InconsistentAssignment when cylinders sharing an orbit carry different omega.
PrimStratification stratify(const PGraphPresentation& pg, const KGraphSkeleton& lambda, const CocycleAssignment& ca);

struct IdealLatticeReport {
  std::vector<VertexSet> hereditary;  // saturated hereditary sets, one per ideal
  Tri strongly_aperiodic = Tri::unknown;
  std::string label;  // "all ideals" or "gauge-invariant ideals"
};

IdealLatticeReport gauge_invariant_ideals(const KGraphSkeleton& s, const SearchLimits& lim = {},
                                          Exec exec = Exec::parallel);

struct PrimReport {
  StrongAperiodicity gamma_check;
  KGraphSkeleton lambda;
  IsotropyInterior interior;
  PrimStratification strata;
  IdealLatticeReport ideals;
};

/// Gate on Gamma, pull back, stratify, then the ideal lattice of the pullback.
PrimReport run_prim(const PGraphPresentation& pg, const std::optional<CocycleAssignment>& ca,
                    const SearchLimits& lim = {}, bool assume = false, Exec exec = Exec::parallel);

}  // namespace fellstab
