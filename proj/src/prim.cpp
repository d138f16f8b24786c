#include "fellstab/prim.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "fellstab/error.hpp"

namespace fellstab {

std::string to_string(const Cylinder& c) {
  if (c.path.empty()) return "Z(" + c.vertex + ")";
  std::string out = "Z(";
  for (size_t i = 0; i < c.path.size(); ++i) out += (i ? "." : "") + c.path[i];
  return out + ")";
}

CocycleAssignment untwisted(const KGraphSkeleton& lambda) {
  CocycleAssignment ca;
  const int k = lambda.rank();
  for (const auto& v : lambda.vertices())
    ca.entries.push_back({{v, {}}, make_cocycle(RatMat(k, std::vector<Rational>(k)))});
  return ca;
}

IsotropyInterior isotropy_interior(const PGraphPresentation& pg, const StrongAperiodicity& gamma_check, bool assume) {
  if (gamma_check.strongly_aperiodic == Tri::no)
    throw Error(ErrorKind::HypothesisFailed, "Gamma is not strongly aperiodic: " + gamma_check.certificate);
  if (gamma_check.strongly_aperiodic == Tri::unknown && !assume)
    throw Error(ErrorKind::HypothesisUnknown, "strong aperiodicity of Gamma is undecided at this depth");
  IsotropyInterior out{pg.h, gamma_check.strongly_aperiodic, ""};
  const int r = static_cast<int>(pg.h.basis.cols());
  out.description = "Iso° = Λ^∞ × H, H of rank " + std::to_string(r) + (r == 0 ? " (principal)" : "");
  return out;
}

namespace {

struct ResolvedCylinder {
  PathWord path;
  std::string name;
};

ResolvedCylinder resolve(const KGraphSkeleton& s, const Cylinder& c) {
  const auto v = s.find_vertex(c.vertex);
  if (!v) throw Error(ErrorKind::InvalidInput, "cylinder names unknown vertex " + c.vertex);
  std::vector<EdgeId> w;
  for (const auto& n : c.path) {
    const auto e = s.find_edge(n);
    if (!e) throw Error(ErrorKind::InvalidInput, "cylinder names unknown edge " + n);
    w.push_back(*e);
  }
  return {normalize(s, w, *v), to_string(c)};
}

// Every path of a common refining degree must extend exactly one cylinder.
void check_partition(const KGraphSkeleton& s, const std::vector<ResolvedCylinder>& cyl) {
  const int k = s.rank();
  for (VertexId v = 0; v < s.vertex_count(); ++v) {
    Degree top(k, 0);
    bool any = false;
    for (const auto& c : cyl)
      if (c.path.range == v) {
        any = true;
        for (int i = 0; i < k; ++i) top[i] = std::max(top[i], c.path.degree[i]);
      }
    if (!any) throw Error(ErrorKind::InvalidInput, "no cylinder covers vertex " + s.vertices()[v]);
    for (const auto& lam : paths_of_degree(s, v, top)) {
      int hits = 0;
      for (const auto& c : cyl)
        if (c.path.range == v && segment(s, lam, Degree(k, 0), c.path.degree) == c.path) ++hits;
      if (hits != 1)
        throw Error(ErrorKind::InvalidInput, "path " + to_string(s, lam) + " lies in " + std::to_string(hits) +
                                                 " cylinders; cylinders must partition the path space");
    }
  }
}

int find(std::vector<int>& p, int x) { return p[x] == x ? x : p[x] = find(p, p[x]); }

}  // namespace

PrimStratification stratify(const PGraphPresentation& pg, const KGraphSkeleton& lambda, const CocycleAssignment& ca) {
  std::vector<ResolvedCylinder> cyl;
  std::vector<Bicharacter> omega;
  for (const auto& [c, theta] : ca.entries) {
    cyl.push_back(resolve(lambda, c));
    if (theta.m != pg.h.k) throw Error(ErrorKind::InvalidInput, "cocycle on " + to_string(c) + " is not on Z^k");
    omega.push_back(bicharacter(restrict_cocycle(theta, pg.h)));
  }
  check_partition(lambda, cyl);

  // Cylinders share an orbit exactly when their sources have a common descendant.
  const auto reach = reachability(lambda);
  const int n = static_cast<int>(cyl.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (reach[cyl[a].path.source] & reach[cyl[b].path.source]) parent[find(parent, a)] = find(parent, b);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (find(parent, a) == find(parent, b) && !(omega[a] == omega[b]))
        throw Error(ErrorKind::InconsistentAssignment,
                    cyl[a].name + " and " + cyl[b].name + " share an orbit but carry different bicharacters");

  std::map<Bicharacter, std::vector<int>> groups;
  for (int a = 0; a < n; ++a) groups[omega[a]].push_back(a);

  PrimStratification out;
  for (const auto& [om, members] : groups) {
    Stratum st{om, {}, {}, symmetrizer(om, pg.h)};
    // Orbit classes: anchors in the same strongly connected component.
    std::vector<std::vector<std::string>> classes;
    std::vector<int> rep;
    for (int a : members) {
      st.cylinders.push_back(cyl[a].name);
      const VertexId s = cyl[a].path.source;
      size_t j = 0;
      for (; j < rep.size(); ++j) {
        const VertexId t = cyl[rep[j]].path.source;
        if ((reach[s] >> t & 1) && (reach[t] >> s & 1)) break;
      }
      if (j == rep.size()) {
        rep.push_back(a);
        classes.emplace_back();
      }
      classes[j].push_back(cyl[a].name);
    }
    st.orbit_classes = std::move(classes);
    out.strata.push_back(std::move(st));
  }
  return out;
}

IdealLatticeReport gauge_invariant_ideals(const KGraphSkeleton& s, const SearchLimits& lim, Exec exec) {
  IdealLatticeReport out;
  out.hereditary = saturated_hereditary_sets(s);
  out.strongly_aperiodic = strong_aperiodicity(s, lim, exec).strongly_aperiodic;
  out.label = out.strongly_aperiodic == Tri::yes ? "all ideals" : "gauge-invariant ideals";
  return out;
}

PrimReport run_prim(const PGraphPresentation& pg, const std::optional<CocycleAssignment>& ca, const SearchLimits& lim,
                    bool assume, Exec exec) {
  PrimReport rep;
  rep.gamma_check = strong_aperiodicity(pg.gamma, lim, exec);
  if (rep.gamma_check.contradictory)
    throw Error(ErrorKind::HypothesisUnknown, "strong aperiodicity checks disagree; raise the depth");
  rep.interior = isotropy_interior(pg, rep.gamma_check, assume);
  rep.lambda = pullback(pg);
  rep.strata = stratify(pg, rep.lambda, ca ? *ca : untwisted(rep.lambda));
  rep.ideals = gauge_invariant_ideals(rep.lambda, lim, exec);
  return rep;
}

}  // namespace fellstab
