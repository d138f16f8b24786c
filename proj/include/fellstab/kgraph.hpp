#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fellstab/groupoid.hpp"
#include "fellstab/integer_lattice.hpp"
#include "fellstab/linalg.hpp"

namespace fellstab {

using VertexId = int;
using EdgeId = int;
using Degree = std::vector<int>;
using VertexSet = std::uint64_t;  // bitmask, vertex cap 64

constexpr int kVertexCap = 64;
constexpr int kDefaultDepth = 6;

struct KEdge {
  std::string name;
  int color = 0;  // 0-based
  VertexId range = 0, source = 0;
};

/// Factorization square f g = g' f' with color(f) = color(f') < color(g) = color(g').
/// Composition is range-first: s(f) = r(g).
struct KSquare {
  EdgeId f, g, g2, f2;
};

class KGraphSkeleton {
 public:
  KGraphSkeleton() = default;
  KGraphSkeleton(int k, std::vector<std::string> vertices, std::vector<KEdge> edges, std::vector<KSquare> squares);

  int rank() const { return k_; }
  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<KEdge>& edges() const { return edges_; }
  const std::vector<KSquare>& squares() const { return squares_; }
  const KEdge& edge(EdgeId e) const { return edges_[e]; }
  std::optional<VertexId> find_vertex(const std::string& name) const;
  std::optional<EdgeId> find_edge(const std::string& name) const;

  /// Edges of color c with range v.
  const std::vector<EdgeId>& in_edges(VertexId v, int c) const { return in_[v * k_ + c]; }
  /// Square lookup in both directions; nullopt when the pair has no square.
  std::optional<std::pair<EdgeId, EdgeId>> forward(EdgeId f, EdgeId g) const;
  std::optional<std::pair<EdgeId, EdgeId>> backward(EdgeId g2, EdgeId f2) const;
  /// Swap two adjacent letters of different colors through the matching square.
  std::pair<EdgeId, EdgeId> swap(EdgeId a, EdgeId b) const;

  /// Full subgraph on `keep` (vertices renumbered in order).
  KGraphSkeleton restrict(VertexSet keep) const;

 private:
  int k_ = 0;
  std::vector<std::string> vertices_;
  std::vector<KEdge> edges_;
  std::vector<KSquare> squares_;
  std::vector<std::vector<EdgeId>> in_;
  std::map<std::pair<EdgeId, EdgeId>, std::pair<EdgeId, EdgeId>> fwd_, bwd_;
};

ValidationReport validate_skeleton(const KGraphSkeleton& s);

/// Morphism stored as its normal-form word (colors nondecreasing).
struct PathWord {
  VertexId range = 0, source = 0;
  Degree degree;
  std::vector<EdgeId> edges;
  bool operator==(const PathWord&) const = default;
  bool operator<(const PathWord& o) const { return std::tie(range, edges) < std::tie(o.range, o.edges); }
};

std::string to_string(const KGraphSkeleton& s, const PathWord& p);

std::vector<PathWord> paths_of_degree(const KGraphSkeleton& s, VertexId v, const Degree& n);
std::int64_t count_paths(const KGraphSkeleton& s, VertexId v, const Degree& n);
PathWord vertex_path(const KGraphSkeleton& s, VertexId v);
/// Reorders a composable word into normal form.
PathWord normalize(const KGraphSkeleton& s, std::vector<EdgeId> word, VertexId range);
PathWord compose(const KGraphSkeleton& s, const PathWord& a, const PathWord& b);
/// Splits lambda into consecutive factors of the given degrees (summing to d(lambda)).
std::vector<PathWord> factor(const KGraphSkeleton& s, const PathWord& lambda, const std::vector<Degree>& parts);
/// lambda(p, p + m).
PathWord segment(const KGraphSkeleton& s, const PathWord& lambda, const Degree& p, const Degree& m);

// ---- P-graphs and pullbacks --------------------------------------------

/// Gamma is an N^j-graph; phi : Z^k -> Z^j has kernel H and identifies P with N^j.
struct PGraphPresentation {
  Subgroup h;
  IntMat phi;  // j x k
  KGraphSkeleton gamma;
};

/// Derives phi from H when it is omitted; throws InvalidInput if H has torsion
/// quotient or no identification with N^j exists, DegreeMismatch on negative
/// generator degrees.
PGraphPresentation make_pgraph(Subgroup h, std::optional<IntMat> phi, KGraphSkeleton gamma);

KGraphSkeleton pullback(const PGraphPresentation& pg);

// ---- infinite paths and the orbit preorder --------------------------------

/// Eventually periodic infinite path: prefix then the cycle repeated, each a
/// path of degree D*1 for some D (the cycle returns to its own range).
struct InfinitePath {
  PathWord prefix;
  PathWord cycle;
};

/// Depth-D rectangle x(0, D*1).
PathWord truncate(const KGraphSkeleton& s, const InfinitePath& x, int depth);

enum class Tri { yes, no, unknown };
std::string_view to_string(Tri t);

/// Source-ward reachability: bit w of reach[v] set when v Lambda w is nonempty.
std::vector<VertexSet> reachability(const KGraphSkeleton& s);

struct PreorderResult {
  Tri le = Tri::unknown;
  std::string certificate;
};

/// Exact for eventually periodic paths, so `le` is never unknown.
PreorderResult orbit_preorder(const KGraphSkeleton& s, const InfinitePath& x, const InfinitePath& y);

// ---- aperiodicity -----------------------------------------------------------

struct PeriodCertificate {
  VertexId vertex = 0;
  Degree p, q;
};

struct AperiodicityResult {
  Tri aperiodic = Tri::unknown;
  std::map<VertexId, PathWord> witnesses;  // per vertex, when aperiodic
  std::optional<PeriodCertificate> certificate;
  std::vector<VertexId> undecided;
};

struct SearchLimits {
  int depth = kDefaultDepth;
  std::int64_t max_paths = 200000;  // per vertex
};

AperiodicityResult aperiodicity(const KGraphSkeleton& s, const SearchLimits& lim = {}, Exec exec = Exec::parallel);

// ---- ideal structure ----------------------------------------------------------

VertexSet all_vertices(const KGraphSkeleton& s);
bool is_hereditary(const KGraphSkeleton& s, VertexSet h);
bool is_saturated(const KGraphSkeleton& s, VertexSet h);
VertexSet saturated_hereditary_closure(const KGraphSkeleton& s, VertexSet seed);
/// Sorted by (popcount, mask).
std::vector<VertexSet> saturated_hereditary_sets(const KGraphSkeleton& s);
std::vector<VertexSet> maximal_tails(const KGraphSkeleton& s);
std::string format_set(const KGraphSkeleton& s, VertexSet set);

struct SubgraphCheck {
  VertexSet vertices;  // the subgraph's vertex set in the original numbering
  AperiodicityResult result;
};

struct StrongAperiodicity {
  Tri strongly_aperiodic = Tri::unknown;
  Tri by_hereditary = Tri::unknown;  // every complement of a saturated hereditary set
  Tri by_tails = Tri::unknown;       // every maximal tail
  bool contradictory = false;
  std::vector<SubgraphCheck> hereditary_checks, tail_checks;
  std::string certificate;
};

StrongAperiodicity strong_aperiodicity(const KGraphSkeleton& s, const SearchLimits& lim = {},
                                       Exec exec = Exec::parallel);

}  // namespace fellstab
