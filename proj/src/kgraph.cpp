#include "fellstab/kgraph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "fellstab/error.hpp"

namespace fellstab {

KGraphSkeleton::KGraphSkeleton(int k, std::vector<std::string> vertices, std::vector<KEdge> edges,
                               std::vector<KSquare> squares)
    : k_(k), vertices_(std::move(vertices)), edges_(std::move(edges)), squares_(std::move(squares)) {
  if (k_ < 0) throw Error(ErrorKind::InvalidInput, "negative rank");
  const int n = vertex_count();
  if (n > kVertexCap) throw Error(ErrorKind::InvalidInput, "more than 64 vertices");
  const int m = static_cast<int>(edges_.size());
  in_.assign(static_cast<size_t>(n) * k_, {});
  for (int e = 0; e < m; ++e) {
    const auto& ed = edges_[e];
    if (ed.color < 0 || ed.color >= k_) throw Error(ErrorKind::InvalidInput, "edge " + ed.name + " has no valid color");
    if (ed.range < 0 || ed.range >= n || ed.source < 0 || ed.source >= n)
      throw Error(ErrorKind::InvalidInput, "edge " + ed.name + " has an endpoint out of range");
    in_[ed.range * k_ + ed.color].push_back(e);
  }
  for (const auto& sq : squares_) {
    for (EdgeId e : {sq.f, sq.g, sq.g2, sq.f2})
      if (e < 0 || e >= m) throw Error(ErrorKind::InvalidInput, "square refers to an unknown edge");
    fwd_.emplace(std::pair{sq.f, sq.g}, std::pair{sq.g2, sq.f2});
    bwd_.emplace(std::pair{sq.g2, sq.f2}, std::pair{sq.f, sq.g});
  }
}

std::optional<VertexId> KGraphSkeleton::find_vertex(const std::string& name) const {
  const auto it = std::find(vertices_.begin(), vertices_.end(), name);
  if (it == vertices_.end()) return std::nullopt;
  return static_cast<VertexId>(it - vertices_.begin());
}

std::optional<EdgeId> KGraphSkeleton::find_edge(const std::string& name) const {
  for (size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e].name == name) return static_cast<EdgeId>(e);
  return std::nullopt;
}

std::optional<std::pair<EdgeId, EdgeId>> KGraphSkeleton::forward(EdgeId f, EdgeId g) const {
  const auto it = fwd_.find({f, g});
  if (it == fwd_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::pair<EdgeId, EdgeId>> KGraphSkeleton::backward(EdgeId g2, EdgeId f2) const {
  const auto it = bwd_.find({g2, f2});
  if (it == bwd_.end()) return std::nullopt;
  return it->second;
}

std::pair<EdgeId, EdgeId> KGraphSkeleton::swap(EdgeId a, EdgeId b) const {
  const auto r = edges_[a].color < edges_[b].color ? forward(a, b) : backward(a, b);
  if (!r) throw Error(ErrorKind::InvalidInput, "no factorization square for " + edges_[a].name + edges_[b].name);
  return *r;
}

KGraphSkeleton KGraphSkeleton::restrict(VertexSet keep) const {
  std::vector<int> remap(vertex_count(), -1);
  std::vector<std::string> names;
  for (int v = 0; v < vertex_count(); ++v)
    if (keep >> v & 1) {
      remap[v] = static_cast<int>(names.size());
      names.push_back(vertices_[v]);
    }
  std::vector<int> emap(edges_.size(), -1);
  std::vector<KEdge> edges;
  for (size_t e = 0; e < edges_.size(); ++e) {
    const auto& ed = edges_[e];
    if (remap[ed.range] < 0 || remap[ed.source] < 0) continue;
    emap[e] = static_cast<int>(edges.size());
    edges.push_back({ed.name, ed.color, remap[ed.range], remap[ed.source]});
  }
  std::vector<KSquare> squares;
  for (const auto& sq : squares_)
    if (emap[sq.f] >= 0 && emap[sq.g] >= 0 && emap[sq.g2] >= 0 && emap[sq.f2] >= 0)
      squares.push_back({emap[sq.f], emap[sq.g], emap[sq.g2], emap[sq.f2]});
  return KGraphSkeleton(k_, std::move(names), std::move(edges), std::move(squares));
}

ValidationReport validate_skeleton(const KGraphSkeleton& s) {
  ValidationReport rep;
  const int k = s.rank();
  const auto& E = s.edges();
  for (int v = 0; v < s.vertex_count(); ++v)
    for (int c = 0; c < k; ++c)
      if (s.in_edges(v, c).empty())
        rep.add("source", "vertex " + s.vertices()[v] + " receives no edge of color " + std::to_string(c + 1));

  std::map<std::pair<EdgeId, EdgeId>, int> seen_fg, seen_gf;
  for (const auto& sq : s.squares()) {
    const std::string w = E[sq.f].name + E[sq.g].name + " = " + E[sq.g2].name + E[sq.f2].name;
    const int ci = E[sq.f].color, cj = E[sq.g].color;
    if (!(ci < cj && E[sq.f2].color == ci && E[sq.g2].color == cj)) {
      rep.add("square-colors", w);
      continue;
    }
    if (E[sq.f].source != E[sq.g].range || E[sq.g2].source != E[sq.f2].range ||
        E[sq.f].range != E[sq.g2].range || E[sq.g].source != E[sq.f2].source)
      rep.add("square-endpoints", w);
    if (++seen_fg[{sq.f, sq.g}] == 2) rep.add("square-not-bijective", "pair " + E[sq.f].name + E[sq.g].name + " has two squares");
    if (++seen_gf[{sq.g2, sq.f2}] == 2)
      rep.add("square-not-bijective", "pair " + E[sq.g2].name + E[sq.f2].name + " has two squares");
  }
  // Every composable two-color pair must lie in exactly one square.
  for (size_t a = 0; a < E.size(); ++a)
    for (EdgeId b : [&] {
           std::vector<EdgeId> out;
           for (int c = 0; c < k; ++c)
             for (EdgeId e : s.in_edges(E[a].source, c)) out.push_back(e);
           return out;
         }()) {
      const int ca = E[a].color, cb = E[b].color;
      if (ca == cb) continue;
      const auto key = std::pair{static_cast<EdgeId>(a), b};
      if (ca < cb ? !seen_fg.count(key) : !seen_gf.count(key))
        rep.add("square-missing", "no square for " + E[a].name + E[b].name);
    }

  if (k >= 3 && rep.valid()) {
    // Reverse a three-color word two ways and compare.
    for (size_t a = 0; a < E.size(); ++a)
      for (int cj = E[a].color + 1; cj < k; ++cj)
        for (EdgeId b : s.in_edges(E[a].source, cj))
          for (int cl = cj + 1; cl < k; ++cl)
            for (EdgeId c : s.in_edges(E[b].source, cl)) {
              const EdgeId f = static_cast<EdgeId>(a);
              auto [h1, g1] = s.swap(b, c);
              auto [h2, f1] = s.swap(f, h1);
              auto [g2, f2] = s.swap(f1, g1);
              auto [g3, f3] = s.swap(f, b);
              auto [h3, f4] = s.swap(f3, c);
              auto [h4, g4] = s.swap(g3, h3);
              if (h2 != h4 || g2 != g4 || f2 != f4)
                rep.add("cubic-consistency", "word " + E[f].name + E[b].name + E[c].name);
            }
  }
  return rep;
}

std::string to_string(const KGraphSkeleton& s, const PathWord& p) {
  if (p.edges.empty()) return s.vertices()[p.range];
  std::string out;
  for (size_t i = 0; i < p.edges.size(); ++i) out += (i ? "." : "") + s.edge(p.edges[i]).name;
  return out;
}

namespace {

void check_degree(const KGraphSkeleton& s, const Degree& n) {
  if (static_cast<int>(n.size()) != s.rank()) throw Error(ErrorKind::InvalidInput, "degree has the wrong length");
  for (int x : n)
    if (x < 0) throw Error(ErrorKind::InvalidInput, "negative degree");
}

Degree degree_of(const KGraphSkeleton& s, const std::vector<EdgeId>& w) {
  Degree d(s.rank(), 0);
  for (EdgeId e : w) ++d[s.edge(e).color];
  return d;
}

// Stable adjacent-swap sort of letters by key; letters of equal color never cross.
void sort_by_key(const KGraphSkeleton& s, std::vector<EdgeId>& w, std::vector<int>& key) {
  for (size_t pass = 0; pass < w.size(); ++pass) {
    bool moved = false;
    for (size_t t = 0; t + 1 < w.size(); ++t)
      if (key[t] > key[t + 1]) {
        std::tie(w[t], w[t + 1]) = s.swap(w[t], w[t + 1]);
        std::swap(key[t], key[t + 1]);
        moved = true;
      }
    if (!moved) break;
  }
}

}  // namespace

PathWord vertex_path(const KGraphSkeleton& s, VertexId v) { return {v, v, Degree(s.rank(), 0), {}}; }

std::vector<PathWord> paths_of_degree(const KGraphSkeleton& s, VertexId v, const Degree& n) {
  check_degree(s, n);
  std::vector<PathWord> out;
  std::vector<EdgeId> word;
  Degree rem = n;
  std::function<void(VertexId)> go = [&](VertexId cur) {
    int c = 0;
    while (c < s.rank() && rem[c] == 0) ++c;
    if (c == s.rank()) {
      out.push_back({v, cur, n, word});
      return;
    }
    --rem[c];
    for (EdgeId e : s.in_edges(cur, c)) {
      word.push_back(e);
      go(s.edge(e).source);
      word.pop_back();
    }
    ++rem[c];
  };
  go(v);
  return out;
}

std::int64_t count_paths(const KGraphSkeleton& s, VertexId v, const Degree& n) {
  check_degree(s, n);
  // Row vector of path counts, multiplied through the color adjacency matrices.
  std::vector<std::int64_t> row(s.vertex_count(), 0);
  row[v] = 1;
  for (int c = 0; c < s.rank(); ++c)
    for (int step = 0; step < n[c]; ++step) {
      std::vector<std::int64_t> next(s.vertex_count(), 0);
      for (int u = 0; u < s.vertex_count(); ++u)
        if (row[u])
          for (EdgeId e : s.in_edges(u, c)) next[s.edge(e).source] += row[u];
      row = std::move(next);
    }
  return std::accumulate(row.begin(), row.end(), std::int64_t{0});
}

PathWord normalize(const KGraphSkeleton& s, std::vector<EdgeId> word, VertexId range) {
  VertexId cur = range;
  for (EdgeId e : word) {
    if (s.edge(e).range != cur) throw Error(ErrorKind::InvalidInput, "word is not composable");
    cur = s.edge(e).source;
  }
  std::vector<int> key(word.size());
  for (size_t t = 0; t < word.size(); ++t) key[t] = s.edge(word[t]).color;
  sort_by_key(s, word, key);
  return {range, cur, degree_of(s, word), std::move(word)};
}

PathWord compose(const KGraphSkeleton& s, const PathWord& a, const PathWord& b) {
  if (a.source != b.range) throw Error(ErrorKind::InvalidInput, "paths are not composable");
  std::vector<EdgeId> w = a.edges;
  w.insert(w.end(), b.edges.begin(), b.edges.end());
  return normalize(s, std::move(w), a.range);
}

std::vector<PathWord> factor(const KGraphSkeleton& s, const PathWord& lambda, const std::vector<Degree>& parts) {
  const int k = s.rank();
  Degree total(k, 0);
  for (const auto& p : parts) {
    check_degree(s, p);
    for (int c = 0; c < k; ++c) total[c] += p[c];
  }
  if (total != lambda.degree) throw Error(ErrorKind::InvalidInput, "factor degrees do not sum to the path degree");

  // The t-th letter of color c goes to the part whose cumulative count passes t.
  std::vector<EdgeId> w = lambda.edges;
  std::vector<int> key(w.size());
  Degree seen(k, 0);
  for (size_t t = 0; t < w.size(); ++t) {
    const int c = s.edge(w[t]).color;
    int part = 0, acc = parts[0][c];
    while (seen[c] >= acc) acc += parts[++part][c];
    ++seen[c];
    key[t] = part * k + c;
  }
  sort_by_key(s, w, key);

  std::vector<PathWord> out;
  size_t pos = 0;
  VertexId cur = lambda.range;
  for (const auto& p : parts) {
    const size_t len = std::accumulate(p.begin(), p.end(), size_t{0});
    std::vector<EdgeId> piece(w.begin() + pos, w.begin() + pos + len);
    const VertexId src = len ? s.edge(piece.back()).source : cur;
    out.push_back({cur, src, p, std::move(piece)});
    cur = src;
    pos += len;
  }
  return out;
}

PathWord segment(const KGraphSkeleton& s, const PathWord& lambda, const Degree& p, const Degree& m) {
  Degree rest(s.rank());
  for (int c = 0; c < s.rank(); ++c) rest[c] = lambda.degree[c] - p[c] - m[c];
  return factor(s, lambda, {p, m, rest})[1];
}

// ---- P-graphs --------------------------------------------------------------

PGraphPresentation make_pgraph(Subgroup h, std::optional<IntMat> phi, KGraphSkeleton gamma) {
  const int k = h.k;
  if (h.basis.rows() != k) throw Error(ErrorKind::InvalidInput, "subgroup basis has the wrong number of rows");
  int rank = 0;
  if (h.basis.cols() > 0) {
    const auto snf = smith_normal_form(h.basis);
    rank = snf.rank;
    for (int i = 0; i < rank; ++i)
      if (snf.D(i, i) != 1) throw Error(ErrorKind::InvalidInput, "Z^k/H has torsion; P is not a free monoid image");
    if (!phi) {
      IntMat derived = snf.U.bottomRows(k - rank);
      for (Eigen::Index r = 0; r < derived.rows(); ++r)
        if (derived.row(r).maxCoeff() <= 0) derived.row(r) *= -1;
      phi = derived;
    }
  } else if (!phi) {
    phi = IntMat::Identity(k, k);
  }
  const IntMat& f = *phi;
  if (f.cols() != k) throw Error(ErrorKind::InvalidInput, "degree map has the wrong number of columns");
  if (f.rows() != gamma.rank()) throw Error(ErrorKind::DegreeMismatch, "degree map target rank differs from the skeleton rank");
  if (f.size() > 0 && f.minCoeff() < 0)
    throw Error(ErrorKind::DegreeMismatch, "a generator degree has a negative coordinate");
  if (h.basis.cols() > 0 && f.rows() > 0 && !(f * h.basis).isZero())
    throw Error(ErrorKind::InvalidInput, "degree map does not vanish on H");
  const int frank = f.rows() == 0 ? 0 : smith_normal_form(f).rank;
  if (frank + rank != k) throw Error(ErrorKind::InvalidInput, "degree map kernel differs from H");
  for (Eigen::Index j = 0; j < f.rows(); ++j) {
    bool found = false;
    for (Eigen::Index i = 0; i < k && !found; ++i) found = f.col(i) == IntVec::Unit(f.rows(), j);
    if (!found) throw Error(ErrorKind::InvalidInput, "degree map does not hit every generator of N^j; give it explicitly");
  }
  return {std::move(h), f, std::move(gamma)};
}

KGraphSkeleton pullback(const PGraphPresentation& pg) {
  const auto& G = pg.gamma;
  const int k = pg.h.k;
  std::vector<Degree> gen(k, Degree(G.rank()));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < G.rank(); ++j) gen[i][j] = static_cast<int>(pg.phi(j, i));

  std::vector<KEdge> edges;
  std::map<std::tuple<int, VertexId, std::vector<EdgeId>>, EdgeId> lookup;
  std::vector<PathWord> label;
  for (int i = 0; i < k; ++i)
    for (VertexId v = 0; v < G.vertex_count(); ++v)
      for (auto& p : paths_of_degree(G, v, gen[i])) {
        lookup[{i, p.range, p.edges}] = static_cast<EdgeId>(edges.size());
        edges.push_back({"(" + to_string(G, p) + ",e" + std::to_string(i + 1) + ")", i, p.range, p.source});
        label.push_back(std::move(p));
      }

  std::vector<KSquare> squares;
  for (size_t a = 0; a < edges.size(); ++a)
    for (size_t b = 0; b < edges.size(); ++b) {
      const int ci = edges[a].color, cj = edges[b].color;
      if (ci >= cj || edges[a].source != edges[b].range) continue;
      const PathWord lam = compose(G, label[a], label[b]);
      const auto parts = factor(G, lam, {gen[cj], gen[ci]});
      squares.push_back({static_cast<EdgeId>(a), static_cast<EdgeId>(b), lookup.at({cj, parts[0].range, parts[0].edges}),
                         lookup.at({ci, parts[1].range, parts[1].edges})});
    }
  return KGraphSkeleton(k, G.vertices(), std::move(edges), std::move(squares));
}

// ---- infinite paths ----------------------------------------------------------

namespace {

int diagonal(const Degree& d) {
  if (d.empty()) return 0;
  for (int x : d)
    if (x != d[0]) throw Error(ErrorKind::InvalidInput, "infinite-path blocks must have degree a multiple of (1,...,1)");
  return d[0];
}

}  // namespace

PathWord truncate(const KGraphSkeleton& s, const InfinitePath& x, int depth) {
  const int p = diagonal(x.prefix.degree), c = diagonal(x.cycle.degree);
  if (c == 0 && s.rank() > 0) throw Error(ErrorKind::InvalidInput, "cycle block must have positive degree");
  if (x.cycle.range != x.cycle.source || x.prefix.source != x.cycle.range)
    throw Error(ErrorKind::InvalidInput, "cycle does not close up at the end of the prefix");
  std::vector<EdgeId> w = x.prefix.edges;
  for (int t = p; t < depth; t += std::max(c, 1)) w.insert(w.end(), x.cycle.edges.begin(), x.cycle.edges.end());
  const PathWord full = normalize(s, std::move(w), x.prefix.range);
  return segment(s, full, Degree(s.rank(), 0), Degree(s.rank(), depth));
}

std::string_view to_string(Tri t) {
  switch (t) {
    case Tri::yes: return "yes";
    case Tri::no: return "no";
    case Tri::unknown: return "unknown";
  }
  return "unknown";
}

std::vector<VertexSet> reachability(const KGraphSkeleton& s) {
  const int n = s.vertex_count();
  std::vector<VertexSet> reach(n);
  for (int v = 0; v < n; ++v) reach[v] = VertexSet{1} << v;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : s.edges()) {
      const VertexSet next = reach[e.range] | reach[e.source];
      if (next != reach[e.range]) reach[e.range] = next, changed = true;
    }
  }
  return reach;
}

namespace {

// Vertices x(t*1) over one period of the tail; every x(m) reaches one of them.
VertexSet tail_vertices(const KGraphSkeleton& s, const InfinitePath& x) {
  const int p = diagonal(x.prefix.degree), c = std::max(diagonal(x.cycle.degree), 1);
  const PathWord w = truncate(s, x, p + c);
  VertexSet out = 0;
  for (int t = p; t < p + c; ++t)
    out |= VertexSet{1} << segment(s, w, Degree(s.rank(), 0), Degree(s.rank(), t)).source;
  return out;
}

}  // namespace

PreorderResult orbit_preorder(const KGraphSkeleton& s, const InfinitePath& x, const InfinitePath& y) {
  // Eventually periodic paths make the condition finite: the tail vertices of
  // x must each reach a tail vertex of y.
  const auto reach = reachability(s);
  const VertexSet tx = tail_vertices(s, x), ty = tail_vertices(s, y);
  for (int v = 0; v < s.vertex_count(); ++v)
    if ((tx >> v & 1) && !(reach[v] & ty))
      return {Tri::no, "vertex " + s.vertices()[v] + " on the tail of x reaches no tail vertex of y"};
  return {Tri::yes, ""};
}

}  // namespace fellstab
