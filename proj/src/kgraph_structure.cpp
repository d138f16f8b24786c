#include <algorithm>
#include <bit>
#include <set>

#include "fellstab/error.hpp"
#include "fellstab/kgraph.hpp"

namespace fellstab {

namespace {

struct ShiftPair {
  Degree p, q;
};

// Unordered pairs of distinct shifts in [0, h]^k, smallest total first.
std::vector<ShiftPair> shift_pairs(int k, int h) {
  std::vector<Degree> shifts(1, Degree(k, 0));
  for (int c = 0; c < k; ++c) {
    std::vector<Degree> next;
    for (const auto& d : shifts)
      for (int t = 0; t <= h; ++t) {
        Degree e = d;
        e[c] = t;
        next.push_back(e);
      }
    shifts = std::move(next);
  }
  std::vector<ShiftPair> pairs;
  for (const auto& a : shifts)
    for (const auto& b : shifts)
      if (b < a) pairs.push_back({a, b});
  auto weight = [](const ShiftPair& s) {
    int w = 0;
    for (size_t c = 0; c < s.p.size(); ++c) w += s.p[c] + s.q[c];
    return w;
  };
  std::stable_sort(pairs.begin(), pairs.end(), [&](const ShiftPair& x, const ShiftPair& y) {
    if (weight(x) != weight(y)) return weight(x) < weight(y);
    return std::tie(x.p, x.q) < std::tie(y.p, y.q);
  });
  return pairs;
}

struct VertexVerdict {
  Tri aperiodic = Tri::unknown;
  std::optional<PathWord> witness;
  std::optional<ShiftPair> period;
};

VertexVerdict check_vertex(const KGraphSkeleton& s, VertexId v, const SearchLimits& lim,
                           const std::vector<ShiftPair>& pairs, int h) {
  const int k = s.rank();
  VertexVerdict out;
  if (k == 0) {
    // Lambda^infinity over a rank-0 graph is a single point with nothing to shift.
    out.aperiodic = Tri::yes;
    out.witness = vertex_path(s, v);
    return out;
  }
  const Degree full(k, lim.depth), window(k, lim.depth - h);
  if (count_paths(s, v, full) > lim.max_paths) return out;

  // Index of each shift in the flattened [0, h]^k box.
  auto index = [&](const Degree& d) {
    int i = 0;
    for (int c = k - 1; c >= 0; --c) i = i * (h + 1) + d[c];
    return i;
  };
  std::vector<Degree> shifts;
  {
    int total = 1;
    for (int c = 0; c < k; ++c) total *= h + 1;
    shifts.resize(total);
    for (int i = 0; i < total; ++i) {
      Degree d(k);
      for (int c = 0, r = i; c < k; ++c, r /= h + 1) d[c] = r % (h + 1);
      shifts[i] = d;
    }
  }
  std::vector<char> alive(pairs.size(), 1);
  for (const auto& lam : paths_of_degree(s, v, full)) {
    std::vector<std::vector<EdgeId>> seg(shifts.size());
    for (size_t i = 0; i < shifts.size(); ++i) seg[i] = segment(s, lam, shifts[i], window).edges;
    bool all_differ = true;
    for (size_t j = 0; j < pairs.size(); ++j) {
      const bool equal = seg[index(pairs[j].p)] == seg[index(pairs[j].q)];
      if (equal) all_differ = false;
      else alive[j] = 0;
    }
    if (all_differ) {
      out.aperiodic = Tri::yes;
      out.witness = lam;
      return out;
    }
  }
  for (size_t j = 0; j < pairs.size(); ++j)
    if (alive[j]) {
      out.aperiodic = Tri::no;
      out.period = pairs[j];
      return out;
    }
  return out;
}

}  // namespace

AperiodicityResult aperiodicity(const KGraphSkeleton& s, const SearchLimits& lim, Exec exec) {
  if (lim.depth < 2) throw Error(ErrorKind::InvalidInput, "search depth must be at least 2");
  const int n = s.vertex_count();
  const int h = lim.depth / 2;
  const auto pairs = shift_pairs(s.rank(), h);
  std::vector<VertexVerdict> verdicts(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int v = 0; v < n; ++v) verdicts[v] = check_vertex(s, v, lim, pairs, h);
  } else {
    for (int v = 0; v < n; ++v) verdicts[v] = check_vertex(s, v, lim, pairs, h);
  }

  AperiodicityResult res;
  for (int v = 0; v < n; ++v) {
    const auto& vd = verdicts[v];
    if (vd.aperiodic == Tri::yes) res.witnesses[v] = *vd.witness;
    if (vd.aperiodic == Tri::unknown) res.undecided.push_back(v);
    if (vd.aperiodic == Tri::no && !res.certificate) res.certificate = PeriodCertificate{v, vd.period->p, vd.period->q};
  }
  res.aperiodic = res.certificate ? Tri::no : res.undecided.empty() ? Tri::yes : Tri::unknown;
  return res;
}

// ---- hereditary and saturated sets -----------------------------------------

VertexSet all_vertices(const KGraphSkeleton& s) {
  const int n = s.vertex_count();
  return n == 64 ? ~VertexSet{0} : (VertexSet{1} << n) - 1;
}

bool is_hereditary(const KGraphSkeleton& s, VertexSet h) {
  for (const auto& e : s.edges())
    if ((h >> e.range & 1) && !(h >> e.source & 1)) return false;
  return true;
}

namespace {

// Some color has all its edges into v coming from h.
bool forced(const KGraphSkeleton& s, VertexSet h, VertexId v) {
  for (int c = 0; c < s.rank(); ++c) {
    const auto& in = s.in_edges(v, c);
    if (in.empty()) continue;
    if (std::all_of(in.begin(), in.end(), [&](EdgeId e) { return h >> s.edge(e).source & 1; })) return true;
  }
  return false;
}

}  // namespace

bool is_saturated(const KGraphSkeleton& s, VertexSet h) {
  for (int v = 0; v < s.vertex_count(); ++v)
    if (!(h >> v & 1) && forced(s, h, v)) return false;
  return true;
}

VertexSet saturated_hereditary_closure(const KGraphSkeleton& s, VertexSet seed) {
  VertexSet h = seed;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : s.edges())
      if ((h >> e.range & 1) && !(h >> e.source & 1)) h |= VertexSet{1} << e.source, changed = true;
    for (int v = 0; v < s.vertex_count(); ++v)
      if (!(h >> v & 1) && forced(s, h, v)) h |= VertexSet{1} << v, changed = true;
  }
  return h;
}

std::vector<VertexSet> saturated_hereditary_sets(const KGraphSkeleton& s) {
  std::set<VertexSet> found{saturated_hereditary_closure(s, 0)};
  std::vector<VertexSet> work(found.begin(), found.end());
  while (!work.empty()) {
    const VertexSet h = work.back();
    work.pop_back();
    for (int v = 0; v < s.vertex_count(); ++v) {
      if (h >> v & 1) continue;
      const VertexSet next = saturated_hereditary_closure(s, h | VertexSet{1} << v);
      if (found.insert(next).second) work.push_back(next);
    }
  }
  std::vector<VertexSet> out(found.begin(), found.end());
  std::sort(out.begin(), out.end(), [](VertexSet a, VertexSet b) {
    return std::pair{std::popcount(a), a} < std::pair{std::popcount(b), b};
  });
  return out;
}

std::vector<VertexSet> maximal_tails(const KGraphSkeleton& s) {
  const auto reach = reachability(s);
  const VertexSet all = all_vertices(s);
  std::vector<VertexSet> out;
  for (VertexSet h : saturated_hereditary_sets(s)) {
    const VertexSet t = all & ~h;
    if (!t) continue;
    bool tail = true;
    for (int v = 0; v < s.vertex_count() && tail; ++v)
      for (int w = v + 1; w < s.vertex_count() && tail; ++w)
        if ((t >> v & 1) && (t >> w & 1) && !(reach[v] & reach[w])) tail = false;
    if (tail) out.push_back(t);
  }
  std::sort(out.begin(), out.end(), [](VertexSet a, VertexSet b) {
    return std::pair{std::popcount(a), a} < std::pair{std::popcount(b), b};
  });
  return out;
}

std::string format_set(const KGraphSkeleton& s, VertexSet set) {
  std::string out = "{";
  bool first = true;
  for (int v = 0; v < s.vertex_count(); ++v)
    if (set >> v & 1) {
      out += (first ? "" : ",") + s.vertices()[v];
      first = false;
    }
  return out + "}";
}

namespace {

Tri combine(const std::vector<SubgraphCheck>& checks) {
  bool unknown = false;
  for (const auto& c : checks) {
    if (c.result.aperiodic == Tri::no) return Tri::no;
    if (c.result.aperiodic == Tri::unknown) unknown = true;
  }
  return unknown ? Tri::unknown : Tri::yes;
}

std::string describe_failure(const KGraphSkeleton& s, const std::vector<SubgraphCheck>& checks, const char* what) {
  for (const auto& c : checks) {
    if (c.result.aperiodic != Tri::no) continue;
    const auto sub = s.restrict(c.vertices);
    const auto& cert = *c.result.certificate;
    auto fmt = [](const Degree& d) {
      std::string o = "(";
      for (size_t i = 0; i < d.size(); ++i) o += (i ? "," : "") + std::to_string(d[i]);
      return o + ")";
    };
    return std::string(what) + " " + format_set(s, c.vertices) + " is periodic at vertex " +
           sub.vertices()[cert.vertex] + " with p=" + fmt(cert.p) + " q=" + fmt(cert.q);
  }
  return "";
}

}  // namespace

StrongAperiodicity strong_aperiodicity(const KGraphSkeleton& s, const SearchLimits& lim, Exec exec) {
  StrongAperiodicity out;
  const VertexSet all = all_vertices(s);
  // Condition (2): the complement of every saturated hereditary set.
  for (VertexSet h : saturated_hereditary_sets(s)) {
    const VertexSet rest = all & ~h;
    if (!rest) continue;
    out.hereditary_checks.push_back({rest, aperiodicity(s.restrict(rest), lim, exec)});
  }
  // Condition (3): every maximal tail, computed without reusing the above.
  for (VertexSet t : maximal_tails(s)) out.tail_checks.push_back({t, aperiodicity(s.restrict(t), lim, exec)});

  out.by_hereditary = combine(out.hereditary_checks);
  out.by_tails = combine(out.tail_checks);
  out.contradictory = out.by_hereditary != Tri::unknown && out.by_tails != Tri::unknown && out.by_hereditary != out.by_tails;
  out.strongly_aperiodic = out.by_hereditary == out.by_tails ? out.by_hereditary : Tri::unknown;
  if (out.strongly_aperiodic == Tri::no) out.certificate = describe_failure(s, out.tail_checks, "tail");
  return out;
}

}  // namespace fellstab
