#include "fellstab/groupoid.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "fellstab/error.hpp"

namespace fellstab {

bool ValidationReport::has(std::string_view axiom) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.axiom == axiom; });
}

void ValidationReport::add(std::string axiom, std::string witness, double residual) {
  violations.push_back({std::move(axiom), std::move(witness), residual});
}

void ValidationReport::append(const ValidationReport& other) {
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

std::string ValidationReport::to_text() const {
  if (valid()) return "valid\n";
  std::ostringstream os;
  for (const auto& v : violations) {
    os << v.axiom << ": " << v.witness;
    if (v.residual > 0.0) os << " residual=" << v.residual;
    os << '\n';
  }
  return os.str();
}

FiniteGroupoid::FiniteGroupoid(std::vector<std::string> unit_names,
                               std::vector<std::string> arrow_names, std::vector<UnitId> range,
                               std::vector<UnitId> source, std::vector<ArrowId> compose,
                               std::vector<ArrowId> inverse, std::vector<ArrowId> unit_arrow)
    : unit_names_(std::move(unit_names)),
      arrow_names_(std::move(arrow_names)),
      range_(std::move(range)),
      source_(std::move(source)),
      compose_(std::move(compose)),
      inverse_(std::move(inverse)),
      unit_arrow_(std::move(unit_arrow)) {
  const auto nu = unit_names_.size();
  const auto na = arrow_names_.size();
  if (range_.size() != na || source_.size() != na || inverse_.size() != na ||
      compose_.size() != na * na || unit_arrow_.size() != nu)
    throw Error(ErrorKind::InvalidInput, "groupoid table sizes do not match");
  auto unit_ok = [&](UnitId x) { return x >= 0 && static_cast<std::size_t>(x) < nu; };
  auto arrow_ok = [&](ArrowId g) { return g >= 0 && static_cast<std::size_t>(g) < na; };
  for (std::size_t g = 0; g < na; ++g) {
    if (!unit_ok(range_[g]) || !unit_ok(source_[g]))
      throw Error(ErrorKind::InvalidInput, "arrow " + arrow_names_[g] + " has an unknown end");
    if (!arrow_ok(inverse_[g]))
      throw Error(ErrorKind::InvalidInput, "arrow " + arrow_names_[g] + " has no inverse");
  }
  for (auto gh : compose_)
    if (gh != kNoArrow && !arrow_ok(gh))
      throw Error(ErrorKind::InvalidInput, "composition table names an unknown arrow");
  for (auto e : unit_arrow_)
    if (!arrow_ok(e)) throw Error(ErrorKind::InvalidInput, "unit embedding names an unknown arrow");

  with_range_.assign(nu, {});
  with_source_.assign(nu, {});
  for (std::size_t g = 0; g < na; ++g) {
    with_range_[range_[g]].push_back(static_cast<ArrowId>(g));
    with_source_[source_[g]].push_back(static_cast<ArrowId>(g));
  }
}

std::optional<UnitId> FiniteGroupoid::find_unit(std::string_view name) const {
  for (std::size_t i = 0; i < unit_names_.size(); ++i)
    if (unit_names_[i] == name) return static_cast<UnitId>(i);
  return std::nullopt;
}

std::optional<ArrowId> FiniteGroupoid::find_arrow(std::string_view name) const {
  for (std::size_t i = 0; i < arrow_names_.size(); ++i)
    if (arrow_names_[i] == name) return static_cast<ArrowId>(i);
  return std::nullopt;
}

namespace {

std::string tuple_witness(const FiniteGroupoid& G, std::initializer_list<ArrowId> arrows) {
  std::string out = "(";
  bool first = true;
  for (auto a : arrows) {
    if (!first) out += ",";
    out += G.arrow_name(a);
    first = false;
  }
  return out + ")";
}

// All checks whose witness starts at arrow g, in a fixed order.
ValidationReport check_from(const FiniteGroupoid& G, ArrowId g) {
  ValidationReport rep;
  const int n = G.num_arrows();
  const ArrowId gi = G.inverse(g);
  if (G.inverse(gi) != g) rep.add("inverse-involution", tuple_witness(G, {g}));
  if (G.range(gi) != G.source(g) || G.source(gi) != G.range(g))
    rep.add("inverse-ends", tuple_witness(G, {g}));
  if (G.compose(g, gi) != G.unit_arrow(G.range(g)))
    rep.add("inverse-left", tuple_witness(G, {g, gi}));
  if (G.composable(gi, g) && G.compose(gi, g) != G.unit_arrow(G.source(g)))
    rep.add("inverse-right", tuple_witness(G, {gi, g}));
  if (G.compose(G.unit_arrow(G.range(g)), g) != g)
    rep.add("unit-left", tuple_witness(G, {G.unit_arrow(G.range(g)), g}));
  if (G.compose(g, G.unit_arrow(G.source(g))) != g)
    rep.add("unit-right", tuple_witness(G, {g, G.unit_arrow(G.source(g))}));

  for (ArrowId h = 0; h < n; ++h) {
    const ArrowId gh = G.compose(g, h);
    if (G.composable(g, h) != (gh != kNoArrow)) {
      rep.add("composition-domain", tuple_witness(G, {g, h}));
      continue;
    }
    if (gh == kNoArrow) continue;
    if (G.range(gh) != G.range(g) || G.source(gh) != G.source(h))
      rep.add("range-source", tuple_witness(G, {g, h}));
    for (ArrowId k = 0; k < n; ++k) {
      if (!G.composable(h, k)) continue;
      const ArrowId hk = G.compose(h, k);
      if (hk == kNoArrow) continue;
      const ArrowId left = G.compose(gh, k);
      const ArrowId right = G.compose(g, hk);
      if (left == kNoArrow || right == kNoArrow || left != right)
        rep.add("associativity", tuple_witness(G, {g, h, k}));
    }
  }
  return rep;
}

ValidationReport check_units(const FiniteGroupoid& G) {
  ValidationReport rep;
  for (UnitId x = 0; x < G.num_units(); ++x) {
    const ArrowId e = G.unit_arrow(x);
    if (G.range(e) != x || G.source(e) != x) rep.add("unit-embedding", G.unit_name(x));
  }
  return rep;
}

}  // namespace

ValidationReport validate_groupoid(const FiniteGroupoid& G, Exec exec) {
  ValidationReport rep = check_units(G);
  // Unit embedding must be sane before arrow checks can index through it.
  if (!rep.valid()) return rep;
  const int n = G.num_arrows();
  std::vector<ValidationReport> parts(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int g = 0; g < n; ++g) parts[g] = check_from(G, g);
  } else {
    for (int g = 0; g < n; ++g) parts[g] = check_from(G, g);
  }
  for (const auto& p : parts) rep.append(p);
  return rep;
}

std::vector<std::vector<UnitId>> orbits(const FiniteGroupoid& G) {
  std::vector<int> parent(G.num_units());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (ArrowId g = 0; g < G.num_arrows(); ++g) {
    int a = find(G.range(g)), b = find(G.source(g));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<int, std::vector<UnitId>> blocks;
  for (UnitId x = 0; x < G.num_units(); ++x) blocks[find(x)].push_back(x);
  std::vector<std::vector<UnitId>> out;
  for (auto& [root, members] : blocks) out.push_back(std::move(members));
  return out;
}

IsotropyGroup isotropy(const FiniteGroupoid& G, UnitId x) {
  IsotropyGroup iso;
  iso.unit = x;
  for (ArrowId g : G.arrows_with_range(x))
    if (G.source(g) == x) iso.elements.push_back(g);
  const int m = static_cast<int>(iso.elements.size());
  auto pos = [&](ArrowId g) {
    auto it = std::lower_bound(iso.elements.begin(), iso.elements.end(), g);
    return static_cast<int>(it - iso.elements.begin());
  };
  iso.multiplication.assign(m, std::vector<int>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) iso.multiplication[i][j] = pos(G.compose(iso.elements[i], iso.elements[j]));
  iso.identity = pos(G.unit_arrow(x));
  return iso;
}

bool left_translation_bijective(const FiniteGroupoid& G) {
  for (ArrowId g = 0; g < G.num_arrows(); ++g) {
    const auto& dom = G.arrows_with_range(G.source(g));
    const auto& cod = G.arrows_with_range(G.range(g));
    if (dom.size() != cod.size()) return false;
    std::vector<char> hit(G.num_arrows(), 0);
    for (ArrowId h : dom) {
      const ArrowId gh = G.compose(g, h);
      if (gh == kNoArrow || G.range(gh) != G.range(g) || hit[gh]) return false;
      hit[gh] = 1;
    }
  }
  return true;
}

bool isotropy_conjugate(const FiniteGroupoid& G, UnitId x, UnitId y) {
  ArrowId link = kNoArrow;
  for (ArrowId g : G.arrows_with_range(x))
    if (G.source(g) == y) {
      link = g;
      break;
    }
  if (link == kNoArrow) return false;
  const IsotropyGroup ix = isotropy(G, x), iy = isotropy(G, y);
  if (ix.elements.size() != iy.elements.size()) return false;
  const ArrowId inv = G.inverse(link);
  auto conj = [&](ArrowId h) { return G.compose(G.compose(link, h), inv); };
  for (ArrowId a : iy.elements)
    for (ArrowId b : iy.elements) {
      const ArrowId ab = G.compose(a, b);
      if (conj(ab) != G.compose(conj(a), conj(b))) return false;
    }
  std::vector<ArrowId> image;
  for (ArrowId a : iy.elements) image.push_back(conj(a));
  std::sort(image.begin(), image.end());
  return image == ix.elements;
}

FiniteGroupoid pair_groupoid(int n) {
  std::vector<std::string> units, arrows;
  std::vector<UnitId> r, s;
  for (int i = 0; i < n; ++i) units.push_back("u" + std::to_string(i));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      arrows.push_back("(" + std::to_string(i) + "," + std::to_string(j) + ")");
      r.push_back(i);
      s.push_back(j);
    }
  const int na = n * n;
  std::vector<ArrowId> comp(static_cast<std::size_t>(na) * na, kNoArrow), inv(na), unit(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      inv[i * n + j] = j * n + i;
      for (int k = 0; k < n; ++k) comp[(i * n + j) * na + (j * n + k)] = i * n + k;
    }
  for (int i = 0; i < n; ++i) unit[i] = i * n + i;
  return FiniteGroupoid(units, arrows, r, s, comp, inv, unit);
}

FiniteGroupoid group_groupoid(const std::vector<std::vector<int>>& table,
                              std::vector<std::string> names) {
  const int m = static_cast<int>(table.size());
  if (names.empty())
    for (int i = 0; i < m; ++i) names.push_back("g" + std::to_string(i));
  std::vector<ArrowId> comp(static_cast<std::size_t>(m) * m), inv(m, 0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      comp[a * m + b] = table[a][b];
      if (table[a][b] == 0) inv[a] = b;
    }
  return FiniteGroupoid({"e"}, names, std::vector<UnitId>(m, 0), std::vector<UnitId>(m, 0), comp,
                        inv, {0});
}

FiniteGroupoid cyclic_group(int m) {
  std::vector<std::vector<int>> t(m, std::vector<int>(m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) t[a][b] = (a + b) % m;
  return group_groupoid(t);
}

FiniteGroupoid klein_four() {
  std::vector<std::vector<int>> t(4, std::vector<int>(4));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) t[a][b] = a ^ b;
  return group_groupoid(t, {"(0,0)", "(0,1)", "(1,0)", "(1,1)"});
}

FiniteGroupoid action_groupoid(const std::vector<std::vector<int>>& table,
                               const std::vector<std::vector<int>>& action) {
  const int m = static_cast<int>(table.size());
  const int p = action.empty() ? 0 : static_cast<int>(action[0].size());
  std::vector<std::string> units, arrows;
  std::vector<UnitId> r, s;
  for (int x = 0; x < p; ++x) units.push_back("x" + std::to_string(x));
  // Arrow (g,x) at index g*p + x.
  for (int g = 0; g < m; ++g)
    for (int x = 0; x < p; ++x) {
      arrows.push_back("(g" + std::to_string(g) + ",x" + std::to_string(x) + ")");
      r.push_back(action[g][x]);
      s.push_back(x);
    }
  const int na = m * p;
  std::vector<ArrowId> comp(static_cast<std::size_t>(na) * na, kNoArrow), inv(na), unit(p);
  for (int g = 0; g < m; ++g) {
    int ginv = 0;
    for (int h = 0; h < m; ++h)
      if (table[g][h] == 0) ginv = h;
    for (int x = 0; x < p; ++x) {
      inv[g * p + x] = ginv * p + action[g][x];
      for (int h = 0; h < m; ++h)
        for (int y = 0; y < p; ++y)
          if (action[h][y] == x) comp[(g * p + x) * na + (h * p + y)] = table[g][h] * p + y;
    }
  }
  for (int x = 0; x < p; ++x) unit[x] = x;
  return FiniteGroupoid(units, arrows, r, s, comp, inv, unit);
}

FiniteGroupoid disjoint_union(const FiniteGroupoid& a, const FiniteGroupoid& b) {
  std::vector<std::string> units, arrows;
  std::vector<UnitId> r, s;
  const int ua = a.num_units(), na = a.num_arrows(), nb = b.num_arrows();
  for (int x = 0; x < ua; ++x) units.push_back("a." + a.unit_name(x));
  for (int x = 0; x < b.num_units(); ++x) units.push_back("b." + b.unit_name(x));
  for (int g = 0; g < na; ++g) {
    arrows.push_back("a." + a.arrow_name(g));
    r.push_back(a.range(g));
    s.push_back(a.source(g));
  }
  for (int g = 0; g < nb; ++g) {
    arrows.push_back("b." + b.arrow_name(g));
    r.push_back(ua + b.range(g));
    s.push_back(ua + b.source(g));
  }
  const int n = na + nb;
  std::vector<ArrowId> comp(static_cast<std::size_t>(n) * n, kNoArrow), inv(n), unit;
  for (int g = 0; g < na; ++g) {
    inv[g] = a.inverse(g);
    for (int h = 0; h < na; ++h) comp[g * n + h] = a.compose(g, h);
  }
  for (int g = 0; g < nb; ++g) {
    inv[na + g] = na + b.inverse(g);
    for (int h = 0; h < nb; ++h) {
      const ArrowId gh = b.compose(g, h);
      comp[(na + g) * n + na + h] = gh == kNoArrow ? kNoArrow : na + gh;
    }
  }
  for (int x = 0; x < ua; ++x) unit.push_back(a.unit_arrow(x));
  for (int x = 0; x < b.num_units(); ++x) unit.push_back(na + b.unit_arrow(x));
  return FiniteGroupoid(units, arrows, r, s, comp, inv, unit);
}

}  // namespace fellstab
