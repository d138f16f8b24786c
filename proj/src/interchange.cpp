#include "fellstab/interchange.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "fellstab/error.hpp"

namespace fellstab {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

const json& field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) bad(std::string("missing field '") + key + "'");
  return doc.at(key);
}

std::string str(const json& j, const char* what) {
  if (!j.is_string()) bad(std::string(what) + " must be a string");
  return j.get<std::string>();
}

int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<int>();
}

cplx complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad("complex numbers are written [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json complex_to(cplx z) { return json::array({z.real(), z.imag()}); }

Mat matrix_from(const json& rows, int r, int c, const std::string& what) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != r) bad(what + " should have " + std::to_string(r) + " rows");
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != c)
      bad(what + " row " + std::to_string(i) + " should have " + std::to_string(c) + " entries");
    for (int j = 0; j < c; ++j) m(i, j) = complex_from(rows[i][j]);
  }
  return m;
}

json matrix_to(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

template <class Lookup>
int lookup(const Lookup& f, const json& j, const char* what) {
  const std::string name = str(j, what);
  const auto id = f(name);
  if (!id) bad(std::string("unknown ") + what + " '" + name + "'");
  return *id;
}

json tri(Tri t) { return std::string(to_string(t)); }

}  // namespace

json parse_document(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(origin + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str(), path);
}

std::string canonical(const json& doc) { return doc.dump(2) + "\n"; }

std::string document_kind(const json& doc) { return str(field(doc, "kind"), "kind"); }

// ---- groupoids ------------------------------------------------------------------

FiniteGroupoid groupoid_from_json(const json& doc) {
  std::vector<std::string> units, arrows;
  for (const auto& u : field(doc, "units")) units.push_back(str(u, "unit"));
  auto unit_of = [&](const std::string& n) -> std::optional<int> {
    for (size_t i = 0; i < units.size(); ++i)
      if (units[i] == n) return static_cast<int>(i);
    return std::nullopt;
  };
  std::vector<UnitId> range, source;
  for (const auto& a : field(doc, "arrows")) {
    arrows.push_back(str(field(a, "id"), "arrow id"));
    range.push_back(lookup(unit_of, field(a, "range"), "unit"));
    source.push_back(lookup(unit_of, field(a, "source"), "unit"));
  }
  auto arrow_of = [&](const std::string& n) -> std::optional<int> {
    for (size_t i = 0; i < arrows.size(); ++i)
      if (arrows[i] == n) return static_cast<int>(i);
    return std::nullopt;
  };
  const size_t n = arrows.size();
  std::vector<ArrowId> compose(n * n, kNoArrow), inverse(n, kNoArrow), unit_arrow(units.size(), kNoArrow);
  for (const auto& t : field(doc, "compose")) {
    if (!t.is_array() || t.size() != 3) bad("compose entries are [g, h, gh]");
    const int g = lookup(arrow_of, t[0], "arrow"), h = lookup(arrow_of, t[1], "arrow");
    compose[g * n + h] = lookup(arrow_of, t[2], "arrow");
  }
  for (const auto& t : field(doc, "inverse")) {
    if (!t.is_array() || t.size() != 2) bad("inverse entries are [g, g^-1]");
    inverse[lookup(arrow_of, t[0], "arrow")] = lookup(arrow_of, t[1], "arrow");
  }
  if (doc.contains("identities")) {
    for (const auto& t : doc.at("identities")) {
      if (!t.is_array() || t.size() != 2) bad("identities entries are [unit, arrow]");
      unit_arrow[lookup(unit_of, t[0], "unit")] = lookup(arrow_of, t[1], "arrow");
    }
  } else {
    // Idempotent loops are the identities.
    for (size_t g = 0; g < n; ++g)
      if (range[g] == source[g] && compose[g * n + g] == static_cast<ArrowId>(g) && unit_arrow[range[g]] == kNoArrow)
        unit_arrow[range[g]] = static_cast<ArrowId>(g);
  }
  for (size_t x = 0; x < units.size(); ++x)
    if (unit_arrow[x] == kNoArrow) bad("no identity arrow for unit '" + units[x] + "'");
  for (size_t g = 0; g < n; ++g)
    if (inverse[g] == kNoArrow) bad("no inverse listed for arrow '" + arrows[g] + "'");
  try {
    return FiniteGroupoid(units, arrows, range, source, compose, inverse, unit_arrow);
  } catch (const Error& e) {
    bad(e.what());
  }
}

json to_json(const FiniteGroupoid& g) {
  json doc;
  doc["kind"] = "groupoid";
  json units = json::array(), arrows = json::array(), compose = json::array(), inverse = json::array(),
       ids = json::array();
  for (UnitId x = 0; x < g.num_units(); ++x) {
    units.push_back(g.unit_name(x));
    ids.push_back({g.unit_name(x), g.arrow_name(g.unit_arrow(x))});
  }
  for (ArrowId a = 0; a < g.num_arrows(); ++a) {
    arrows.push_back({{"id", g.arrow_name(a)}, {"range", g.unit_name(g.range(a))}, {"source", g.unit_name(g.source(a))}});
    inverse.push_back({g.arrow_name(a), g.arrow_name(g.inverse(a))});
    for (ArrowId b = 0; b < g.num_arrows(); ++b)
      if (g.compose(a, b) != kNoArrow) compose.push_back({g.arrow_name(a), g.arrow_name(b), g.arrow_name(g.compose(a, b))});
  }
  doc["units"] = units;
  doc["arrows"] = arrows;
  doc["identities"] = ids;
  doc["compose"] = compose;
  doc["inverse"] = inverse;
  return doc;
}

// ---- bundles --------------------------------------------------------------------

FellBundle bundle_from_json(const json& doc) {
  const FiniteGroupoid G = groupoid_from_json(field(doc, "groupoid"));
  auto arrow = [&](const json& j) { return lookup([&](const std::string& s) { return G.find_arrow(s); }, j, "arrow"); };
  const int n = G.num_arrows();

  if (doc.contains("cocycle")) {
    std::map<std::pair<ArrowId, ArrowId>, cplx> table;
    for (const auto& t : doc.at("cocycle")) table[{arrow(field(t, "g")), arrow(field(t, "h"))}] = complex_from(field(t, "value"));
    return from_cocycle(G, [table](ArrowId g, ArrowId h) {
      const auto it = table.find({g, h});
      return it == table.end() ? cplx(1.0) : it->second;
    });
  }

  std::vector<int> dims(n, -1);
  for (const auto& [name, d] : field(doc, "fibers").items()) dims[arrow(json(name))] = integer(d, "fiber dimension");
  for (ArrowId g = 0; g < n; ++g)
    if (dims[g] < 0) bad("no fiber dimension for arrow '" + G.arrow_name(g) + "'");
  std::vector<Mat> mult(static_cast<size_t>(n) * n), invol(n);
  for (const auto& t : field(doc, "mult")) {
    const int g = arrow(field(t, "g")), h = arrow(field(t, "h"));
    if (!G.composable(g, h)) bad("mult given for a non-composable pair");
    const int gh = G.compose(g, h);
    mult[g * n + h] = matrix_from(field(t, "matrix"), dims[gh], dims[g] * dims[h],
                                  "mult(" + G.arrow_name(g) + "," + G.arrow_name(h) + ")");
  }
  for (const auto& t : field(doc, "invol")) {
    const int g = arrow(field(t, "g"));
    invol[g] = matrix_from(field(t, "matrix"), dims[G.inverse(g)], dims[g], "invol(" + G.arrow_name(g) + ")");
  }
  for (ArrowId g = 0; g < n; ++g) {
    if (invol[g].size() == 0 && dims[g] > 0) bad("no involution for arrow '" + G.arrow_name(g) + "'");
    for (ArrowId h = 0; h < n; ++h)
      if (G.composable(g, h) && mult[g * n + h].size() == 0 && dims[g] * dims[h] > 0)
        bad("no mult for " + G.arrow_name(g) + "," + G.arrow_name(h));
  }
  try {
    return FellBundle(G, dims, mult, invol);
  } catch (const Error& e) {
    bad(e.what());
  }
}

json to_json(const FellBundle& b) {
  const auto& G = b.base();
  json doc;
  doc["kind"] = "bundle";
  doc["groupoid"] = to_json(G);
  json fibers = json::object(), mult = json::array(), invol = json::array();
  for (ArrowId g = 0; g < G.num_arrows(); ++g) {
    fibers[G.arrow_name(g)] = b.fiber_dim(g);
    invol.push_back({{"g", G.arrow_name(g)}, {"matrix", matrix_to(b.invol(g))}});
    for (ArrowId h = 0; h < G.num_arrows(); ++h)
      if (G.composable(g, h))
        mult.push_back({{"g", G.arrow_name(g)}, {"h", G.arrow_name(h)}, {"matrix", matrix_to(b.mult(g, h))}});
  }
  doc["fibers"] = fibers;
  doc["mult"] = mult;
  doc["invol"] = invol;
  return doc;
}

// ---- skeletons and P-graphs -------------------------------------------------------

KGraphSkeleton skeleton_from_json(const json& doc) {
  const int k = integer(field(doc, "k"), "k");
  std::vector<std::string> vertices;
  for (const auto& v : field(doc, "vertices")) vertices.push_back(str(v, "vertex"));
  auto vertex_of = [&](const std::string& n) -> std::optional<int> {
    for (size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i] == n) return static_cast<int>(i);
    return std::nullopt;
  };
  std::vector<KEdge> edges;
  for (const auto& e : field(doc, "edges"))
    edges.push_back({str(field(e, "name"), "edge name"), integer(field(e, "color"), "color") - 1,
                     lookup(vertex_of, field(e, "range"), "vertex"), lookup(vertex_of, field(e, "source"), "vertex")});
  auto edge_of = [&](const std::string& n) -> std::optional<int> {
    for (size_t i = 0; i < edges.size(); ++i)
      if (edges[i].name == n) return static_cast<int>(i);
    return std::nullopt;
  };
  std::vector<KSquare> squares;
  if (doc.contains("squares"))
    for (const auto& q : doc.at("squares")) {
      if (!q.is_array() || q.size() != 4) bad("squares are [f, g, g', f']");
      squares.push_back({lookup(edge_of, q[0], "edge"), lookup(edge_of, q[1], "edge"), lookup(edge_of, q[2], "edge"),
                         lookup(edge_of, q[3], "edge")});
    }
  try {
    return KGraphSkeleton(k, vertices, edges, squares);
  } catch (const Error& e) {
    bad(e.what());
  }
}

json to_json(const KGraphSkeleton& s) {
  json doc;
  doc["kind"] = "skeleton";
  doc["k"] = s.rank();
  doc["vertices"] = s.vertices();
  json edges = json::array(), squares = json::array();
  for (const auto& e : s.edges())
    edges.push_back({{"name", e.name}, {"color", e.color + 1}, {"range", s.vertices()[e.range]}, {"source", s.vertices()[e.source]}});
  for (const auto& q : s.squares())
    squares.push_back({s.edge(q.f).name, s.edge(q.g).name, s.edge(q.g2).name, s.edge(q.f2).name});
  doc["edges"] = edges;
  doc["squares"] = squares;
  return doc;
}

bool has_subgroup(const json& doc) { return doc.is_object() && doc.contains("H"); }

IntMat int_matrix_from_json(const json& rows, int cols_if_empty) {
  if (!rows.is_array()) bad("integer matrices are arrays of rows");
  if (rows.empty()) return IntMat(0, cols_if_empty);
  const size_t c = rows[0].is_array() ? rows[0].size() : 0;
  IntMat m(rows.size(), c);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != c) bad("integer matrix rows have different lengths");
    for (size_t j = 0; j < c; ++j) {
      if (!rows[i][j].is_number_integer()) bad("integer matrix entries must be integers");
      m(i, j) = rows[i][j].get<std::int64_t>();
    }
  }
  return m;
}

json to_json(const IntMat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Subgroup subgroup_from_json(const json& gens, int k) {
  const IntMat rows = int_matrix_from_json(gens, k);
  if (rows.cols() != k) bad("subgroup generators must have length " + std::to_string(k));
  return {k, rows.transpose()};
}

PGraphPresentation pgraph_from_json(const json& doc) {
  KGraphSkeleton gamma = skeleton_from_json(doc);
  const json& hj = field(doc, "H");
  int k = 0;
  if (doc.contains("ambient_rank")) k = integer(doc.at("ambient_rank"), "ambient_rank");
  else if (!hj.empty()) k = static_cast<int>(hj[0].size());
  else k = gamma.rank();
  std::optional<IntMat> phi;
  if (doc.contains("degree_map")) phi = int_matrix_from_json(doc.at("degree_map"), k);
  return make_pgraph(subgroup_from_json(hj, k), phi, std::move(gamma));
}

json to_json(const PGraphPresentation& pg) {
  json doc = to_json(pg.gamma);
  doc["ambient_rank"] = pg.h.k;
  doc["H"] = to_json(IntMat(pg.h.basis.transpose()));
  doc["degree_map"] = to_json(pg.phi);
  return doc;
}

// ---- cocycles ------------------------------------------------------------------------

RatMat theta_from_json(const json& rows) {
  if (!rows.is_array()) bad("theta is an array of rows");
  RatMat m;
  for (const auto& r : rows) {
    if (!r.is_array() || r.size() != rows.size()) bad("theta must be square");
    std::vector<Rational> row;
    for (const auto& x : r) {
      if (x.is_number_integer()) row.emplace_back(x.get<std::int64_t>());
      else if (x.is_string()) row.push_back(parse_rational(x.get<std::string>()));
      else if (x.is_number()) throw Error(ErrorKind::IrrationalPhase, "phase " + x.dump() + " is not an exact rational p/q");
      else bad("theta entries are \"p/q\" strings");
    }
    m.push_back(row);
  }
  return m;
}

json to_json(const RatMat& m) {
  json rows = json::array();
  for (const auto& r : m) {
    json row = json::array();
    for (const auto& x : r) row.push_back(format_rational(x));
    rows.push_back(row);
  }
  return rows;
}

CocycleAssignment assignment_from_json(const json& doc, const KGraphSkeleton& lambda) {
  CocycleAssignment ca;
  if (doc.contains("theta")) {
    const RationalCocycle c = make_cocycle(theta_from_json(doc.at("theta")));
    for (const auto& v : lambda.vertices()) ca.entries.push_back({{v, {}}, c});
    return ca;
  }
  for (const auto& c : field(doc, "cylinders")) {
    Cylinder cyl{str(field(c, "vertex"), "vertex"), {}};
    if (c.contains("path"))
      for (const auto& e : c.at("path")) cyl.path.push_back(str(e, "edge"));
    ca.entries.push_back({cyl, make_cocycle(theta_from_json(field(c, "theta")))});
  }
  return ca;
}

// ---- reports -----------------------------------------------------------------------

json to_json(const ValidationReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) v.push_back({{"axiom", x.axiom}, {"witness", x.witness}, {"residual", x.residual}});
  return {{"valid", r.valid()}, {"violations", v}};
}

json to_json(const VerificationReport& r) {
  json lines = json::array(), summary = json::array();
  for (const auto& l : r.lines)
    lines.push_back({{"identity", l.identity}, {"where", l.where}, {"residual", l.residual}, {"ok", l.residual <= r.tolerance}});
  for (const auto& id : r.identities()) summary.push_back({{"identity", id}, {"max_residual", r.max_residual(id)}});
  return {{"tolerance", r.tolerance}, {"passed", r.passed()}, {"summary", summary}, {"lines", lines}};
}

json to_json(const MoritaReport& m) {
  auto alg = [](const AlgebraSummary& a) { return json{{"dim", a.dim}, {"center", a.center}, {"blocks", a.blocks}}; };
  return {{"original", alg(m.original)}, {"stabilized", alg(m.stabilized)},
          {"lattices_isomorphic", m.lattices_isomorphic}, {"matches", m.matches()}};
}

json to_json(const KGraphSkeleton& s, const AperiodicityResult& r) {
  json out{{"aperiodic", tri(r.aperiodic)}};
  json w = json::object();
  for (const auto& [v, p] : r.witnesses) w[s.vertices()[v]] = to_string(s, p);
  out["witnesses"] = w;
  if (r.certificate)
    out["certificate"] = {{"vertex", s.vertices()[r.certificate->vertex]}, {"p", r.certificate->p}, {"q", r.certificate->q}};
  json und = json::array();
  for (VertexId v : r.undecided) und.push_back(s.vertices()[v]);
  out["undecided"] = und;
  return out;
}

json to_json(const KGraphSkeleton& s, const StrongAperiodicity& r) {
  auto checks = [&](const std::vector<SubgraphCheck>& cs) {
    json a = json::array();
    for (const auto& c : cs) a.push_back({{"vertices", format_set(s, c.vertices)}, {"result", to_json(s.restrict(c.vertices), c.result)}});
    return a;
  };
  return {{"strongly_aperiodic", tri(r.strongly_aperiodic)},
          {"by_hereditary_complements", tri(r.by_hereditary)},
          {"by_maximal_tails", tri(r.by_tails)},
          {"contradictory", r.contradictory},
          {"certificate", r.certificate},
          {"hereditary_checks", checks(r.hereditary_checks)},
          {"tail_checks", checks(r.tail_checks)}};
}

json to_json(const DualShape& d) { return {{"torus_rank", d.torus_rank}, {"invariant_factors", d.finite}}; }

json to_json(const PrimStratification& p) {
  json strata = json::array();
  for (const auto& s : p.strata)
    strata.push_back({{"omega", to_json(s.omega.omega)},
                      {"cylinders", s.cylinders},
                      {"orbit_classes", s.orbit_classes},
                      {"symmetrizer_basis", to_json(IntMat(s.symmetrizer.subgroup.basis.transpose()))},
                      {"index", s.symmetrizer.index},
                      {"dual", to_json(s.symmetrizer.dual)}});
  return strata;
}

}  // namespace fellstab
