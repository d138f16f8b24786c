#include <fstream>
#include <iostream>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"

#include "fellstab/error.hpp"
#include "fellstab/interchange.hpp"

using namespace fellstab;

namespace {

enum Exit { kOk = 0, kError = 1, kInvalid = 2, kHypothesis = 3, kUnknown = 4 };

struct Config {
  double tolerance = kDefaultTolerance;
  int depth = kDefaultDepth;
  int jobs = 0;
  std::string report;
  std::string format = "text";
  bool corrupt_alpha = false;
  bool assume_strong = false;
};

struct Output {
  std::string text;
  json structured;
  int status = kOk;
};

int emit(const Config& cfg, const Output& out) {
  const std::string body = cfg.format == "structured" ? canonical(out.structured) : out.text;
  if (cfg.report.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(cfg.report);
    if (!f) {
      std::cerr << "cannot write " << cfg.report << "\n";
      return kError;
    }
    f << body;
    std::cout << "report written to " << cfg.report << " (exit " << out.status << ")\n";
  }
  return out.status;
}

std::string degree_text(const Degree& d) {
  std::string o = "(";
  for (size_t i = 0; i < d.size(); ++i) o += (i ? "," : "") + std::to_string(d[i]);
  return o + ")";
}

std::string rat_matrix_text(const RatMat& m) {
  std::string o = "[";
  for (size_t i = 0; i < m.size(); ++i) {
    o += i ? ",[" : "[";
    for (size_t j = 0; j < m[i].size(); ++j) o += (j ? "," : "") + format_rational(m[i][j]);
    o += "]";
  }
  return o + "]";
}

std::string int_matrix_text(const IntMat& m) {
  std::string o = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    o += i ? ",[" : "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) o += (j ? "," : "") + std::to_string(m(i, j));
    o += "]";
  }
  return o + "]";
}

std::string dual_text(const DualShape& d) {
  std::string o = "torus rank " + std::to_string(d.torus_rank) + ", invariant factors ";
  if (d.finite.empty()) return o + "none";
  for (size_t i = 0; i < d.finite.size(); ++i) o += (i ? "," : "") + std::to_string(d.finite[i]);
  return o;
}

SearchLimits limits(const Config& cfg) {
  SearchLimits lim;
  lim.depth = cfg.depth;
  return lim;
}

PGraphPresentation load_pgraph(const json& doc) {
  if (has_subgroup(doc)) return pgraph_from_json(doc);
  KGraphSkeleton s = skeleton_from_json(doc);
  const int k = s.rank();
  return make_pgraph(zero_subgroup(k), std::nullopt, std::move(s));
}

// ---- commands -------------------------------------------------------------------

Output cmd_validate(const Config& cfg, const std::string& path) {
  const json doc = read_document(path);
  const std::string kind = document_kind(doc);
  ValidationReport rep;
  if (kind == "groupoid") {
    rep = validate_groupoid(groupoid_from_json(doc));
  } else if (kind == "bundle") {
    const FellBundle b = bundle_from_json(doc);
    rep = validate_groupoid(b.base());
    if (rep.valid()) rep = validate_bundle(b, cfg.tolerance);
  } else if (kind == "skeleton" || kind == "pgraph") {
    const KGraphSkeleton s = skeleton_from_json(doc);
    rep = validate_skeleton(s);
    if (rep.valid() && has_subgroup(doc)) pgraph_from_json(doc);
  } else if (kind == "cocycle") {
    if (doc.contains("theta")) theta_from_json(doc.at("theta"));
    else
      for (const auto& c : doc.at("cylinders")) theta_from_json(c.at("theta"));
  } else if (kind == "matrix") {
    int_matrix_from_json(doc.at("rows"));
  } else {
    throw Error(ErrorKind::ParseError, "unknown document kind '" + kind + "'");
  }
  Output out;
  out.text = kind + ": " + rep.to_text();
  out.structured = {{"kind", "validation_report"}, {"document", kind}};
  out.structured.update(to_json(rep));
  out.status = rep.valid() ? kOk : kInvalid;
  return out;
}

Output cmd_stabilize(const Config& cfg, const std::string& path) {
  const FellBundle b = bundle_from_json(read_document(path));
  Output out;
  const ValidationReport pre = validate_bundle(b, cfg.tolerance);
  if (!pre.valid()) {
    out.text = "bundle is not valid:\n" + pre.to_text();
    out.structured = {{"kind", "stabilization_report"}, {"bundle_valid", false}, {"validation", to_json(pre)}};
    out.status = kInvalid;
    return out;
  }
  StabilizeOptions opt;
  opt.tolerance = cfg.tolerance;
  opt.corrupt_alpha = cfg.corrupt_alpha;
  const Stabilization s = stabilize(b, opt);
  std::ostringstream os;
  os << s.report.to_text();
  if (!s.failed_stage.empty()) {
    os << "stage " << s.failed_stage << " failed: " << s.failure << "\n";
  } else {
    const auto& m = s.morita;
    auto blocks = [](const std::vector<int>& v) {
      std::string o = "{";
      for (size_t i = 0; i < v.size(); ++i) o += (i ? "," : "") + std::to_string(v[i]);
      return o + "}";
    };
    os << "morita: original dim=" << m.original.dim << " center=" << m.original.center << " blocks=" << blocks(m.original.blocks)
       << "; stabilized dim=" << m.stabilized.dim << " center=" << m.stabilized.center
       << " blocks=" << blocks(m.stabilized.blocks) << "; lattices " << (m.lattices_isomorphic ? "isomorphic" : "differ")
       << (m.matches() ? " -> match" : " -> MISMATCH") << "\n";
  }
  const bool ok = s.failed_stage.empty() && s.report.passed() && s.morita.matches();
  os << (ok ? "stabilization verified\n" : "stabilization FAILED\n");
  out.text = os.str();
  out.structured = {{"kind", "stabilization_report"}, {"bundle_valid", true}, {"verification", to_json(s.report)},
                    {"failed_stage", s.failed_stage}, {"failure", s.failure}, {"passed", ok}};
  if (s.failed_stage.empty()) out.structured["morita"] = to_json(s.morita);
  out.status = ok ? kOk : kInvalid;
  return out;
}

Output cmd_prim(const Config& cfg, const std::string& pgraph_path, const std::string& cocycle_path) {
  const PGraphPresentation pg = load_pgraph(read_document(pgraph_path));
  const KGraphSkeleton lambda = pullback(pg);
  std::optional<CocycleAssignment> ca;
  if (!cocycle_path.empty()) ca = assignment_from_json(read_document(cocycle_path), lambda);
  const PrimReport rep = run_prim(pg, ca, limits(cfg), cfg.assume_strong);

  std::ostringstream os;
  const auto& g = rep.gamma_check;
  os << "gate: Gamma strongly aperiodic = " << to_string(g.strongly_aperiodic) << " (hereditary complements "
     << to_string(g.by_hereditary) << ", maximal tails " << to_string(g.by_tails) << ")\n";
  os << "isotropy interior: " << rep.interior.description << "\n";
  os << "pullback: k=" << rep.lambda.rank() << ", " << rep.lambda.vertex_count() << " vertices, "
     << rep.lambda.edges().size() << " edges\n";
  os << "strata: " << rep.strata.strata.size() << "\n";
  int i = 0;
  for (const auto& s : rep.strata.strata) {
    os << "  [" << ++i << "] omega=" << rat_matrix_text(s.omega.omega) << "\n";
    os << "      cylinders:";
    for (const auto& c : s.cylinders) os << " " << c;
    os << "\n      orbit classes: " << s.orbit_classes.size() << "\n";
    os << "      symmetrizer: index " << s.symmetrizer.index << ", basis "
       << int_matrix_text(IntMat(s.symmetrizer.subgroup.basis.transpose())) << "\n";
    os << "      dual: " << dual_text(s.symmetrizer.dual) << "\n";
  }
  os << "ideals (" << rep.ideals.label << "): " << rep.ideals.hereditary.size() << " saturated hereditary sets:";
  for (VertexSet h : rep.ideals.hereditary) os << " " << format_set(rep.lambda, h);
  os << "\n";

  Output out;
  out.text = os.str();
  json ideals = json::array();
  for (VertexSet h : rep.ideals.hereditary) ideals.push_back(format_set(rep.lambda, h));
  out.structured = {{"kind", "prim_report"},
                    {"gate", to_json(pg.gamma, rep.gamma_check)},
                    {"isotropy_interior", rep.interior.description},
                    {"pullback", to_json(rep.lambda)},
                    {"strata", to_json(rep.strata)},
                    {"ideals", {{"label", rep.ideals.label}, {"saturated_hereditary_sets", ideals}}}};
  return out;
}

Output cmd_aperiodicity(const Config& cfg, const std::string& path) {
  const KGraphSkeleton s = skeleton_from_json(read_document(path));
  Output out;
  const ValidationReport v = validate_skeleton(s);
  if (!v.valid()) {
    out.text = "skeleton: " + v.to_text();
    out.structured = {{"kind", "aperiodicity_report"}, {"validation", to_json(v)}};
    out.status = kInvalid;
    return out;
  }
  const auto ap = aperiodicity(s, limits(cfg));
  const auto sa = strong_aperiodicity(s, limits(cfg));
  std::ostringstream os;
  os << "aperiodic: " << to_string(ap.aperiodic) << "\n";
  for (const auto& [vtx, w] : ap.witnesses) os << "  witness at " << s.vertices()[vtx] << ": " << to_string(s, w) << "\n";
  if (ap.certificate)
    os << "  period at " << s.vertices()[ap.certificate->vertex] << ": p=" << degree_text(ap.certificate->p)
       << " q=" << degree_text(ap.certificate->q) << "\n";
  for (VertexId vtx : ap.undecided) os << "  undecided at " << s.vertices()[vtx] << "\n";
  os << "strongly aperiodic: " << to_string(sa.strongly_aperiodic) << " (hereditary complements "
     << to_string(sa.by_hereditary) << ", maximal tails " << to_string(sa.by_tails) << ")\n";
  if (!sa.certificate.empty()) os << "  " << sa.certificate << "\n";
  if (sa.contradictory) os << "  the two conditions disagree\n";
  out.text = os.str();
  out.structured = {{"kind", "aperiodicity_report"}, {"depth", cfg.depth}, {"aperiodicity", to_json(s, ap)},
                    {"strong", to_json(s, sa)}};
  out.status = sa.contradictory || sa.strongly_aperiodic == Tri::unknown || ap.aperiodic == Tri::unknown ? kUnknown : kOk;
  return out;
}

Output cmd_ideals(const Config& cfg, const std::string& path) {
  const KGraphSkeleton s = skeleton_from_json(read_document(path));
  const auto lat = gauge_invariant_ideals(s, limits(cfg));
  Output out;
  std::ostringstream os;
  os << lat.label << ": " << lat.hereditary.size() << "\n";
  json sets = json::array();
  for (VertexSet h : lat.hereditary) {
    os << "  " << format_set(s, h) << "\n";
    sets.push_back(format_set(s, h));
  }
  out.text = os.str();
  out.structured = {{"kind", "ideal_lattice"}, {"label", lat.label}, {"saturated_hereditary_sets", sets}};
  return out;
}

Output cmd_tails(const Config&, const std::string& path) {
  const KGraphSkeleton s = skeleton_from_json(read_document(path));
  Output out;
  std::ostringstream os;
  const auto tails = maximal_tails(s);
  os << "maximal tails: " << tails.size() << "\n";
  json arr = json::array();
  for (VertexSet t : tails) {
    os << "  " << format_set(s, t) << "\n";
    arr.push_back(format_set(s, t));
  }
  out.text = os.str();
  out.structured = {{"kind", "maximal_tails"}, {"tails", arr}};
  return out;
}

Output cmd_snf(const Config&, const std::string& path) {
  const json doc = read_document(path);
  const IntMat a = int_matrix_from_json(doc.at("rows"));
  const SmithForm s = smith_normal_form(a);
  Output out;
  std::ostringstream os;
  os << "D = " << int_matrix_text(s.D) << "\nU = " << int_matrix_text(s.U) << "\nV = " << int_matrix_text(s.V)
     << "\nrank " << s.rank << ", invariant factors";
  for (int i = 0; i < s.rank; ++i) os << " " << s.D(i, i);
  os << "\n";
  out.text = os.str();
  out.structured = {{"kind", "smith_normal_form"}, {"D", to_json(s.D)}, {"U", to_json(s.U)}, {"V", to_json(s.V)}, {"rank", s.rank}};
  return out;
}

Output cmd_symmetrizer(const Config&, const std::string& path) {
  const json doc = read_document(path);
  const RationalCocycle c = make_cocycle(theta_from_json(doc.at("theta")));
  const Subgroup h = doc.contains("H") ? subgroup_from_json(doc.at("H"), c.m) : full_subgroup(c.m);
  const Bicharacter om = bicharacter(restrict_cocycle(c, h));
  const Symmetrizer z = symmetrizer(om, h);
  Output out;
  std::ostringstream os;
  os << "omega on H = " << rat_matrix_text(om.omega) << "\n";
  os << "symmetrizer basis = " << int_matrix_text(IntMat(z.subgroup.basis.transpose())) << "\n";
  os << "index " << z.index << "\n";
  os << "dual: " << dual_text(z.dual) << "\n";
  out.text = os.str();
  out.structured = {{"kind", "symmetrizer"}, {"omega", to_json(om.omega)},
                    {"basis", to_json(IntMat(z.subgroup.basis.transpose()))}, {"index", z.index},
                    {"dual", to_json(z.dual)}};
  return out;
}

int status_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError: return kError;
    case ErrorKind::HypothesisFailed: return kHypothesis;
    case ErrorKind::HypothesisUnknown: return kUnknown;
    default: return kInvalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fell bundle stabilization and higher-rank graph primitive ideal toolkit"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--tolerance", cfg.tolerance, "Residual tolerance")->capture_default_str();
  app.add_option("--depth", cfg.depth, "Search depth per coordinate")->capture_default_str();
  app.add_option("--jobs", cfg.jobs, "Worker threads (0 = runtime default)");
  app.add_option("--report", cfg.report, "Write the report to this file");
  app.add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"text", "structured"}))->capture_default_str();

  std::string path, path2;
  std::function<Output()> run;

  auto* validate = app.add_subcommand("validate", "Validate a groupoid, bundle, skeleton, cocycle or matrix document");
  validate->add_option("path", path)->required();
  validate->callback([&] { run = [&] { return cmd_validate(cfg, path); }; });

  auto* stab = app.add_subcommand("stabilize", "Stabilize a Fell bundle and verify every identity");
  stab->add_option("bundle", path)->required();
  stab->add_flag("--debug-corrupt-alpha", cfg.corrupt_alpha, "Perturb alpha after solving (negative control)");
  stab->callback([&] { run = [&] { return cmd_stabilize(cfg, path); }; });

  auto* prim = app.add_subcommand("prim", "Primitive ideal stratification of a pullback graph");
  prim->add_option("pgraph", path)->required();
  prim->add_option("cocycle", path2);
  prim->add_flag("--assume-strong", cfg.assume_strong, "Proceed when strong aperiodicity is undecided");
  prim->callback([&] { run = [&] { return cmd_prim(cfg, path, path2); }; });

  auto* kg = app.add_subcommand("kgraph", "Higher-rank graph structure");
  kg->require_subcommand(1);
  auto* ap = kg->add_subcommand("aperiodicity", "Aperiodicity and strong aperiodicity");
  ap->add_option("skeleton", path)->required();
  ap->callback([&] { run = [&] { return cmd_aperiodicity(cfg, path); }; });
  auto* id = kg->add_subcommand("ideals", "Saturated hereditary sets");
  id->add_option("skeleton", path)->required();
  id->callback([&] { run = [&] { return cmd_ideals(cfg, path); }; });
  auto* tl = kg->add_subcommand("tails", "Maximal tails");
  tl->add_option("skeleton", path)->required();
  tl->callback([&] { run = [&] { return cmd_tails(cfg, path); }; });

  auto* lat = app.add_subcommand("lattice", "Integer lattices");
  lat->require_subcommand(1);
  auto* snf = lat->add_subcommand("snf", "Smith normal form");
  snf->add_option("matrix", path)->required();
  snf->callback([&] { run = [&] { return cmd_snf(cfg, path); }; });

  auto* coc = app.add_subcommand("cocycle", "Rational cocycles");
  coc->require_subcommand(1);
  auto* sym = coc->add_subcommand("symmetrizer", "Symmetrizer subgroup and dual shape");
  sym->add_option("cocycle", path)->required();
  sym->callback([&] { run = [&] { return cmd_symmetrizer(cfg, path); }; });

  for (auto* sc : {validate, stab, prim, kg, ap, id, tl, lat, snf, coc, sym}) sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  }
  if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);
  try {
    return emit(cfg, run());
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return status_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}
