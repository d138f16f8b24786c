// Writes the fixture corpus. Usage: make_fixtures <fixtures-dir>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fellstab/interchange.hpp"
#include "kgraph_suite.hpp"
#include "suite.hpp"

using namespace fellstab;
namespace fs = std::filesystem;

namespace {

fs::path root;

void write(const std::string& name, const json& doc) {
  std::ofstream(root / name) << canonical(doc);
}

json complex_value(cplx z) { return json::array({z.real(), z.imag()}); }

// Line bundles are stored as their phase table.
json cocycle_bundle(const FiniteGroupoid& g, const CocycleFn& sigma) {
  json doc;
  doc["kind"] = "bundle";
  doc["groupoid"] = to_json(g);
  json table = json::array();
  for (ArrowId a = 0; a < g.num_arrows(); ++a)
    for (ArrowId b = 0; b < g.num_arrows(); ++b)
      if (g.composable(a, b))
        table.push_back({{"g", g.arrow_name(a)}, {"h", g.arrow_name(b)}, {"value", complex_value(sigma(a, b))}});
  doc["cocycle"] = table;
  return doc;
}

json pgraph(const PGraphPresentation& pg) {
  json doc = to_json(pg);
  doc["kind"] = "pgraph";
  return doc;
}

json theta_doc(const RatMat& theta) { return {{"kind", "cocycle"}, {"theta", to_json(theta)}}; }

RatMat zeros(int k) { return RatMat(k, std::vector<Rational>(k)); }

RatMat upper(int k, int i, int j, Rational t) {
  RatMat m = zeros(k);
  m[i][j] = t;
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <fixtures-dir>\n";
    return 1;
  }
  root = argv[1];
  fs::create_directories(root);

  // groupoids
  write("pair2.groupoid.json", to_json(pair_groupoid(2)));
  {
    json broken = to_json(pair_groupoid(2));
    // Redirect the first non-trivial product to the wrong arrow.
    for (auto& c : broken["compose"])
      if (c[0] != c[1]) {
        c[2] = c[0];
        break;
      }
    write("pair2-broken.groupoid.json", broken);
  }
  write("swap-action.groupoid.json", to_json(suite::swap_action()));
  write("trivial-action.groupoid.json", to_json(action_groupoid({{0, 1}, {1, 0}}, {{0, 1}, {0, 1}})));

  // bundles
  write("pair2-trivial.bundle.json", cocycle_bundle(pair_groupoid(2), suite::trivial));
  write("pair3-trivial.bundle.json", cocycle_bundle(pair_groupoid(3), suite::trivial));
  write("z2-trivial.bundle.json", cocycle_bundle(cyclic_group(2), suite::trivial));
  write("z3-trivial.bundle.json", cocycle_bundle(cyclic_group(3), suite::trivial));
  write("klein-twisted.bundle.json", cocycle_bundle(klein_four(), suite::klein_twist));
  write("klein-untwisted.bundle.json", cocycle_bundle(klein_four(), suite::trivial));
  write("two-pair-components.bundle.json",
        cocycle_bundle(disjoint_union(pair_groupoid(2), pair_groupoid(2)), suite::trivial));
  write("swap-action.bundle.json", cocycle_bundle(suite::swap_action(), suite::trivial));
  write("pair2-flip-system.bundle.json", to_json(suite::pair_flip_system()));
  write("z2-flip-system.bundle.json", to_json(suite::z2_flip_system()));
  // Only one entry is -1: not a 2-cocycle.
  write("klein-broken.bundle.json",
        cocycle_bundle(klein_four(), [](ArrowId g, ArrowId h) { return cplx(g == 1 && h == 2 ? -1.0 : 1.0); }));

  // skeletons
  for (const auto& [name, s] : suite::aperiodicity_suite()) write(name + ".skeleton.json", to_json(s));
  {
    json src = to_json(suite::one_graph({"u", "v"}, {{"a", "v", "v"}, {"e", "v", "u"}}));
    write("source-vertex.skeleton.json", src);
  }

  // P-graphs and cocycles
  const auto point = make_pgraph(full_subgroup(2), std::nullopt, KGraphSkeleton(0, {"v"}, {}, {}));
  write("point-z2.pgraph.json", pgraph(point));
  write("theta-1-2.cocycle.json", theta_doc(upper(2, 0, 1, Rational(1, 2))));
  write("theta-1-3.cocycle.json", theta_doc(upper(2, 0, 1, Rational(1, 3))));
  write("theta-2-5.cocycle.json", theta_doc(upper(2, 0, 1, Rational(2, 5))));
  {
    IntMat h(2, 1);
    h << 1, -1;
    write("two-loops-diagonal.pgraph.json", pgraph(make_pgraph({2, h}, std::nullopt, suite::two_loops())));
  }
  {
    IntMat h(2, 1);
    h << 1, -1;
    write("chain-diagonal.pgraph.json", pgraph(make_pgraph({2, h}, std::nullopt, suite::chain(1))));
  }
  write("flip-2-1-principal.pgraph.json", pgraph(make_pgraph(zero_subgroup(2), std::nullopt, suite::flip_loops(2, 1))));
  write("two-loops-principal.pgraph.json", pgraph(make_pgraph(zero_subgroup(1), std::nullopt, suite::two_loops())));
  write("single-loop-principal.pgraph.json", pgraph(make_pgraph(zero_subgroup(1), std::nullopt, suite::single_loop())));
  {
    IntMat b(3, 2);
    b << 1, 0, -1, 1, 0, -1;
    write("two-components.pgraph.json",
          pgraph(make_pgraph({3, b}, std::nullopt, suite::disjoint(suite::two_loops(), suite::two_loops()))));
    json cyl = json::array();
    cyl.push_back({{"vertex", "L:v"}, {"theta", to_json(upper(3, 0, 1, Rational(1, 2)))}});
    cyl.push_back({{"vertex", "R:v"}, {"theta", to_json(zeros(3))}});
    write("two-components.cocycle.json", {{"kind", "cocycle"}, {"cylinders", cyl}});
  }

  // lattices and symmetrizers
  write("diag-2-3.matrix.json", {{"kind", "matrix"}, {"rows", {{2, 0}, {0, 3}}}});
  write("rank-deficient.matrix.json", {{"kind", "matrix"}, {"rows", {{2, 4, 4}, {-6, 6, 12}, {4, 8, 8}}}});
  write("omega-1-3.cocycle.json", theta_doc(upper(2, 0, 1, Rational(1, 3))));
  write("omega-1-2.cocycle.json", theta_doc(upper(2, 0, 1, Rational(1, 2))));
  {
    json doc = theta_doc(upper(2, 0, 1, Rational(1, 4)));
    doc["H"] = {{1, 1}};
    write("diagonal-quarter.cocycle.json", doc);
  }
  return 0;
}
