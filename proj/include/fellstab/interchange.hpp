#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "fellstab/cocycle.hpp"
#include "fellstab/fell_bundle.hpp"
#include "fellstab/kgraph.hpp"
#include "fellstab/prim.hpp"
#include "fellstab/stabilization.hpp"

namespace fellstab {

using json = nlohmann::ordered_json;

/// Reads a file; ParseError carries the path and byte offset.
json read_document(const std::string& path);
json parse_document(const std::string& text, const std::string& origin = "<input>");
/// Pretty-printed with a trailing newline; the canonical form of a document.
std::string canonical(const json& doc);
/// The "kind" discriminator.
std::string document_kind(const json& doc);

FiniteGroupoid groupoid_from_json(const json& doc);
json to_json(const FiniteGroupoid& g);

/// Explicit structure tensors, or a "cocycle" table for line bundles.
FellBundle bundle_from_json(const json& doc);
json to_json(const FellBundle& b);

KGraphSkeleton skeleton_from_json(const json& doc);
json to_json(const KGraphSkeleton& s);
/// A skeleton document with an "H" field (and optionally "degree_map").
PGraphPresentation pgraph_from_json(const json& doc);
json to_json(const PGraphPresentation& pg);
bool has_subgroup(const json& doc);

/// Either one "theta" for every vertex of `lambda` or a list of "cylinders".
CocycleAssignment assignment_from_json(const json& doc, const KGraphSkeleton& lambda);
RatMat theta_from_json(const json& rows);
json to_json(const RatMat& m);

IntMat int_matrix_from_json(const json& rows, int cols_if_empty = 0);
json to_json(const IntMat& m);
/// Columns of the result are the listed generators.
Subgroup subgroup_from_json(const json& gens, int k);

json to_json(const ValidationReport& r);
json to_json(const VerificationReport& r);
json to_json(const MoritaReport& m);
json to_json(const KGraphSkeleton& s, const AperiodicityResult& r);
json to_json(const KGraphSkeleton& s, const StrongAperiodicity& r);
json to_json(const PrimStratification& p);
json to_json(const DualShape& d);

}  // namespace fellstab
