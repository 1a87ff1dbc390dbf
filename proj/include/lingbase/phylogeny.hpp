#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lingbase/core.hpp"

namespace lingbase {

/// Validated forest over catalog codes. Children lists and roots are
/// lexicographically sorted so traversals are reproducible.
struct Phylogeny {
  std::vector<std::string> nodes;  // sorted
  std::map<std::string, std::vector<std::string>> children;
  std::map<std::string, std::string> parent;
  std::vector<std::string> roots;  // nodes with no parent, sorted
};

/// Builds the forest from parent links. Rejects parent codes missing
/// from the catalog and any cycle (the error message lists the cycle).
Phylogeny build_phylogeny(const std::vector<LanguageRecord>& records);

/// Fill audit for one lineage-imputation run. Every output language and
/// feature appears, zero-fill entries included.
struct ImputationTrace {
  std::size_t filled = 0;
  std::map<std::string, std::size_t> per_language;
  std::map<std::string, std::size_t> per_feature;
};

/// Breadth-first propagation down each tree: a child cell that is
/// missing while its parent cell is observed takes the parent value.
/// Observed cells are never modified. Phylogeny nodes absent from the
/// matrix are materialized as all-missing rows first, so output rows
/// cover the union of matrix languages and forest nodes.
std::pair<FeatureMatrix, ImputationTrace> lineage_impute(const FeatureMatrix& m,
                                                         const Phylogeny& p);

/// Single-threaded reference for lineage_impute; bit-identical output.
std::pair<FeatureMatrix, ImputationTrace> lineage_impute_serial(const FeatureMatrix& m,
                                                                const Phylogeny& p);

/// Fraction of (parent, child, feature) triples with both cells
/// observed and equal, over features in `category` (all features when
/// absent). nullopt when no triple qualifies.
std::optional<double> parent_child_agreement(const FeatureMatrix& m, const Phylogeny& p,
                                             std::optional<Category> category = std::nullopt);

void write_trace_language_csv(const std::string& path, const ImputationTrace& t);
void write_trace_feature_csv(const std::string& path, const ImputationTrace& t);

}  // namespace lingbase
