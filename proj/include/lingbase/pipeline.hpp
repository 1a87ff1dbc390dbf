#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lingbase/completion.hpp"
#include "lingbase/core.hpp"

namespace lingbase {

/// One parsed command invocation. Commands exchange data only through
/// the filesystem: `ingest` writes the canonical dataset that the
/// other commands read back via data_dir.
struct RunConfig {
  std::string out_dir;
  std::uint64_t seed = 0;

  // ingest inputs
  std::string catalog_path;
  std::string scripts_path;
  std::string lang_scripts_path;
  std::string schema_path;  // empty = built-in Type/Case/Ligatures rules
  std::vector<std::string> feature_paths;

  // downstream inputs
  std::string data_dir;        // canonical dataset directory
  std::string matrix_path;     // explicit feature matrix (distance/stats)
  std::string distances_path;  // our distance matrix (correlate)
  std::string against_path;    // external distance matrix (correlate)

  std::string method = "lineage+softimpute";  // impute/eval
  std::string aggregation = "union";          // union | average
  std::string category;                       // distance
  std::string stat;                           // coverage | sparsity
  std::string scope = "covered";              // sparsity: covered | all
  double holdout = 0.2;
  CompletionConfig completion;
  std::size_t n_perm = 999;
  double alpha_family = 0.05;
  std::size_t m_tests = 7;
};

void cmd_ingest(const RunConfig& cfg);
void cmd_impute(const RunConfig& cfg);
void cmd_distance(const RunConfig& cfg);
void cmd_stats(const RunConfig& cfg);
void cmd_correlate(const RunConfig& cfg);
void cmd_eval(const RunConfig& cfg);

}  // namespace lingbase
