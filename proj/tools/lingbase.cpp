#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "lingbase/pipeline.hpp"

namespace {

void add_common(CLI::App* cmd, lingbase::RunConfig& cfg) {
  cmd->add_option("--out", cfg.out_dir, "output directory")->required();
  cmd->add_option("--seed", cfg.seed, "root seed for every random choice in this run");
}

void add_completion(CLI::App* cmd, lingbase::RunConfig& cfg) {
  cmd->add_option("--lambda", cfg.completion.lambda_grid,
                  "descending lambda grid (default: automatic geometric grid)");
  cmd->add_option("--tolerance", cfg.completion.tolerance,
                  "relative change threshold for convergence");
  cmd->add_option("--max-iterations", cfg.completion.max_iterations,
                  "iteration cap per lambda");
  cmd->add_option("--validation-fraction", cfg.completion.validation_fraction,
                  "observed fraction held out to pick lambda");
}

void add_method(CLI::App* cmd, lingbase::RunConfig& cfg) {
  cmd->add_option("--method", cfg.method, "lineage, softimpute, or lineage+softimpute")
      ->check(CLI::IsMember({"lineage", "softimpute", "lineage+softimpute"}));
  cmd->add_option("--agg", cfg.aggregation, "source aggregation: union or average")
      ->check(CLI::IsMember({"union", "average"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse language feature base: ingest, impute, compare, report"};
  app.require_subcommand(1);
  lingbase::RunConfig cfg;

  auto* ingest = app.add_subcommand("ingest", "validate raw tables into a canonical dataset");
  add_common(ingest, cfg);
  ingest->add_option("--catalog", cfg.catalog_path, "language catalog CSV")->required();
  ingest->add_option("--features", cfg.feature_paths,
                     "feature matrix CSVs named features_<source>.csv");
  ingest->add_option("--scripts", cfg.scripts_path, "script property table (TSV)");
  ingest->add_option("--lang-scripts", cfg.lang_scripts_path, "language-to-script map CSV");
  ingest->add_option("--schema", cfg.schema_path,
                     "script binarization rules JSON (default: built-in rules)");

  auto* impute = app.add_subcommand("impute", "fill missing cells and persist the result");
  add_common(impute, cfg);
  impute->add_option("--data", cfg.data_dir, "canonical dataset from `ingest`")->required();
  add_method(impute, cfg);
  add_completion(impute, cfg);

  auto* distance = app.add_subcommand("distance", "pairwise angular distances per category");
  add_common(distance, cfg);
  distance->add_option("--category", cfg.category,
                       "script, syntactic, phonological, inventory, or morphological")
      ->required();
  distance->add_option("--matrix", cfg.matrix_path, "feature matrix CSV");
  distance->add_option("--data", cfg.data_dir, "directory holding imputed.csv");

  auto* stats = app.add_subcommand("stats", "coverage and sparsity tables");
  add_common(stats, cfg);
  stats->add_option("stat", cfg.stat, "coverage or sparsity")->required();
  stats->add_option("--data", cfg.data_dir, "canonical dataset from `ingest`")->required();
  stats->add_option("--matrix", cfg.matrix_path, "feature matrix CSV (default: imputed.csv)");
  stats->add_option("--scope", cfg.scope, "sparsity denominator: covered or all")
      ->check(CLI::IsMember({"covered", "all"}));

  auto* correlate = app.add_subcommand("correlate", "block-permutation Mantel test");
  add_common(correlate, cfg);
  correlate->add_option("--distances", cfg.distances_path, "distance CSV from `distance`")
      ->required();
  correlate->add_option("--against", cfg.against_path, "external distance CSV")->required();
  correlate->add_option("--data", cfg.data_dir, "canonical dataset (family blocks)")
      ->required();
  correlate->add_option("--n-perm", cfg.n_perm, "permutation count");
  correlate->add_option("--alpha", cfg.alpha_family, "family-wise significance level");
  correlate->add_option("--m-tests", cfg.m_tests, "Bonferroni test count");

  auto* eval = app.add_subcommand("eval", "holdout scoring of an imputation method");
  add_common(eval, cfg);
  eval->add_option("--data", cfg.data_dir, "canonical dataset from `ingest`")->required();
  add_method(eval, cfg);
  eval->add_option("--holdout", cfg.holdout, "fraction of observed cells to hide");
  add_completion(eval, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(ingest)) lingbase::cmd_ingest(cfg);
    if (app.got_subcommand(impute)) lingbase::cmd_impute(cfg);
    if (app.got_subcommand(distance)) lingbase::cmd_distance(cfg);
    if (app.got_subcommand(stats)) lingbase::cmd_stats(cfg);
    if (app.got_subcommand(correlate)) lingbase::cmd_correlate(cfg);
    if (app.got_subcommand(eval)) lingbase::cmd_eval(cfg);
  } catch (const lingbase::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
