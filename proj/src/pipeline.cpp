#include "lingbase/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "lingbase/analytics.hpp"
#include "lingbase/csv.hpp"
#include "lingbase/distances.hpp"
#include "lingbase/ingest.hpp"
#include "lingbase/phylogeny.hpp"
#include "lingbase/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace lingbase {

namespace {

std::string hash_hex(const std::string& path) {
  const auto bytes = csv::read_file(path);
  char buf[24];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                static_cast<unsigned long long>(rng::fnv1a64(bytes)));
  return buf;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Every output directory carries exactly one manifest; created_at is
// the only field allowed to differ between identical runs.
void write_manifest(const RunConfig& cfg, const std::string& command, json config,
                    const std::vector<std::string>& outputs,
                    const std::vector<std::string>& warnings) {
  json doc;
  doc["command"] = command;
  doc["created_at"] = timestamp_utc();
  doc["seed"] = cfg.seed;
  doc["config"] = std::move(config);
  json hashes = json::object();
  for (const auto& name : outputs) hashes[name] = hash_hex(cfg.out_dir + "/" + name);
  doc["outputs"] = std::move(hashes);
  doc["warnings"] = warnings;
  csv::write_file(cfg.out_dir + "/manifest.json", doc.dump(2) + "\n");
}

void ensure_out_dir(const RunConfig& cfg) {
  if (cfg.out_dir.empty()) throw InputError("--out directory is required");
  fs::create_directories(cfg.out_dir);
}

std::string source_name_of(const std::string& path) {
  const auto name = fs::path(path).filename().string();
  if (name.size() > 13 && name.rfind("features_", 0) == 0 &&
      name.substr(name.size() - 4) == ".csv") {
    return name.substr(9, name.size() - 13);
  }
  throw InputError(path + ": feature files must be named features_<source>.csv");
}

struct CanonicalData {
  Catalog catalog;
  std::vector<std::pair<std::string, FeatureMatrix>> sources;
};

CanonicalData load_canonical(const std::string& data_dir) {
  if (data_dir.empty()) throw InputError("--data directory is required");
  const auto languages = data_dir + "/languages.csv";
  if (!fs::exists(languages)) {
    throw InputError("missing " + languages + " (run `ingest` first)");
  }
  CanonicalData data;
  data.catalog = parse_catalog(languages);

  const auto registry = CategoryRegistry::defaults();
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(data_dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("features_", 0) == 0 && name.size() > 13 &&
        name.substr(name.size() - 4) == ".csv") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& path : paths) {
    data.sources.emplace_back(source_name_of(path), parse_features_csv(path, registry));
  }
  if (data.sources.empty()) {
    throw InputError(data_dir + " has no features_<source>.csv (run `ingest` first)");
  }
  return data;
}

FeatureMatrix aggregate(const CanonicalData& data, const std::string& aggregation) {
  if (aggregation == "union") {
    for (const auto& [name, m] : data.sources) {
      if (m.mode != MatrixMode::Binary) {
        throw InputError("union aggregation needs binary sources, but " + name +
                         " is continuous (use --agg average)");
      }
    }
  } else if (aggregation != "average") {
    throw InputError("unknown aggregation '" + aggregation + "' (union or average)");
  }
  const auto layered = align_layers(data.sources, CategoryRegistry::defaults());
  return aggregation == "union" ? aggregate_union(layered) : aggregate_average(layered);
}

Phylogeny phylogeny_for(const Catalog& catalog) {
  if (!catalog.warnings.empty()) {
    throw InputError("catalog has unresolved references: " + catalog.warnings.front());
  }
  try {
    return build_phylogeny(catalog.records);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
}

std::optional<Category> parse_distance_category(const std::string& s) {
  const auto c = parse_category(s);
  if (!c || *c == Category::Other) {
    throw InputError("unknown category '" + s +
                     "' (script, syntactic, phonological, inventory, morphological)");
  }
  return c;
}

std::string matrix_or_imputed(const RunConfig& cfg) {
  if (!cfg.matrix_path.empty()) return cfg.matrix_path;
  if (!cfg.data_dir.empty()) {
    const auto imputed = cfg.data_dir + "/imputed.csv";
    if (fs::exists(imputed)) return imputed;
  }
  throw InputError("no feature matrix: pass --matrix, or point --data at an `impute` output");
}

// Manifests must not depend on where the inputs live, only on what they
// are, so path-valued config entries are reduced to their last element.
std::string leaf_name(const std::string& path) {
  auto name = fs::path(path).filename().string();
  if (name.empty()) name = fs::path(path).parent_path().filename().string();
  return name;
}

json completion_config_json(const CompletionConfig& c) {
  json out;
  if (c.lambda_grid.empty()) {
    out["lambda_grid"] = "auto (geometric 10-point, sigma_max down to sigma_max/100)";
  } else {
    out["lambda_grid"] = c.lambda_grid;
  }
  out["tolerance"] = c.tolerance;
  out["max_iterations"] = c.max_iterations;
  out["validation_fraction"] = c.validation_fraction;
  return out;
}

std::string opt_field(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string();
}

// Submatrix over `keep` (sorted subset of d.languages).
DistanceMatrix reindex(const DistanceMatrix& d, const std::vector<std::string>& keep) {
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < d.languages.size(); ++i) where.emplace(d.languages[i], i);
  DistanceMatrix out;
  out.languages = keep;
  out.entries.assign(keep.size() * keep.size(), std::nullopt);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const std::size_t si = where.at(keep[i]);
    for (std::size_t j = 0; j < keep.size(); ++j) {
      out.at(i, j) = d.at(si, where.at(keep[j]));
    }
  }
  return out;
}

}  // namespace

void cmd_ingest(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  if (cfg.catalog_path.empty()) throw InputError("--catalog is required");
  if (cfg.scripts_path.empty() != cfg.lang_scripts_path.empty()) {
    throw InputError("--scripts and --lang-scripts must be given together");
  }

  const auto catalog = parse_catalog(cfg.catalog_path);
  std::vector<std::string> warnings = catalog.warnings;
  const auto registry = CategoryRegistry::defaults();

  std::vector<std::pair<std::string, FeatureMatrix>> sources;
  std::set<std::string> names;
  for (const auto& path : cfg.feature_paths) {
    auto name = source_name_of(path);
    if (name == "script" && !cfg.scripts_path.empty()) {
      throw InputError(path + ": source name 'script' is reserved for the script table");
    }
    if (!names.insert(name).second) throw InputError("duplicate source name '" + name + "'");
    auto m = parse_features_csv(path, registry);
    for (const auto& code : m.languages) {
      if (!catalog.find(code)) {
        warnings.push_back(path + ": language " + code + " is not in the catalog");
      }
    }
    sources.emplace_back(std::move(name), std::move(m));
  }

  if (!cfg.scripts_path.empty()) {
    const auto scripts = parse_scripts_table(cfg.scripts_path);
    const auto schema = cfg.schema_path.empty() ? BinarizationSchema::table_defaults()
                                                : BinarizationSchema::load(cfg.schema_path);
    const auto map = parse_language_script_map(cfg.lang_scripts_path, catalog, scripts);
    warnings.insert(warnings.end(), map.warnings.begin(), map.warnings.end());
    const auto script_matrix = binarize_scripts(scripts, schema, registry);
    sources.emplace_back("script",
                         project_scripts_to_languages(script_matrix, map, catalog.codes()));
  }
  if (sources.empty()) {
    throw InputError("nothing to ingest: pass --features and/or --scripts");
  }

  std::vector<std::string> outputs;
  write_languages_csv(cfg.out_dir + "/languages.csv", catalog.records);
  outputs.push_back("languages.csv");

  std::string report;
  json source_names = json::array();
  for (const auto& [name, m] : sources) {
    const auto violations = validate_matrix(m);
    if (!violations.empty()) {
      throw Error("canonical matrix for source " + name + " failed validation: " +
                  violations.front().rule + " at " + violations.front().where);
    }
    const auto filename = "features_" + name + ".csv";
    write_features_csv(cfg.out_dir + "/" + filename, m);
    outputs.push_back(filename);
    source_names.push_back(name);
    report += filename + ": " + std::to_string(m.rows()) + " languages, " +
              std::to_string(m.cols()) + " features, " +
              (m.mode == MatrixMode::Binary ? "binary" : "continuous") + ", " +
              std::to_string(m.observed_count()) + " observed cells\n";
  }
  report += "languages.csv: " + std::to_string(catalog.records.size()) + " records\n";
  for (const auto& w : warnings) report += "warning: " + w + "\n";
  csv::write_file(cfg.out_dir + "/validation.txt", report);
  outputs.push_back("validation.txt");

  json config;
  config["catalog"] = leaf_name(cfg.catalog_path);
  config["sources"] = std::move(source_names);
  if (!cfg.scripts_path.empty()) {
    config["scripts"] = leaf_name(cfg.scripts_path);
    config["lang_scripts"] = leaf_name(cfg.lang_scripts_path);
    config["schema"] =
      cfg.schema_path.empty() ? "builtin Type/Case/Ligatures" : leaf_name(cfg.schema_path);
  }
  write_manifest(cfg, "ingest", std::move(config), outputs, warnings);
}

void cmd_impute(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  if (cfg.method != "lineage" && cfg.method != "softimpute" &&
      cfg.method != "lineage+softimpute") {
    throw InputError("unknown method '" + cfg.method +
                     "' (lineage, softimpute, lineage+softimpute)");
  }
  const auto data = load_canonical(cfg.data_dir);
  auto matrix = aggregate(data, cfg.aggregation);

  std::vector<std::string> outputs;
  json config;
  config["method"] = cfg.method;
  config["aggregation"] = cfg.aggregation;
  config["data"] = leaf_name(cfg.data_dir);

  const bool lineage = cfg.method != "softimpute";
  const bool completion = cfg.method != "lineage";
  if (lineage) {
    const auto phylo = phylogeny_for(data.catalog);
    auto [imputed, trace] = lineage_impute(matrix, phylo);
    matrix = std::move(imputed);
    write_trace_language_csv(cfg.out_dir + "/trace_language.csv", trace);
    write_trace_feature_csv(cfg.out_dir + "/trace_feature.csv", trace);
    outputs.push_back("trace_language.csv");
    outputs.push_back("trace_feature.csv");
    config["lineage_fills"] = trace.filled;
  }
  if (completion) {
    CompletionConfig cc = cfg.completion;
    cc.seed = cfg.seed;
    matrix = matrix.mode == MatrixMode::Binary ? complete_binary(matrix, cc)
                                               : complete_continuous(matrix, cc);
    config["completed"] = true;
    config["completion"] = completion_config_json(cc);
  } else {
    config["completed"] = false;
  }

  write_features_csv(cfg.out_dir + "/imputed.csv", matrix);
  outputs.push_back("imputed.csv");
  write_manifest(cfg, "impute", std::move(config), outputs, {});
}

void cmd_distance(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  const auto category = parse_distance_category(cfg.category);
  const auto path = matrix_or_imputed(cfg);
  const auto m = parse_features_csv(path, CategoryRegistry::defaults());

  DistanceMatrix d;
  try {
    d = distance_matrix(m, category);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  const auto filename = "distance_" + cfg.category + ".csv";
  write_distance_csv(cfg.out_dir + "/" + filename, d);

  json config;
  config["matrix"] = leaf_name(path);
  config["category"] = cfg.category;
  config["zero_norm_both_zero"] = 0.0;
  config["zero_norm_one_zero"] = 1.0;
  write_manifest(cfg, "distance", std::move(config), {filename}, {});
}

void cmd_stats(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  if (cfg.stat != "coverage" && cfg.stat != "sparsity") {
    throw InputError("unknown stat '" + cfg.stat + "' (coverage or sparsity)");
  }
  if (cfg.data_dir.empty()) throw InputError("--data directory is required");
  const auto languages = cfg.data_dir + "/languages.csv";
  if (!fs::exists(languages)) {
    throw InputError("missing " + languages + " (run `ingest` first)");
  }
  const auto catalog = parse_catalog(languages);

  json config;
  config["stat"] = cfg.stat;
  FeatureMatrix m;
  if (!cfg.matrix_path.empty()) {
    m = parse_features_csv(cfg.matrix_path, CategoryRegistry::defaults());
    config["matrix"] = leaf_name(cfg.matrix_path);
  } else if (fs::exists(cfg.data_dir + "/imputed.csv")) {
    m = parse_features_csv(cfg.data_dir + "/imputed.csv", CategoryRegistry::defaults());
    config["matrix"] = "imputed.csv";
  } else {
    // Observation statistics over the raw sources. Union and average
    // agree on which cells count as observed, so the choice only has
    // to respect the source modes.
    const auto data = load_canonical(cfg.data_dir);
    bool all_binary = true;
    for (const auto& [name, layer] : data.sources) {
      if (layer.mode != MatrixMode::Binary) all_binary = false;
    }
    const std::string agg = all_binary ? "union" : "average";
    m = aggregate(data, agg);
    config["matrix"] = "canonical sources (" + agg + " aggregation)";
  }
  if (cfg.stat == "coverage") {
    const auto report = coverage(m, catalog.records);
    write_coverage_csv(cfg.out_dir + "/coverage.csv", report);
    csv::write_file(cfg.out_dir + "/coverage.txt", format_coverage_table(report));
    write_manifest(cfg, "stats", std::move(config), {"coverage.csv", "coverage.txt"}, {});
    return;
  }
  SparsityScope scope;
  if (cfg.scope == "covered") {
    scope = SparsityScope::CoveredLanguages;
  } else if (cfg.scope == "all") {
    scope = SparsityScope::AllLanguages;
  } else {
    throw InputError("unknown scope '" + cfg.scope + "' (covered or all)");
  }
  const auto report = sparsity(m, catalog.records, scope);
  write_sparsity_csv(cfg.out_dir + "/sparsity.csv", report);
  csv::write_file(cfg.out_dir + "/sparsity.txt", format_sparsity_table(report));
  config["scope"] = cfg.scope;
  write_manifest(cfg, "stats", std::move(config), {"sparsity.csv", "sparsity.txt"}, {});
}

void cmd_correlate(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  if (cfg.distances_path.empty()) {
    throw InputError("--distances is required (run `distance` first and pass its output)");
  }
  if (cfg.against_path.empty()) throw InputError("--against is required");
  if (cfg.data_dir.empty()) throw InputError("--data directory is required");
  const auto languages = cfg.data_dir + "/languages.csv";
  if (!fs::exists(languages)) {
    throw InputError("missing " + languages + " (run `ingest` first)");
  }
  const auto catalog = parse_catalog(languages);

  const auto ours = read_distance_csv(cfg.distances_path);
  const auto theirs = read_distance_csv(cfg.against_path);

  std::set<std::string> in_theirs(theirs.languages.begin(), theirs.languages.end());
  std::vector<std::string> common;
  for (const auto& code : ours.languages) {
    if (in_theirs.count(code)) common.push_back(code);
  }
  std::sort(common.begin(), common.end());
  if (common.size() < 3) {
    throw InputError("matrices share only " + std::to_string(common.size()) +
                     " languages (need 3)");
  }

  std::map<std::string, std::string> blocks;
  for (const auto& r : catalog.records) blocks[r.code.glottocode] = r.family;

  const double alpha = bonferroni(cfg.alpha_family, cfg.m_tests);
  MantelResult result;
  try {
    result = mantel_block(reindex(ours, common), reindex(theirs, common), blocks,
                          cfg.n_perm, cfg.seed, alpha);
  } catch (const Error& e) {
    throw InputError(e.what());
  }

  const auto name = fs::path(cfg.against_path).stem().string();
  csv::write_file(cfg.out_dir + "/mantel.txt", format_mantel_line(name, result) + "\n");
  std::string table =
      "name,rho,p_value,n_permutations,exhaustive,blocks,singletons,pairs,"
      "alpha_corrected,significant,seed\n";
  table += name + "," + csv::format_double(result.rho_obs) + "," +
           csv::format_double(result.p_value) + "," +
           std::to_string(result.n_permutations) + "," +
           (result.exhaustive ? "true" : "false") + "," +
           std::to_string(result.blocks_used) + "," +
           std::to_string(result.singleton_blocks) + "," +
           std::to_string(result.pairs_used) + "," +
           csv::format_double(result.alpha_corrected) + "," +
           (result.significant ? "true" : "false") + "," + std::to_string(result.seed) + "\n";
  csv::write_file(cfg.out_dir + "/mantel.csv", table);

  json config;
  config["distances"] = leaf_name(cfg.distances_path);
  config["against"] = leaf_name(cfg.against_path);
  config["n_perm"] = cfg.n_perm;
  config["alpha_family"] = cfg.alpha_family;
  config["m_tests"] = cfg.m_tests;
  config["alpha_corrected"] = alpha;
  config["common_languages"] = common.size();
  write_manifest(cfg, "correlate", std::move(config), {"mantel.csv", "mantel.txt"}, {});
}

void cmd_eval(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  if (cfg.method != "lineage" && cfg.method != "softimpute" &&
      cfg.method != "lineage+softimpute") {
    throw InputError("unknown method '" + cfg.method +
                     "' (lineage, softimpute, lineage+softimpute)");
  }
  const auto data = load_canonical(cfg.data_dir);
  const auto base = aggregate(data, cfg.aggregation);
  auto [masked, mask] = make_holdout(base, cfg.holdout, cfg.seed);

  const bool lineage = cfg.method != "softimpute";
  const bool completion = cfg.method != "lineage";
  FeatureMatrix imputed = std::move(masked);
  if (lineage) {
    const auto phylo = phylogeny_for(data.catalog);
    imputed = lineage_impute(imputed, phylo).first;
  }
  if (completion) {
    CompletionConfig cc = cfg.completion;
    cc.seed = cfg.seed;
    imputed = imputed.mode == MatrixMode::Binary ? complete_binary(imputed, cc)
                                                 : complete_continuous(imputed, cc);
  }

  // The imputed matrix can cover more rows than the holdout source, so
  // hidden cells are tracked by code, not index.
  std::unordered_map<std::string, std::size_t> row, col;
  for (std::size_t i = 0; i < imputed.rows(); ++i) row.emplace(imputed.languages[i], i);
  for (std::size_t j = 0; j < imputed.cols(); ++j) col.emplace(imputed.features[j], j);
  std::vector<double> pred, truth;
  for (const auto& h : mask.hidden) {
    const auto& cell =
        imputed.at(row.at(base.languages[h.row]), col.at(base.features[h.col]));
    if (!cell.has_value()) continue;  // lineage alone may leave gaps
    pred.push_back(*cell);
    truth.push_back(h.value);
  }

  std::optional<BinaryMetrics> bm;
  std::optional<RegressionMetrics> rm;
  if (!pred.empty()) {
    if (cfg.aggregation == "union") {
      bm = binary_metrics(pred, truth);
    } else {
      rm = regression_metrics(pred, truth);
    }
  }

  std::string csv_out =
      "method,aggregation,holdout,hidden,predicted,accuracy,precision,recall,f1,rmse,mae\n";
  csv_out += cfg.method + "," + cfg.aggregation + "," + csv::format_double(cfg.holdout) +
             "," + std::to_string(mask.hidden.size()) + "," + std::to_string(pred.size());
  if (bm) {
    csv_out += "," + csv::format_double(bm->accuracy) + "," + opt_field(bm->precision) +
               "," + opt_field(bm->recall) + "," + opt_field(bm->f1) + ",,";
  } else if (rm) {
    csv_out += ",,,,," + csv::format_double(rm->rmse) + "," + csv::format_double(rm->mae);
  } else {
    csv_out += ",,,,,,";
  }
  csv_out += "\n";
  csv::write_file(cfg.out_dir + "/eval.csv", csv_out);

  std::string text = "method=" + cfg.method + " aggregation=" + cfg.aggregation +
                     " holdout=" + csv::format_double(cfg.holdout) + "\n";
  text += "hidden=" + std::to_string(mask.hidden.size()) +
          " predicted=" + std::to_string(pred.size()) + "\n";
  const auto fmt = [](const std::optional<double>& v) {
    return v ? csv::format_double(*v) : std::string("n/a");
  };
  if (bm) {
    text += "accuracy=" + csv::format_double(bm->accuracy) +
            " precision=" + fmt(bm->precision) + " recall=" + fmt(bm->recall) +
            " f1=" + fmt(bm->f1) + "\n";
    text += "tp=" + std::to_string(bm->tp) + " fp=" + std::to_string(bm->fp) +
            " fn=" + std::to_string(bm->fn) + " tn=" + std::to_string(bm->tn) + "\n";
  } else if (rm) {
    text += "rmse=" + csv::format_double(rm->rmse) + " mae=" + csv::format_double(rm->mae) +
            "\n";
  } else {
    text += "no cells predicted\n";
  }
  csv::write_file(cfg.out_dir + "/eval.txt", text);

  json config;
  config["method"] = cfg.method;
  config["aggregation"] = cfg.aggregation;
  config["holdout"] = cfg.holdout;
  config["data"] = leaf_name(cfg.data_dir);
  if (completion) config["completion"] = completion_config_json(cfg.completion);
  write_manifest(cfg, "eval", std::move(config), {"eval.csv", "eval.txt"}, {});
}

}  // namespace lingbase
