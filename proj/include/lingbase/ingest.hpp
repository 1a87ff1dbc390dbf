#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lingbase/core.hpp"

namespace lingbase {

/// One row of the script property table. Values are kept verbatim;
/// the unknown tokens ("" and "Unknown") are interpreted at
/// binarization time, not here.
struct ScriptRecord {
  std::string code;  // ISO 15924, e.g. "Latn"
  std::map<std::string, std::string> properties;
};

/// Rules for one categorical property: each known value asserts a set
/// of binary features to 1, and every other feature the property emits
/// becomes 0. Values absent from the mapping are rejected unless they
/// are an unknown token, which leaves the whole emitted set missing.
struct BinarizationRule {
  std::string property;
  std::vector<std::pair<std::string, std::vector<std::string>>> values;
  std::vector<std::string> emitted;  // union of all feature names above

  const std::vector<std::string>* features_for(std::string_view value) const;
};

struct BinarizationSchema {
  std::vector<BinarizationRule> rules;

  std::vector<std::string> emitted_features() const;  // sorted, unique

  /// The built-in Type / Case / Ligatures rules.
  static BinarizationSchema table_defaults();

  /// Loads a JSON schema file, shape:
  ///   {"properties": [{"name": "Type",
  ///                    "values": [{"value": "Alphabet",
  ///                                "features": ["SC_ALPHABET"]}, ...]}]}
  /// Every feature name must carry the SC_ prefix.
  static BinarizationSchema load(const std::string& path);
};

struct LanguageScriptMap {
  // glottocode -> sorted unique script codes
  std::map<std::string, std::vector<std::string>> entries;
  std::vector<std::string> warnings;
};

struct Catalog {
  std::vector<LanguageRecord> records;  // sorted by glottocode
  std::vector<std::string> warnings;    // deferred referential issues

  const LanguageRecord* find(std::string_view glottocode) const;

  /// Accepts a glottocode or an ISO 639-3 code and returns the matching
  /// glottocode. Ambiguous ISO codes (shared by several records) and
  /// unknown keys resolve to nullopt.
  std::optional<std::string> resolve(std::string_view key) const;

  std::vector<std::string> codes() const;
};

/// languages.csv: glottocode,iso639_3,name,parent_glottocode,
/// family_glottocode,resource_level,latitude,longitude. Empty field
/// means absent; an absent family defaults to the language itself.
Catalog parse_catalog(const std::string& path);

/// scripts.tsv: tab-separated, header `script_code` then property
/// columns. Records come back sorted by script code.
std::vector<ScriptRecord> parse_scripts_table(const std::string& path);

/// lang_scripts.csv: header `language_code,script_code`. Language keys
/// may be glottocodes or ISO 639-3 codes and are resolved through the
/// catalog; unresolvable keys are skipped with a warning. Script codes
/// must exist in `scripts`.
LanguageScriptMap parse_language_script_map(const std::string& path,
                                            const Catalog& catalog,
                                            const std::vector<ScriptRecord>& scripts);

/// features_<source>.csv: header `code,<feature1>,...`; cells are 0, 1,
/// a decimal in [0,1], empty, or `--` (both of the last two = missing).
/// Mode is detected from the data: any observed value outside {0,1}
/// makes the matrix continuous. Rows and columns come back sorted.
FeatureMatrix parse_features_csv(const std::string& path,
                                 const CategoryRegistry& registry);

/// One row per script, binary mode. For a property with a known value,
/// the rule-listed features are 1 and the property's remaining emitted
/// features are 0; unknown or absent values leave the emitted set
/// missing for that script.
FeatureMatrix binarize_scripts(const std::vector<ScriptRecord>& scripts,
                               const BinarizationSchema& schema,
                               const CategoryRegistry& registry);

/// Logical OR across each language's scripts: 1 if any script has 1,
/// else 0 if any script has 0, else missing. Rows cover the union of
/// `languages` and the map's keys; languages with no mapped script get
/// all-missing rows.
FeatureMatrix project_scripts_to_languages(const FeatureMatrix& script_matrix,
                                           const LanguageScriptMap& map,
                                           const std::vector<std::string>& languages);

/// Re-embeds every layer into the union language/feature index (missing
/// padding), sorted by source name.
SourceLayeredMatrix align_layers(std::vector<std::pair<std::string, FeatureMatrix>> layers,
                                 const CategoryRegistry& registry);

/// Per cell: 1 if any source observes 1, else 0 if any source observes
/// 0, else missing. All layers must be binary and share one index.
FeatureMatrix aggregate_union(const SourceLayeredMatrix& layered);

/// Per cell: mean of the observed source values; missing iff no source
/// observes the cell. Layers must share one index.
FeatureMatrix aggregate_average(const SourceLayeredMatrix& layered);

void write_languages_csv(const std::string& path, const std::vector<LanguageRecord>& records);
void write_features_csv(const std::string& path, const FeatureMatrix& m);

}  // namespace lingbase
