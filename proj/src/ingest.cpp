#include "lingbase/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "lingbase/csv.hpp"

namespace lingbase {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  throw InputError(path + ":" + std::to_string(line) + ": " + what);
}

bool is_unknown_token(std::string_view v) { return v.empty() || v == "Unknown"; }

// Cells are 0, 1, a decimal in [0,1], "" or "--" (both missing).
Cell parse_cell(const std::string& field, const std::string& path, std::size_t line,
                const std::string& feature) {
  if (field.empty() || field == "--") return std::nullopt;
  const auto v = csv::parse_double(field);
  if (!v || std::isnan(*v)) {
    fail(path, line, "feature " + feature + ": unreadable value '" + field + "'");
  }
  if (*v < 0.0 || *v > 1.0) {
    fail(path, line, "feature " + feature + ": value " + field + " outside [0,1]");
  }
  return v;
}

}  // namespace

const std::vector<std::string>* BinarizationRule::features_for(std::string_view value) const {
  for (const auto& [v, feats] : values) {
    if (v == value) return &feats;
  }
  return nullptr;
}

std::vector<std::string> BinarizationSchema::emitted_features() const {
  std::set<std::string> out;
  for (const auto& rule : rules) out.insert(rule.emitted.begin(), rule.emitted.end());
  return {out.begin(), out.end()};
}

BinarizationSchema BinarizationSchema::table_defaults() {
  BinarizationSchema s;
  BinarizationRule type;
  type.property = "Type";
  type.values = {
      {"Alphabet", {"SC_ALPHABET"}},
      {"Abjad", {"SC_ABJAD"}},
      {"Abugida", {"SC_ABUGIDA"}},
      {"Featural", {"SC_FEATURAL"}},
      {"Logo-syllabary", {"SC_LOGO_SYLLABARY"}},
      {"Syllabary", {"SC_SYLLABARY"}},
  };
  BinarizationRule casing;
  casing.property = "Case";
  casing.values = {
      {"Yes", {"SC_CASE"}},
      {"No", {}},
  };
  BinarizationRule ligatures;
  ligatures.property = "Ligatures";
  ligatures.values = {
      {"Required", {"SC_LIGATURES", "SC_REQUIRED_LIGATURES"}},
      {"Optional", {"SC_LIGATURES"}},
      {"None", {}},
  };
  s.rules = {std::move(type), std::move(casing), std::move(ligatures)};
  for (auto& rule : s.rules) {
    std::set<std::string> emitted;
    for (const auto& [value, feats] : rule.values) emitted.insert(feats.begin(), feats.end());
    rule.emitted.assign(emitted.begin(), emitted.end());
  }
  return s;
}

BinarizationSchema BinarizationSchema::load(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(csv::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": not valid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("properties") || !doc["properties"].is_array()) {
    throw InputError(path + ": expected top-level object with a 'properties' array");
  }
  BinarizationSchema s;
  std::unordered_set<std::string> seen_properties;
  for (const auto& p : doc["properties"]) {
    if (!p.is_object() || !p.contains("name") || !p["name"].is_string() ||
        !p.contains("values") || !p["values"].is_array()) {
      throw InputError(path + ": each property needs a 'name' and a 'values' array");
    }
    BinarizationRule rule;
    rule.property = p["name"].get<std::string>();
    if (!seen_properties.insert(rule.property).second) {
      throw InputError(path + ": duplicate property '" + rule.property + "'");
    }
    std::set<std::string> emitted;
    std::unordered_set<std::string> seen_values;
    for (const auto& v : p["values"]) {
      if (!v.is_object() || !v.contains("value") || !v["value"].is_string() ||
          !v.contains("features") || !v["features"].is_array()) {
        throw InputError(path + ": property '" + rule.property +
                         "': each value needs 'value' and a 'features' array");
      }
      const auto value = v["value"].get<std::string>();
      if (is_unknown_token(value)) {
        throw InputError(path + ": property '" + rule.property +
                         "': the unknown token cannot carry a rule");
      }
      if (!seen_values.insert(value).second) {
        throw InputError(path + ": property '" + rule.property + "': duplicate value '" +
                         value + "'");
      }
      std::vector<std::string> feats;
      for (const auto& f : v["features"]) {
        if (!f.is_string()) {
          throw InputError(path + ": property '" + rule.property +
                           "': feature names must be strings");
        }
        const auto name = f.get<std::string>();
        if (name.rfind("SC_", 0) != 0) {
          throw InputError(path + ": feature '" + name + "' lacks the SC_ prefix");
        }
        feats.push_back(name);
        emitted.insert(name);
      }
      rule.values.emplace_back(value, std::move(feats));
    }
    rule.emitted.assign(emitted.begin(), emitted.end());
    s.rules.push_back(std::move(rule));
  }
  return s;
}

const LanguageRecord* Catalog::find(std::string_view glottocode) const {
  const auto it = std::lower_bound(
      records.begin(), records.end(), glottocode,
      [](const LanguageRecord& r, std::string_view key) { return r.code.glottocode < key; });
  if (it == records.end() || it->code.glottocode != glottocode) return nullptr;
  return &*it;
}

std::optional<std::string> Catalog::resolve(std::string_view key) const {
  if (find(key)) return std::string(key);
  const LanguageRecord* hit = nullptr;
  for (const auto& r : records) {
    if (r.code.iso639_3 && *r.code.iso639_3 == key) {
      if (hit) return std::nullopt;  // ambiguous ISO code
      hit = &r;
    }
  }
  if (hit) return hit->code.glottocode;
  return std::nullopt;
}

std::vector<std::string> Catalog::codes() const {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.code.glottocode);
  return out;
}

Catalog parse_catalog(const std::string& path) {
  static const std::vector<std::string> kHeader = {
      "glottocode", "iso639_3",       "name",     "parent_glottocode",
      "family_glottocode", "resource_level", "latitude", "longitude"};
  const auto rows = csv::read_table(path, ',');
  if (rows.empty()) throw InputError(path + ": missing header row");
  if (rows[0].fields != kHeader) {
    fail(path, rows[0].line, "unexpected header (want glottocode,iso639_3,name,"
                             "parent_glottocode,family_glottocode,resource_level,"
                             "latitude,longitude)");
  }

  Catalog catalog;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != kHeader.size()) {
      fail(path, row.line, "expected " + std::to_string(kHeader.size()) + " fields, got " +
                               std::to_string(row.fields.size()));
    }
    LanguageRecord rec;
    const auto& code = row.fields[0];
    if (!is_valid_glottocode(code)) fail(path, row.line, "bad glottocode '" + code + "'");
    if (!seen.insert(code).second) fail(path, row.line, "duplicate glottocode '" + code + "'");
    rec.code.glottocode = code;

    if (!row.fields[1].empty()) {
      if (!is_valid_iso639_3(row.fields[1])) {
        fail(path, row.line, "bad iso639_3 '" + row.fields[1] + "'");
      }
      rec.code.iso639_3 = row.fields[1];
    }
    rec.name = row.fields[2];

    if (!row.fields[3].empty()) {
      if (!is_valid_glottocode(row.fields[3])) {
        fail(path, row.line, "bad parent_glottocode '" + row.fields[3] + "'");
      }
      if (row.fields[3] == code) fail(path, row.line, "language is its own parent");
      rec.parent = row.fields[3];
    }

    if (row.fields[4].empty()) {
      rec.family = code;
    } else {
      if (!is_valid_glottocode(row.fields[4])) {
        fail(path, row.line, "bad family_glottocode '" + row.fields[4] + "'");
      }
      rec.family = row.fields[4];
    }
    if (!rec.parent && rec.family != code) {
      fail(path, row.line, "root language must be its own family (got " + rec.family + ")");
    }

    const auto level = parse_resource_level(row.fields[5]);
    if (!level) fail(path, row.line, "bad resource_level '" + row.fields[5] + "'");
    rec.resource_level = *level;

    if (!row.fields[6].empty()) {
      const auto lat = csv::parse_double(row.fields[6]);
      if (!lat || *lat < -90.0 || *lat > 90.0) {
        fail(path, row.line, "bad latitude '" + row.fields[6] + "'");
      }
      rec.latitude = lat;
    }
    if (!row.fields[7].empty()) {
      const auto lon = csv::parse_double(row.fields[7]);
      if (!lon || *lon < -180.0 || *lon > 180.0) {
        fail(path, row.line, "bad longitude '" + row.fields[7] + "'");
      }
      rec.longitude = lon;
    }
    catalog.records.push_back(std::move(rec));
  }

  std::sort(catalog.records.begin(), catalog.records.end(),
            [](const LanguageRecord& a, const LanguageRecord& b) {
              return a.code.glottocode < b.code.glottocode;
            });
  for (const auto& rec : catalog.records) {
    if (rec.parent && !seen.count(*rec.parent)) {
      catalog.warnings.push_back("parent " + *rec.parent + " of " + rec.code.glottocode +
                                 " is not in the catalog");
    }
  }
  return catalog;
}

std::vector<ScriptRecord> parse_scripts_table(const std::string& path) {
  const auto rows = csv::read_table(path, '\t');
  if (rows.empty()) throw InputError(path + ": missing header row");
  const auto& header = rows[0].fields;
  if (header.empty() || header[0] != "script_code") {
    fail(path, rows[0].line, "first column must be script_code");
  }
  std::unordered_set<std::string> seen_props;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) fail(path, rows[0].line, "empty property name in header");
    if (!seen_props.insert(header[c]).second) {
      fail(path, rows[0].line, "duplicate property column '" + header[c] + "'");
    }
  }

  std::vector<ScriptRecord> scripts;
  std::unordered_set<std::string> seen_codes;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size()) {
      fail(path, row.line, "expected " + std::to_string(header.size()) + " fields, got " +
                               std::to_string(row.fields.size()));
    }
    ScriptRecord rec;
    rec.code = row.fields[0];
    if (!is_valid_script_code(rec.code)) {
      fail(path, row.line, "bad script code '" + rec.code + "'");
    }
    if (!seen_codes.insert(rec.code).second) {
      fail(path, row.line, "duplicate script code '" + rec.code + "'");
    }
    for (std::size_t c = 1; c < header.size(); ++c) {
      rec.properties.emplace(header[c], row.fields[c]);
    }
    scripts.push_back(std::move(rec));
  }
  std::sort(scripts.begin(), scripts.end(),
            [](const ScriptRecord& a, const ScriptRecord& b) { return a.code < b.code; });
  return scripts;
}

LanguageScriptMap parse_language_script_map(const std::string& path, const Catalog& catalog,
                                            const std::vector<ScriptRecord>& scripts) {
  std::unordered_set<std::string> known_scripts;
  for (const auto& s : scripts) known_scripts.insert(s.code);

  const auto rows = csv::read_table(path, ',');
  if (rows.empty()) throw InputError(path + ": missing header row");
  if (rows[0].fields != std::vector<std::string>{"language_code", "script_code"}) {
    fail(path, rows[0].line, "unexpected header (want language_code,script_code)");
  }

  LanguageScriptMap map;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != 2) {
      fail(path, row.line, "expected 2 fields, got " + std::to_string(row.fields.size()));
    }
    const auto& script = row.fields[1];
    if (!known_scripts.count(script)) {
      fail(path, row.line, "unknown script code '" + script + "'");
    }
    const auto code = catalog.resolve(row.fields[0]);
    if (!code) {
      map.warnings.push_back(path + ":" + std::to_string(row.line) +
                             ": language key '" + row.fields[0] + "' not in catalog, skipped");
      continue;
    }
    auto& set = map.entries[*code];
    if (std::find(set.begin(), set.end(), script) == set.end()) set.push_back(script);
  }
  for (auto& [code, set] : map.entries) std::sort(set.begin(), set.end());
  return map;
}

FeatureMatrix parse_features_csv(const std::string& path, const CategoryRegistry& registry) {
  const auto rows = csv::read_table(path, ',');
  if (rows.empty()) throw InputError(path + ": missing header row");
  const auto& header = rows[0].fields;
  if (header.empty() || header[0] != "code") {
    fail(path, rows[0].line, "first column must be code");
  }
  std::unordered_set<std::string> seen_features;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) fail(path, rows[0].line, "empty feature name in header");
    if (!seen_features.insert(header[c]).second) {
      fail(path, rows[0].line, "duplicate feature column '" + header[c] + "'");
    }
  }

  struct RawRow {
    std::string code;
    std::vector<Cell> cells;
  };
  std::vector<RawRow> raw;
  std::unordered_set<std::string> seen_codes;
  bool continuous = false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size()) {
      fail(path, row.line, "expected " + std::to_string(header.size()) + " fields, got " +
                               std::to_string(row.fields.size()));
    }
    RawRow rr;
    rr.code = row.fields[0];
    if (!is_valid_glottocode(rr.code)) fail(path, row.line, "bad glottocode '" + rr.code + "'");
    if (!seen_codes.insert(rr.code).second) {
      fail(path, row.line, "duplicate glottocode '" + rr.code + "'");
    }
    rr.cells.reserve(header.size() - 1);
    for (std::size_t c = 1; c < header.size(); ++c) {
      const auto cell = parse_cell(row.fields[c], path, row.line, header[c]);
      if (cell && *cell != 0.0 && *cell != 1.0) continuous = true;
      rr.cells.push_back(cell);
    }
    raw.push_back(std::move(rr));
  }

  // Sort rows by code and columns by feature name, permuting cells along.
  std::sort(raw.begin(), raw.end(),
            [](const RawRow& a, const RawRow& b) { return a.code < b.code; });
  std::vector<std::size_t> order(header.size() - 1);
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return header[a + 1] < header[b + 1];
  });

  FeatureMatrix m;
  m.mode = continuous ? MatrixMode::Continuous : MatrixMode::Binary;
  m.languages.reserve(raw.size());
  for (const auto& rr : raw) m.languages.push_back(rr.code);
  m.features.reserve(order.size());
  for (const auto c : order) m.features.push_back(header[c + 1]);
  m.categories.reserve(m.features.size());
  for (const auto& f : m.features) m.categories.push_back(registry.classify(f));
  m.cells.reserve(raw.size() * order.size());
  for (const auto& rr : raw) {
    for (const auto c : order) m.cells.push_back(rr.cells[c]);
  }
  return m;
}

FeatureMatrix binarize_scripts(const std::vector<ScriptRecord>& scripts,
                               const BinarizationSchema& schema,
                               const CategoryRegistry& registry) {
  std::vector<std::string> codes;
  codes.reserve(scripts.size());
  for (const auto& s : scripts) codes.push_back(s.code);
  std::sort(codes.begin(), codes.end());

  auto m = FeatureMatrix::empty(MatrixMode::Binary, std::move(codes),
                                schema.emitted_features(), registry);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t j = 0; j < m.features.size(); ++j) col.emplace(m.features[j], j);
  std::unordered_map<std::string, std::size_t> row;
  for (std::size_t i = 0; i < m.languages.size(); ++i) row.emplace(m.languages[i], i);

  for (const auto& script : scripts) {
    const std::size_t i = row.at(script.code);
    std::unordered_set<std::string> ruled;
    for (const auto& rule : schema.rules) {
      ruled.insert(rule.property);
      const auto it = script.properties.find(rule.property);
      if (it == script.properties.end() || is_unknown_token(it->second)) continue;
      const auto* on = rule.features_for(it->second);
      if (!on) {
        throw InputError("script " + script.code + ": property " + rule.property +
                         " has unmapped value '" + it->second + "'");
      }
      for (const auto& f : rule.emitted) m.at(i, col.at(f)) = 0.0;
      for (const auto& f : *on) m.at(i, col.at(f)) = 1.0;
    }
    for (const auto& [property, value] : script.properties) {
      if (!ruled.count(property) && !is_unknown_token(value)) {
        throw InputError("script " + script.code + ": property " + property +
                         " has unmapped value '" + value + "'");
      }
    }
  }
  return m;
}

FeatureMatrix project_scripts_to_languages(const FeatureMatrix& script_matrix,
                                           const LanguageScriptMap& map,
                                           const std::vector<std::string>& languages) {
  if (script_matrix.mode != MatrixMode::Binary) {
    throw Error("project_scripts_to_languages: script matrix must be binary");
  }
  std::set<std::string> codes(languages.begin(), languages.end());
  for (const auto& [code, scripts] : map.entries) codes.insert(code);

  auto m = FeatureMatrix::empty(MatrixMode::Binary,
                                std::vector<std::string>(codes.begin(), codes.end()),
                                script_matrix.features, CategoryRegistry::defaults());
  m.categories = script_matrix.categories;

  std::unordered_map<std::string, std::size_t> script_row;
  for (std::size_t i = 0; i < script_matrix.languages.size(); ++i) {
    script_row.emplace(script_matrix.languages[i], i);
  }

  for (std::size_t i = 0; i < m.languages.size(); ++i) {
    const auto it = map.entries.find(m.languages[i]);
    if (it == map.entries.end()) continue;  // no script: all-missing row
    for (const auto& script : it->second) {
      const auto sit = script_row.find(script);
      if (sit == script_row.end()) {
        throw Error("project_scripts_to_languages: script " + script +
                    " missing from the script matrix");
      }
      for (std::size_t j = 0; j < m.cols(); ++j) {
        const auto& cell = script_matrix.at(sit->second, j);
        if (!cell) continue;
        auto& out = m.at(i, j);
        if (*cell == 1.0) {
          out = 1.0;
        } else if (!out.has_value()) {
          out = 0.0;
        }
      }
    }
  }
  return m;
}

SourceLayeredMatrix align_layers(std::vector<std::pair<std::string, FeatureMatrix>> layers,
                                 const CategoryRegistry& registry) {
  std::sort(layers.begin(), layers.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < layers.size(); ++i) {
    if (layers[i].first == layers[i - 1].first) {
      throw Error("align_layers: duplicate source name '" + layers[i].first + "'");
    }
  }

  std::set<std::string> langs, feats;
  for (const auto& [name, m] : layers) {
    langs.insert(m.languages.begin(), m.languages.end());
    feats.insert(m.features.begin(), m.features.end());
  }
  const std::vector<std::string> languages(langs.begin(), langs.end());
  const std::vector<std::string> features(feats.begin(), feats.end());

  std::unordered_map<std::string, std::size_t> row, col;
  for (std::size_t i = 0; i < languages.size(); ++i) row.emplace(languages[i], i);
  for (std::size_t j = 0; j < features.size(); ++j) col.emplace(features[j], j);

  SourceLayeredMatrix out;
  for (auto& [name, m] : layers) {
    auto layer = FeatureMatrix::empty(m.mode, languages, features, registry);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const std::size_t ti = row.at(m.languages[i]);
      for (std::size_t j = 0; j < m.cols(); ++j) {
        layer.at(ti, col.at(m.features[j])) = m.at(i, j);
      }
    }
    out.sources.push_back(name);
    out.layers.push_back(std::move(layer));
  }
  return out;
}

namespace {

void require_shared_index(const SourceLayeredMatrix& layered, const char* op) {
  if (layered.layers.empty()) throw Error(std::string(op) + ": no layers");
  for (std::size_t s = 1; s < layered.layers.size(); ++s) {
    if (layered.layers[s].languages != layered.layers[0].languages ||
        layered.layers[s].features != layered.layers[0].features) {
      throw Error(std::string(op) + ": layers do not share one language/feature index");
    }
  }
}

}  // namespace

FeatureMatrix aggregate_union(const SourceLayeredMatrix& layered) {
  require_shared_index(layered, "aggregate_union");
  for (std::size_t s = 0; s < layered.layers.size(); ++s) {
    if (layered.layers[s].mode != MatrixMode::Binary) {
      throw Error("aggregate_union: layer " + layered.sources[s] + " is not binary");
    }
  }
  FeatureMatrix out = layered.layers[0];
  for (std::size_t s = 1; s < layered.layers.size(); ++s) {
    const auto& layer = layered.layers[s];
    for (std::size_t k = 0; k < out.cells.size(); ++k) {
      const auto& cell = layer.cells[k];
      if (!cell) continue;
      auto& acc = out.cells[k];
      if (*cell == 1.0) {
        acc = 1.0;
      } else if (!acc.has_value()) {
        acc = 0.0;
      }
    }
  }
  return out;
}

FeatureMatrix aggregate_average(const SourceLayeredMatrix& layered) {
  require_shared_index(layered, "aggregate_average");
  FeatureMatrix out = layered.layers[0];
  out.mode = MatrixMode::Continuous;
  std::vector<double> sum(out.cells.size(), 0.0);
  std::vector<std::size_t> n(out.cells.size(), 0);
  for (const auto& layer : layered.layers) {
    for (std::size_t k = 0; k < layer.cells.size(); ++k) {
      if (layer.cells[k]) {
        sum[k] += *layer.cells[k];
        ++n[k];
      }
    }
  }
  for (std::size_t k = 0; k < out.cells.size(); ++k) {
    out.cells[k] = n[k] ? Cell(sum[k] / static_cast<double>(n[k])) : std::nullopt;
  }
  return out;
}

void write_languages_csv(const std::string& path, const std::vector<LanguageRecord>& records) {
  std::string out = "glottocode,iso639_3,name,parent_glottocode,family_glottocode,"
                    "resource_level,latitude,longitude\n";
  for (const auto& r : records) {
    out += r.code.glottocode;
    out += ',';
    out += r.code.iso639_3.value_or("");
    out += ',';
    out += csv::escape_field(r.name, ',');
    out += ',';
    out += r.parent.value_or("");
    out += ',';
    out += r.family;
    out += ',';
    out += to_string(r.resource_level);
    out += ',';
    if (r.latitude) out += csv::format_double(*r.latitude);
    out += ',';
    if (r.longitude) out += csv::format_double(*r.longitude);
    out += '\n';
  }
  csv::write_file(path, out);
}

void write_features_csv(const std::string& path, const FeatureMatrix& m) {
  std::string out = "code";
  for (const auto& f : m.features) {
    out += ',';
    out += csv::escape_field(f, ',');
  }
  out += '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += m.languages[i];
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out += ',';
      const auto& cell = m.at(i, j);
      if (cell) out += csv::format_double(*cell);
    }
    out += '\n';
  }
  csv::write_file(path, out);
}

}  // namespace lingbase
