#include "lingbase/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "lingbase/csv.hpp"
#include "lingbase/rng.hpp"

namespace lingbase::synth {

namespace {

std::string code_for(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "syna%04zu", index);
  return buf;
}

std::string iso_for(std::size_t index) {
  std::string s(3, 'a');
  s[0] = static_cast<char>('a' + (index / 676) % 26);
  s[1] = static_cast<char>('a' + (index / 26) % 26);
  s[2] = static_cast<char>('a' + index % 26);
  return s;
}

std::vector<ScriptRecord> script_table() {
  // Values drawn from the Type/Case/Ligatures vocabularies; Grek and
  // Thai carry unknown tokens so projection leaves gaps.
  const char* rows[][4] = {
      {"Arab", "Abjad", "No", "Required"},
      {"Cyrl", "Alphabet", "Yes", "Optional"},
      {"Deva", "Abugida", "No", "Optional"},
      {"Grek", "Alphabet", "Yes", "Unknown"},
      {"Hang", "Featural", "No", "None"},
      {"Hani", "Logo-syllabary", "No", "None"},
      {"Kana", "Syllabary", "No", "None"},
      {"Latn", "Alphabet", "Yes", "None"},
      {"Thai", "Abugida", "No", ""},
  };
  std::vector<ScriptRecord> scripts;
  for (const auto& r : rows) {
    ScriptRecord rec;
    rec.code = r[0];
    rec.properties = {{"Type", r[1]}, {"Case", r[2]}, {"Ligatures", r[3]}};
    scripts.push_back(std::move(rec));
  }
  return scripts;
}

}  // namespace

SynthBundle make_synth_bundle(const SynthConfig& cfg) {
  if (cfg.roots < 1 || cfg.roots > cfg.languages) {
    throw Error("make_synth_bundle: roots must lie in [1, languages]");
  }
  if (cfg.languages > 9999) {
    throw Error("make_synth_bundle: at most 9999 languages fit the code scheme");
  }
  SynthBundle bundle;
  const std::size_t n = cfg.languages;

  // Forest: the first `roots` indices are roots; every later node hangs
  // off a uniformly chosen earlier node (which fixes its tree).
  std::vector<std::size_t> parent(n, SIZE_MAX), root_of(n), depth(n, 0);
  rng::Stream tree_stream(cfg.seed, "synth-tree");
  for (std::size_t i = 0; i < n; ++i) {
    if (i < cfg.roots) {
      root_of[i] = i;
      continue;
    }
    const auto p = static_cast<std::size_t>(tree_stream.next_below(i));
    parent[i] = p;
    root_of[i] = root_of[p];
    depth[i] = depth[p] + 1;
  }

  rng::Stream level_stream(cfg.seed, "synth-levels");
  rng::Stream iso_stream(cfg.seed, "synth-iso");
  rng::Stream coord_stream(cfg.seed, "synth-coords");
  for (std::size_t i = 0; i < n; ++i) {
    LanguageRecord rec;
    rec.code.glottocode = code_for(i);
    if (iso_stream.next_unit() < 0.7) rec.code.iso639_3 = iso_for(i);
    rec.name = "Synthetic " + std::to_string(i);
    if (parent[i] != SIZE_MAX) rec.parent = code_for(parent[i]);
    rec.family = code_for(root_of[i]);
    const double u = level_stream.next_unit();
    rec.resource_level = u < 0.05   ? ResourceLevel::High
                         : u < 0.20 ? ResourceLevel::Medium
                                    : ResourceLevel::Low;
    if (coord_stream.next_unit() < 0.9) {
      rec.latitude = std::round((coord_stream.next_unit() * 180.0 - 90.0) * 100.0) / 100.0;
      rec.longitude = std::round((coord_stream.next_unit() * 360.0 - 180.0) * 100.0) / 100.0;
    }
    bundle.records.push_back(std::move(rec));
  }
  // code_for is monotone in the index, so the records are born sorted.

  std::vector<std::string> codes;
  codes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) codes.push_back(code_for(i));

  std::vector<std::string> features;
  const char* prefixes[] = {"INV_F", "M_F", "P_F", "S_F"};
  for (const auto* prefix : prefixes) {
    for (std::size_t k = 0; k < cfg.features_per_category; ++k) {
      char buf[24];
      std::snprintf(buf, sizeof buf, "%s%02zu", prefix, k);
      features.emplace_back(buf);
    }
  }
  std::sort(features.begin(), features.end());

  const auto registry = CategoryRegistry::defaults();
  bundle.truth = FeatureMatrix::empty(MatrixMode::Binary, codes, features, registry);
  rng::Stream feature_stream(cfg.seed, "synth-features");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < features.size(); ++j) {
      if (parent[i] == SIZE_MAX) {
        bundle.truth.at(i, j) = feature_stream.next_unit() < 0.5 ? 1.0 : 0.0;
      } else {
        const double v = *bundle.truth.at(parent[i], j);
        const bool flip = feature_stream.next_unit() < cfg.flip_probability;
        bundle.truth.at(i, j) = flip ? 1.0 - v : v;
      }
    }
  }

  bundle.observed = bundle.truth;
  rng::Stream mask_stream(cfg.seed, "synth-mask");
  for (auto& cell : bundle.observed.cells) {
    if (mask_stream.next_unit() < cfg.mask_fraction) cell = std::nullopt;
  }

  bundle.source_a = FeatureMatrix::empty(MatrixMode::Binary, codes, features, registry);
  bundle.source_b = FeatureMatrix::empty(MatrixMode::Binary, codes, features, registry);
  rng::Stream split_stream(cfg.seed, "synth-split");
  for (std::size_t k = 0; k < bundle.observed.cells.size(); ++k) {
    const auto& cell = bundle.observed.cells[k];
    if (!cell.has_value()) continue;
    bool in_a = split_stream.next_unit() < 0.6;
    const bool in_b = split_stream.next_unit() < 0.6;
    if (!in_a && !in_b) in_a = true;
    if (in_a) bundle.source_a.cells[k] = cell;
    if (in_b) bundle.source_b.cells[k] = cell;
  }

  bundle.scripts = script_table();
  rng::Stream script_stream(cfg.seed, "synth-scripts");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& primary = bundle.scripts[root_of[i] % bundle.scripts.size()].code;
    auto& set = bundle.lang_scripts.entries[codes[i]];
    set.push_back(primary);
    if (script_stream.next_unit() < 0.10) {
      const auto& extra =
          bundle.scripts[script_stream.next_below(bundle.scripts.size())].code;
      if (extra != primary) set.push_back(extra);
    }
    std::sort(set.begin(), set.end());
  }

  // Genetic distance: normalized tree-path length, 1.0 across trees,
  // rounded to 3 decimals so the CSV stays compact.
  std::size_t max_depth = 0;
  for (std::size_t i = 0; i < n; ++i) max_depth = std::max(max_depth, depth[i]);
  const double denom = std::max<std::size_t>(2 * max_depth, 1);
  bundle.genetic = DistanceMatrix::empty(codes);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = 1.0;
      if (root_of[i] == root_of[j]) {
        std::size_t a = i, b = j, edges = 0;
        while (a != b) {
          if (depth[a] < depth[b]) std::swap(a, b);
          a = parent[a];
          ++edges;
        }
        d = std::round(0.9 * static_cast<double>(edges) / denom * 1000.0) / 1000.0;
      }
      bundle.genetic.at(i, j) = d;
      bundle.genetic.at(j, i) = d;
    }
  }
  return bundle;
}

void write_synth_bundle(const std::string& dir, const SynthBundle& bundle) {
  std::filesystem::create_directories(dir);
  const auto path = [&](const char* name) { return dir + "/" + name; };

  write_languages_csv(path("languages.csv"), bundle.records);
  write_features_csv(path("features_synthA.csv"), bundle.source_a);
  write_features_csv(path("features_synthB.csv"), bundle.source_b);

  std::string scripts = "script_code\tType\tCase\tLigatures\n";
  for (const auto& s : bundle.scripts) {
    scripts += s.code;
    scripts += '\t';
    scripts += s.properties.at("Type");
    scripts += '\t';
    scripts += s.properties.at("Case");
    scripts += '\t';
    scripts += s.properties.at("Ligatures");
    scripts += '\n';
  }
  csv::write_file(path("scripts.tsv"), scripts);

  std::string pairs = "language_code,script_code\n";
  for (const auto& [code, set] : bundle.lang_scripts.entries) {
    for (const auto& script : set) {
      pairs += code;
      pairs += ',';
      pairs += script;
      pairs += '\n';
    }
  }
  csv::write_file(path("lang_scripts.csv"), pairs);

  std::string genetic = "code";
  for (const auto& code : bundle.genetic.languages) {
    genetic += ',';
    genetic += code;
  }
  genetic += '\n';
  for (std::size_t i = 0; i < bundle.genetic.size(); ++i) {
    genetic += bundle.genetic.languages[i];
    for (std::size_t j = 0; j < bundle.genetic.size(); ++j) {
      genetic += ',';
      genetic += csv::format_double(*bundle.genetic.at(i, j));
    }
    genetic += '\n';
  }
  csv::write_file(path("genetic.csv"), genetic);
}

}  // namespace lingbase::synth
