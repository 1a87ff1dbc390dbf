#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lingbase/core.hpp"
#include "lingbase/ingest.hpp"

namespace lingbase::synth {

/// Knobs for the generated genealogical test bundle. Children copy
/// their parent's binary features and flip each with flip_probability;
/// mask_fraction of all cells is then hidden, and the surviving cells
/// are split across two overlapping sources.
struct SynthConfig {
  std::size_t languages = 500;
  std::size_t roots = 20;
  std::size_t features_per_category = 10;  // S_/P_/INV_/M_ each
  double flip_probability = 0.10;
  double mask_fraction = 0.60;
  std::uint64_t seed = 1;
};

struct SynthBundle {
  std::vector<LanguageRecord> records;  // sorted by glottocode
  FeatureMatrix truth;                  // fully observed
  FeatureMatrix observed;               // truth with cells masked
  FeatureMatrix source_a;               // observed split, part A
  FeatureMatrix source_b;               // observed split, part B (overlaps A)
  std::vector<ScriptRecord> scripts;
  LanguageScriptMap lang_scripts;
  DistanceMatrix genetic;               // tree-path distances, 3 decimals
};

SynthBundle make_synth_bundle(const SynthConfig& cfg);

/// Writes languages.csv, features_synthA.csv, features_synthB.csv,
/// scripts.tsv, lang_scripts.csv and genetic.csv under dir.
void write_synth_bundle(const std::string& dir, const SynthBundle& bundle);

}  // namespace lingbase::synth
