#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "lingbase/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate a synthetic genealogical fixture bundle"};
  lingbase::synth::SynthConfig cfg;
  std::string out_dir;
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--seed", cfg.seed, "generator seed");
  app.add_option("--languages", cfg.languages, "total language count");
  app.add_option("--roots", cfg.roots, "family count");
  app.add_option("--features-per-category", cfg.features_per_category,
                 "feature count per category prefix");
  app.add_option("--flip-probability", cfg.flip_probability,
                 "chance a child flips an inherited feature");
  app.add_option("--mask-fraction", cfg.mask_fraction, "chance a truth cell is hidden");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto bundle = lingbase::synth::make_synth_bundle(cfg);
    lingbase::synth::write_synth_bundle(out_dir, bundle);
    std::printf("%s: %zu languages, %zu observed cells of %zu\n", out_dir.c_str(),
                bundle.records.size(), bundle.observed.observed_count(),
                bundle.truth.cells.size());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
