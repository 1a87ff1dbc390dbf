#include <chrono>
#include <cstdio>
#include <map>
#include <string>

#include "lingbase/analytics.hpp"
#include "lingbase/distances.hpp"
#include "lingbase/parallel.hpp"
#include "lingbase/phylogeny.hpp"
#include "lingbase/synth.hpp"

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_seconds();
    fn();
    const double t1 = now_seconds();
    if (t1 - t0 < best) best = t1 - t0;
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-16s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  outputs %s\n", name,
              serial, parallel, parallel > 0 ? serial / parallel : 0.0,
              identical ? "identical" : "DIFFER");
}

}  // namespace

int main() {
  using namespace lingbase;

  synth::SynthConfig cfg;
  cfg.languages = 700;
  cfg.roots = 25;
  cfg.seed = 7;
  const auto bundle = synth::make_synth_bundle(cfg);
  const auto phylo = build_phylogeny(bundle.records);
  std::printf("workers: %d\n", parallel::worker_count());

  FeatureMatrix lineage_serial_out, lineage_parallel_out;
  const double t_lineage_serial = time_best_of(3, [&] {
    lineage_serial_out = lineage_impute_serial(bundle.observed, phylo).first;
  });
  const double t_lineage_parallel = time_best_of(3, [&] {
    lineage_parallel_out = lineage_impute(bundle.observed, phylo).first;
  });
  report("lineage_impute", t_lineage_serial, t_lineage_parallel,
         lineage_serial_out.cells == lineage_parallel_out.cells);

  DistanceMatrix dist_serial, dist_parallel;
  const double t_dist_serial = time_best_of(3, [&] {
    dist_serial = distance_matrix_serial(lineage_serial_out, std::nullopt);
  });
  const double t_dist_parallel = time_best_of(3, [&] {
    dist_parallel = distance_matrix(lineage_parallel_out, std::nullopt);
  });
  report("distance_matrix", t_dist_serial, t_dist_parallel,
         dist_serial.entries == dist_parallel.entries);

  std::map<std::string, std::string> blocks;
  for (const auto& r : bundle.records) blocks[r.code.glottocode] = r.family;
  MantelResult mantel_serial_out, mantel_parallel_out;
  const double t_mantel_serial = time_best_of(1, [&] {
    mantel_serial_out =
        mantel_block_serial(dist_serial, bundle.genetic, blocks, 199, 7, 0.05);
  });
  const double t_mantel_parallel = time_best_of(1, [&] {
    mantel_parallel_out = mantel_block(dist_parallel, bundle.genetic, blocks, 199, 7, 0.05);
  });
  report("mantel_block", t_mantel_serial, t_mantel_parallel,
         mantel_serial_out.p_value == mantel_parallel_out.p_value &&
             mantel_serial_out.rho_obs == mantel_parallel_out.rho_obs);
  return 0;
}
