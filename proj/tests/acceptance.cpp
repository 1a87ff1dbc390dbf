// Acceptance suite: one check per shipped guarantee, each printed as a
// single PASS/FAIL line with its runtime. Exits non-zero when any check
// fails or blows its time budget.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lingbase/analytics.hpp"
#include "lingbase/completion.hpp"
#include "lingbase/csv.hpp"
#include "lingbase/distances.hpp"
#include "lingbase/ingest.hpp"
#include "lingbase/phylogeny.hpp"
#include "lingbase/rng.hpp"

using namespace lingbase;
namespace fs = std::filesystem;

namespace {

std::string g_scratch;
std::string g_detail;  // failure context for the current check

void note(const std::string& msg) { g_detail += "    " + msg + "\n"; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_file(const std::string& dir, const std::string& name,
                       const std::string& text) {
  fs::create_directories(dir);
  const auto path = dir + "/" + name;
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

int run_cli(const std::string& args) {
  const auto cmd = std::string(LINGBASE_CLI_PATH) + " " + args + " >" + g_scratch +
                   "/cli_stdout.txt 2>" + g_scratch + "/cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Random forest over glottocode-shaped nodes with partially observed
// binary features, used by the lineage checks.
struct ForestInstance {
  std::vector<LanguageRecord> records;
  FeatureMatrix matrix;
};

ForestInstance random_forest(std::uint64_t seed, std::size_t max_nodes,
                             std::size_t max_features, double missing) {
  rng::Stream s(seed, "accept-forest");
  const std::size_t n = 2 + s.next_below(max_nodes - 1);
  const std::size_t f = 1 + s.next_below(max_features);

  ForestInstance inst;
  std::vector<std::string> codes;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "lang%04zu", i);
    codes.emplace_back(buf);
    LanguageRecord r;
    r.code.glottocode = buf;
    r.name = buf;
    r.family = buf;
    if (i > 0 && s.next_below(8) != 0) {
      r.parent = codes[s.next_below(i)];
    }
    inst.records.push_back(std::move(r));
  }
  std::vector<std::string> features;
  for (std::size_t j = 0; j < f; ++j) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "S_F%02zu", j);
    features.emplace_back(buf);
  }
  inst.matrix = FeatureMatrix::empty(MatrixMode::Binary, codes, features,
                                     CategoryRegistry::defaults());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      if (s.next_unit() >= missing) {
        inst.matrix.at(i, j) = static_cast<double>(s.next_below(2));
      }
    }
  }
  return inst;
}

// First observed value on the path from `code` up to its root, given a
// prebuilt language -> row lookup for the input matrix.
Cell nearest_observed_ancestor(const FeatureMatrix& m,
                               const std::map<std::string, std::size_t>& row,
                               const Phylogeny& p, const std::string& code,
                               std::size_t j) {
  std::string cur = code;
  while (true) {
    const auto it = row.find(cur);
    if (it != row.end() && m.at(it->second, j).has_value()) return m.at(it->second, j);
    const auto up = p.parent.find(cur);
    if (up == p.parent.end()) return std::nullopt;
    cur = up->second;
  }
}

bool check_lineage_oracle() {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = random_forest(seed, 200, 20, 0.4);
    const auto p = build_phylogeny(inst.records);
    const auto [out, trace] = lineage_impute(inst.matrix, p);
    std::map<std::string, std::size_t> in_row;
    for (std::size_t i = 0; i < inst.matrix.languages.size(); ++i) {
      in_row.emplace(inst.matrix.languages[i], i);
    }
    for (std::size_t i = 0; i < out.languages.size(); ++i) {
      for (std::size_t j = 0; j < out.features.size(); ++j) {
        const auto expect =
            nearest_observed_ancestor(inst.matrix, in_row, p, out.languages[i], j);
        if (out.at(i, j) != expect) {
          note("forest seed " + std::to_string(seed) + ": " + out.languages[i] + "/" +
               out.features[j] + " disagrees with the ancestor walk");
          return false;
        }
      }
    }
  }
  return true;
}

bool check_lineage_properties() {
  for (std::uint64_t seed = 100; seed < 300; ++seed) {
    const auto inst = random_forest(seed, 60, 8, 0.5);
    const auto p = build_phylogeny(inst.records);
    const auto [once, t1] = lineage_impute(inst.matrix, p);
    std::map<std::string, std::size_t> row;
    for (std::size_t i = 0; i < once.languages.size(); ++i) row.emplace(once.languages[i], i);
    for (std::size_t i = 0; i < inst.matrix.languages.size(); ++i) {
      const auto oi = row.at(inst.matrix.languages[i]);
      for (std::size_t j = 0; j < inst.matrix.features.size(); ++j) {
        if (inst.matrix.at(i, j).has_value() && once.at(oi, j) != inst.matrix.at(i, j)) {
          note("seed " + std::to_string(seed) + ": observed cell was rewritten");
          return false;
        }
      }
    }
    const auto [twice, t2] = lineage_impute(once, p);
    if (t2.filled != 0 || twice.cells != once.cells) {
      note("seed " + std::to_string(seed) + ": second pass changed the matrix");
      return false;
    }
  }
  return true;
}

bool check_softimpute_recovery() {
  std::size_t good = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    rng::Stream s(trial, "accept-rank2");
    const std::size_t rows = 10, cols = 8;
    std::vector<double> u1(rows), u2(rows), v1(cols), v2(cols);
    for (auto& x : u1) x = s.next_unit();
    for (auto& x : u2) x = s.next_unit();
    for (auto& x : v1) x = s.next_unit();
    for (auto& x : v2) x = s.next_unit();

    IncompleteRealMatrix x;
    x.rows = rows;
    x.cols = cols;
    std::vector<double> truth(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        truth[i * cols + j] = 0.5 * (u1[i] * v1[j] + u2[i] * v2[j]);
      }
    }
    std::vector<std::size_t> order(rows * cols);
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    s.shuffle(order);
    const std::size_t n_hidden = 24;  // 30% of 80
    std::vector<std::pair<std::size_t, std::size_t>> hidden;
    x.values.assign(rows * cols, std::nullopt);
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t i = order[k] / cols, j = order[k] % cols;
      if (k < n_hidden) {
        hidden.emplace_back(i, j);
      } else {
        x.at(i, j) = truth[i * cols + j];
      }
    }
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        if (x.at(i, j).has_value()) {
          x.observed.emplace_back(static_cast<std::uint32_t>(i),
                                  static_cast<std::uint32_t>(j));
        }
      }
    }

    CompletionConfig cc;
    cc.seed = trial;
    const auto res = soft_impute_path(x, cc);
    double se = 0.0;
    for (const auto& [i, j] : hidden) {
      const double d = res.at(i, j) - truth[i * cols + j];
      se += d * d;
    }
    if (std::sqrt(se / static_cast<double>(hidden.size())) <= 0.05) ++good;
  }
  if (good < 90) {
    note("only " + std::to_string(good) + "/100 trials recovered within rmse 0.05");
    return false;
  }

  // fully observed input with no shrinkage must come back unchanged
  rng::Stream s(7, "accept-fixed");
  IncompleteRealMatrix x;
  x.rows = 6;
  x.cols = 5;
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) {
      x.values.emplace_back(s.next_unit());
      x.observed.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
  }
  const auto res = soft_impute(x, 0.0, 1e-5, 200);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) {
      if (std::abs(res.at(i, j) - *x.at(i, j)) > 1e-8) {
        note("fully observed cell moved by more than 1e-8");
        return false;
      }
    }
  }
  return true;
}

bool check_softimpute_objective() {
  const double lambdas[] = {0.05, 0.5, 2.0};
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    rng::Stream s(trial, "accept-objective");
    IncompleteRealMatrix x;
    x.rows = 8;
    x.cols = 6;
    x.values.assign(x.rows * x.cols, std::nullopt);
    for (std::size_t i = 0; i < x.rows; ++i) {
      for (std::size_t j = 0; j < x.cols; ++j) {
        if (s.next_unit() < 0.65) {
          x.at(i, j) = s.next_unit();
          x.observed.emplace_back(static_cast<std::uint32_t>(i),
                                  static_cast<std::uint32_t>(j));
        }
      }
    }
    if (x.observed.size() < 2) continue;
    std::vector<double> objective;
    soft_impute(x, lambdas[trial % 3], 1e-7, 300,
                [&](std::size_t, double obj) { objective.push_back(obj); });
    for (std::size_t k = 1; k < objective.size(); ++k) {
      if (objective[k] > objective[k - 1] + 1e-9) {
        note("trial " + std::to_string(trial) + ": objective rose at iteration " +
             std::to_string(k));
        return false;
      }
    }
  }
  return true;
}

bool check_angular_distance() {
  const auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<Cell> ca(a.begin(), a.end()), cb(b.begin(), b.end());
    return angular_distance(ca, cb);
  };
  if (std::abs(*dist({1, 1}, {1, 1}) - 0.0) > 1e-12 ||
      std::abs(*dist({1, 0}, {0, 1}) - 0.5) > 1e-12 ||
      std::abs(*dist({1, 0}, {1, 1}) - 0.25) > 1e-12) {
    note("a worked example is off by more than 1e-12");
    return false;
  }

  rng::Stream s(11, "accept-angular");
  for (std::size_t trial = 0; trial < 10000; ++trial) {
    const std::size_t dim = 1 + s.next_below(25);
    std::vector<Cell> a(dim), b(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (s.next_unit() >= 0.3) a[k] = static_cast<double>(s.next_below(2));
      if (s.next_unit() >= 0.3) b[k] = static_cast<double>(s.next_below(2));
    }
    const auto ab = angular_distance(a, b);
    const auto ba = angular_distance(b, a);
    if (ab != ba) {
      note("trial " + std::to_string(trial) + ": asymmetric result");
      return false;
    }
    if (ab.has_value() && (*ab < 0.0 || *ab > 1.0)) {
      note("trial " + std::to_string(trial) + ": value outside [0,1]");
      return false;
    }
    const auto self = angular_distance(a, a);
    if (self.has_value() && *self != 0.0) {
      note("trial " + std::to_string(trial) + ": self-distance not zero");
      return false;
    }
    // a coordinate observed on one side only must not affect the result
    auto a_ext = a;
    auto b_ext = b;
    a_ext.emplace_back(1.0);
    b_ext.emplace_back(std::nullopt);
    if (angular_distance(a_ext, b_ext) != ab) {
      note("trial " + std::to_string(trial) + ": unshared coordinate changed the result");
      return false;
    }
  }
  return true;
}

// Brute-force two-sided permutation p-value over the full within-block
// group, identity included.
double brute_force_p(const DistanceMatrix& a, const DistanceMatrix& b,
                     const std::vector<std::vector<std::size_t>>& blocks) {
  const std::size_t n = a.size();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  const auto rho_for = [&](const std::vector<std::size_t>& p) {
    std::vector<double> av, bv;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        av.push_back(*a.at(i, j));
        bv.push_back(*b.at(p[i], p[j]));
      }
    }
    return *spearman(av, bv);
  };
  const double bar = std::abs(rho_for(perm));
  std::size_t exceed = 0, total = 0;
  const std::function<void(std::size_t)> walk = [&](std::size_t bi) {
    if (bi == blocks.size()) {
      ++total;
      if (std::abs(rho_for(perm)) >= bar) ++exceed;
      return;
    }
    auto targets = blocks[bi];
    do {
      for (std::size_t k = 0; k < blocks[bi].size(); ++k) perm[blocks[bi][k]] = targets[k];
      walk(bi + 1);
    } while (std::next_permutation(targets.begin(), targets.end()));
    for (const auto i : blocks[bi]) perm[i] = i;
  };
  walk(0);
  return static_cast<double>(exceed) / static_cast<double>(total);
}

bool check_mantel_exhaustive() {
  const std::vector<std::string> langs = {"aaaa1111", "bbbb1111", "cccc1111",
                                          "dddd1111", "eeee1111"};
  auto a = DistanceMatrix::empty(langs);
  auto b = DistanceMatrix::empty(langs);
  const double av[5][5] = {{0, 0.12, 0.34, 0.52, 0.71},
                           {0.12, 0, 0.47, 0.23, 0.65},
                           {0.34, 0.47, 0, 0.88, 0.41},
                           {0.52, 0.23, 0.88, 0, 0.19},
                           {0.71, 0.65, 0.41, 0.19, 0}};
  const double bv[5][5] = {{0, 0.55, 0.18, 0.72, 0.31},
                           {0.55, 0, 0.64, 0.09, 0.44},
                           {0.18, 0.64, 0, 0.27, 0.83},
                           {0.72, 0.09, 0.27, 0, 0.58},
                           {0.31, 0.44, 0.83, 0.58, 0}};
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      if (i != j) {
        a.at(i, j) = av[i][j];
        b.at(i, j) = bv[i][j];
      }
    }
  }
  const std::map<std::string, std::string> blocks = {
      {"aaaa1111", "fam1"}, {"bbbb1111", "fam1"}, {"cccc1111", "fam2"},
      {"dddd1111", "fam2"}, {"eeee1111", "fam2"}};

  const auto r = mantel_block(a, b, blocks, 999, 41, 0.05);
  if (!r.exhaustive || r.n_permutations != 11) {
    note("the 12-element group was not walked exhaustively");
    return false;
  }
  const double oracle = brute_force_p(a, b, {{0, 1}, {2, 3, 4}});
  if (r.p_value != oracle) {
    note("p=" + csv::format_double(r.p_value) + " but enumeration gives " +
         csv::format_double(oracle));
    return false;
  }

  const std::map<std::string, std::string> singletons = {
      {"aaaa1111", "f1"}, {"bbbb1111", "f2"}, {"cccc1111", "f3"},
      {"dddd1111", "f4"}, {"eeee1111", "f5"}};
  const auto rs = mantel_block(a, b, singletons, 999, 41, 0.05);
  if (rs.p_value != 1.0) {
    note("all-singleton blocks gave p=" + csv::format_double(rs.p_value));
    return false;
  }
  return true;
}

bool check_mantel_calibration() {
  std::vector<std::string> langs;
  std::map<std::string, std::string> blocks;
  for (std::size_t i = 0; i < 20; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "lang%04zu", i);
    langs.emplace_back(buf);
    blocks[buf] = "fam" + std::to_string(i / 5);
  }
  std::size_t false_positives = 0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    rng::Stream s(trial, "accept-calibration");
    auto a = DistanceMatrix::empty(langs);
    auto b = DistanceMatrix::empty(langs);
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t j = i + 1; j < 20; ++j) {
        a.at(i, j) = a.at(j, i) = s.next_unit();
        b.at(i, j) = b.at(j, i) = s.next_unit();
      }
    }
    const auto r = mantel_block(a, b, blocks, 999, trial, 0.05);
    if (r.p_value < 0.05) ++false_positives;
  }
  const double rate = static_cast<double>(false_positives) / 200.0;
  if (rate < 0.01 || rate > 0.10) {
    note("false-positive rate " + csv::format_double(rate) + " outside [0.01, 0.10]");
    return false;
  }
  return true;
}

std::optional<double> eval_f1(const std::string& method, const std::string& out_dir) {
  const std::string data = std::string(LINGBASE_DATA_DIR) + "/synth500";
  const int code = run_cli("eval --data " + data + " --method " + method +
                           " --agg union --holdout 0.2 --seed 4 --out " + out_dir);
  if (code != 0) {
    note("eval --method " + method + " exited with " + std::to_string(code));
    return std::nullopt;
  }
  const auto rows = csv::read_table(out_dir + "/eval.csv", ',');
  if (rows.size() != 2 || rows[1].fields.size() < 9) {
    note("eval.csv has an unexpected shape");
    return std::nullopt;
  }
  const auto f1 = csv::parse_double(rows[1].fields[8]);
  if (!f1) note("eval.csv carries no f1 for " + method);
  return f1;
}

bool check_lineage_gain() {
  const auto with = eval_f1("lineage+softimpute", g_scratch + "/gain_with");
  const auto alone = eval_f1("softimpute", g_scratch + "/gain_alone");
  if (!with || !alone) return false;
  if (!(*with > *alone)) {
    note("f1 " + csv::format_double(*with) + " (with lineage) vs " +
         csv::format_double(*alone) + " (without): no strict gain");
    return false;
  }
  note("f1 " + csv::format_double(*alone) + " -> " + csv::format_double(*with));
  return true;
}

bool check_metric_formulas() {
  bool ok = true;
  const auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9; };

  const auto bm = binary_metrics({1, 1, 1, 0, 0, 0, 0, 0, 0, 0},
                                 {1, 1, 0, 1, 0, 0, 0, 0, 0, 0});
  if (bm.tp != 2 || bm.fp != 1 || bm.fn != 1 || bm.tn != 6 || !close(bm.accuracy, 0.8) ||
      !close(*bm.precision, 2.0 / 3.0) || !close(*bm.recall, 2.0 / 3.0) ||
      !close(*bm.f1, 2.0 / 3.0)) {
    note("binary metrics disagree with the hand confusion matrix");
    ok = false;
  }

  const auto rm = regression_metrics({1, 1}, {1, 4});
  const auto rm_unit = regression_metrics({1, 0}, {0, 1});
  if (!close(rm.rmse, std::sqrt(4.5)) || rm.mae != 1.5 || rm_unit.rmse != 1.0 ||
      rm_unit.mae != 1.0) {
    note("regression metrics disagree with hand arithmetic");
    ok = false;
  }

  const auto rho = spearman({1, 2, 3, 4}, {2, 1, 4, 3});
  if (!rho || !close(*rho, 0.6)) {
    note("spearman example is not 0.6");
    ok = false;
  }

  if (bonferroni(0.05, 7) != 0.05 / 7 || std::abs(bonferroni(0.05, 7) - 0.00714) > 1e-5 ||
      bonferroni(0.1, 4) != 0.025) {
    note("bonferroni correction is off");
    ok = false;
  }

  const std::map<std::string, double> rel = {{"a", 3}, {"b", 2}, {"c", 1}};
  const double dcg = 3.0 / std::log2(2.0) + 7.0 / std::log2(3.0) + 1.0 / std::log2(4.0);
  const double idcg = 7.0 / std::log2(2.0) + 3.0 / std::log2(3.0) + 1.0 / std::log2(4.0);
  if (ndcg_at_k({"a", "b", "c"}, rel, 3) != 1.0 ||
      !close(ndcg_at_k({"b", "a", "c"}, rel, 3), dcg / idcg)) {
    note("ndcg disagrees with its exponential-gain formula");
    ok = false;
  }
  return ok;
}

bool files_match(const std::string& a, const std::string& b, const std::string& rel) {
  if (fs::path(rel).filename() == "manifest.json") {
    auto da = nlohmann::json::parse(slurp(a));
    auto db = nlohmann::json::parse(slurp(b));
    da.erase("created_at");
    db.erase("created_at");
    return da == db;
  }
  return slurp(a) == slurp(b);
}

bool check_pipeline_determinism() {
  const std::string data = std::string(LINGBASE_DATA_DIR) + "/synth500";
  for (const std::string leg : {"run_a", "run_b"}) {
    const auto root = g_scratch + "/" + leg;
    const std::vector<std::string> steps = {
        "ingest --catalog " + data + "/languages.csv --features " + data +
            "/features_synthA.csv --features " + data +
            "/features_synthB.csv --scripts " + data + "/scripts.tsv --lang-scripts " +
            data + "/lang_scripts.csv --out " + root + "/can",
        "impute --data " + root + "/can --method lineage+softimpute --agg union "
            "--seed 17 --out " + root + "/imp",
        "distance --category syntactic --data " + root + "/imp --out " + root + "/dist",
        "stats coverage --data " + root + "/can --out " + root + "/cov",
        "correlate --distances " + root + "/dist/distance_syntactic.csv --against " +
            data + "/genetic.csv --data " + root + "/can --n-perm 199 --seed 17 "
            "--out " + root + "/corr",
        "eval --data " + root + "/can --method lineage+softimpute --agg union "
            "--holdout 0.2 --seed 17 --out " + root + "/eval",
    };
    for (const auto& step : steps) {
      const int code = run_cli(step);
      if (code != 0) {
        note("step `" + step.substr(0, step.find(' ')) + "` exited with " +
             std::to_string(code) + " on " + leg);
        note(slurp(g_scratch + "/cli_stderr.txt"));
        return false;
      }
    }
  }

  std::set<std::string> rel_a, rel_b;
  for (const auto& e : fs::recursive_directory_iterator(g_scratch + "/run_a")) {
    if (e.is_regular_file()) {
      rel_a.insert(fs::relative(e.path(), g_scratch + "/run_a").string());
    }
  }
  for (const auto& e : fs::recursive_directory_iterator(g_scratch + "/run_b")) {
    if (e.is_regular_file()) {
      rel_b.insert(fs::relative(e.path(), g_scratch + "/run_b").string());
    }
  }
  if (rel_a != rel_b) {
    note("the two runs wrote different file sets");
    return false;
  }
  for (const auto& rel : rel_a) {
    if (!files_match(g_scratch + "/run_a/" + rel, g_scratch + "/run_b/" + rel, rel)) {
      note(rel + " differs between the runs");
      return false;
    }
  }
  note(std::to_string(rel_a.size()) + " files compared");
  return true;
}

bool check_script_binarization() {
  const auto dir = g_scratch + "/binarize";
  const auto catalog_path = write_file(
      dir, "catalog.csv",
      "glottocode,iso639_3,name,parent_glottocode,family_glottocode,"
      "resource_level,latitude,longitude\n"
      "kaza1248,kaz,Kazakh,,kaza1248,high,,\n");
  const auto scripts_path = write_file(dir, "scripts.tsv",
                                       "script_code\tType\tCase\tLigatures\n"
                                       "Arab\tAbjad\tNo\tRequired\n"
                                       "Cyrl\tAlphabet\tYes\tOptional\n"
                                       "Latn\tAlphabet\tYes\tNone\n");
  const auto map_path = write_file(dir, "lang_scripts.csv",
                                   "language_code,script_code\n"
                                   "kaza1248,Arab\n"
                                   "kaz,Cyrl\n"
                                   "kaza1248,Latn\n");

  const auto catalog = parse_catalog(catalog_path);
  const auto scripts = parse_scripts_table(scripts_path);
  const auto registry = CategoryRegistry::defaults();
  const auto schema = BinarizationSchema::table_defaults();
  const auto sm = binarize_scripts(scripts, schema, registry);
  const auto map = parse_language_script_map(map_path, catalog, scripts);
  const auto proj = project_scripts_to_languages(sm, map, catalog.codes());

  const auto cell = [](const FeatureMatrix& m, const std::string& lang,
                       const std::string& feat) -> Cell {
    const auto li = std::find(m.languages.begin(), m.languages.end(), lang);
    const auto fi = std::find(m.features.begin(), m.features.end(), feat);
    if (li == m.languages.end() || fi == m.features.end()) return std::nullopt;
    return m.at(static_cast<std::size_t>(li - m.languages.begin()),
                static_cast<std::size_t>(fi - m.features.begin()));
  };

  if (cell(proj, "kaza1248", "SC_ABJAD") != Cell(1.0) ||
      cell(proj, "kaza1248", "SC_ALPHABET") != Cell(1.0)) {
    note("multi-script union did not assert both writing-system types");
    return false;
  }
  if (cell(sm, "Arab", "SC_LIGATURES") != Cell(1.0) ||
      cell(sm, "Arab", "SC_REQUIRED_LIGATURES") != Cell(1.0) ||
      cell(sm, "Cyrl", "SC_LIGATURES") != Cell(1.0) ||
      cell(sm, "Cyrl", "SC_REQUIRED_LIGATURES") != Cell(0.0) ||
      cell(sm, "Latn", "SC_LIGATURES") != Cell(0.0) ||
      cell(sm, "Latn", "SC_REQUIRED_LIGATURES") != Cell(0.0)) {
    note("ligature rules did not produce the required/optional/none pattern");
    return false;
  }
  return true;
}

struct Check {
  const char* name;
  double budget_seconds;  // 0 = unbounded
  std::function<bool()> run;
};

}  // namespace

int main() {
  g_scratch = (fs::temp_directory_path() / "lingbase_accept").string();
  fs::remove_all(g_scratch);
  fs::create_directories(g_scratch);

  const std::vector<Check> checks = {
      {"lineage imputation equals the nearest-observed-ancestor walk on 50 random forests",
       5.0, check_lineage_oracle},
      {"lineage imputation never overwrites and is idempotent on 200 random instances",
       0.0, check_lineage_properties},
      {"soft-impute recovers hidden rank-2 entries and returns fully observed input intact",
       30.0, check_softimpute_recovery},
      {"soft-impute objective is non-increasing on 20 random instances",
       0.0, check_softimpute_objective},
      {"angular distance worked examples and invariants hold over 10000 random pairs",
       0.0, check_angular_distance},
      {"block-permutation p-values match exhaustive enumeration; singleton blocks give p=1",
       0.0, check_mantel_exhaustive},
      {"permutation-test false-positive rate stays near the nominal level",
       60.0, check_mantel_calibration},
      {"lineage preprocessing strictly improves completion f1 on the synthetic tree bundle",
       0.0, check_lineage_gain},
      {"metric formulas match hand-computed oracles",
       0.0, check_metric_formulas},
      {"pipeline reruns with one seed are byte-identical up to the manifest timestamp",
       120.0, check_pipeline_determinism},
      {"script binarization asserts multi-script unions and required ligatures",
       0.0, check_script_binarization},
  };

  std::size_t failed = 0;
  for (const auto& check : checks) {
    g_detail.clear();
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = check.run();
    } catch (const std::exception& e) {
      note(std::string("threw: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && check.budget_seconds > 0.0 && elapsed > check.budget_seconds) {
      ok = false;
      note("took " + csv::format_double(elapsed) + "s, budget " +
           csv::format_double(check.budget_seconds) + "s");
    }
    std::printf("%s  %s  (%.2fs)\n", ok ? "PASS" : "FAIL", check.name, elapsed);
    if (!g_detail.empty()) std::fputs(g_detail.c_str(), stdout);
    if (!ok) ++failed;
  }
  if (failed != 0) {
    std::printf("%zu of %zu checks failed\n", failed, checks.size());
    return 1;
  }
  std::printf("all %zu checks passed\n", checks.size());
  return 0;
}
