#include "lingbase/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lingbase/csv.hpp"
#include "lingbase/parallel.hpp"
#include "lingbase/rng.hpp"

namespace lingbase {

std::size_t CoverageReport::total(Category c) const {
  std::size_t n = 0;
  for (const auto v : counts[static_cast<std::size_t>(c)]) n += v;
  return n;
}

namespace {

std::unordered_map<std::string, ResourceLevel> level_index(
    const std::vector<LanguageRecord>& catalog) {
  std::unordered_map<std::string, ResourceLevel> levels;
  levels.reserve(catalog.size());
  for (const auto& r : catalog) levels.emplace(r.code.glottocode, r.resource_level);
  return levels;
}

ResourceLevel level_of(const std::unordered_map<std::string, ResourceLevel>& levels,
                       const std::string& code) {
  const auto it = levels.find(code);
  return it == levels.end() ? ResourceLevel::Unknown : it->second;
}

}  // namespace

CoverageReport coverage(const FeatureMatrix& m, const std::vector<LanguageRecord>& catalog) {
  const auto levels = level_index(catalog);
  CoverageReport report;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    bool seen[kCategoryCount] = {};
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m.at(i, j).has_value()) seen[static_cast<std::size_t>(m.categories[j])] = true;
    }
    const auto level = static_cast<std::size_t>(level_of(levels, m.languages[i]));
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      if (seen[c]) ++report.counts[c][level];
    }
  }
  return report;
}

SparsityReport sparsity(const FeatureMatrix& m, const std::vector<LanguageRecord>& catalog,
                        SparsityScope scope) {
  const auto levels = level_index(catalog);
  std::array<std::vector<std::size_t>, kCategoryCount> cols;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    cols[static_cast<std::size_t>(m.categories[j])].push_back(j);
  }

  SparsityReport report;
  report.scope = scope;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    std::array<std::size_t, kResourceLevelCount> total{}, missing{};
    for (std::size_t i = 0; i < m.rows(); ++i) {
      std::size_t observed = 0;
      for (const auto j : cols[c]) {
        if (m.at(i, j).has_value()) ++observed;
      }
      if (scope == SparsityScope::CoveredLanguages && observed == 0) continue;
      const auto level = static_cast<std::size_t>(level_of(levels, m.languages[i]));
      total[level] += cols[c].size();
      missing[level] += cols[c].size() - observed;
    }
    std::size_t total_all = 0, missing_all = 0;
    for (std::size_t r = 0; r < kResourceLevelCount; ++r) {
      total_all += total[r];
      missing_all += missing[r];
      report.fraction[c][r] =
          total[r] ? static_cast<double>(missing[r]) / static_cast<double>(total[r]) : 1.0;
    }
    report.overall[c] =
        total_all ? static_cast<double>(missing_all) / static_cast<double>(total_all) : 1.0;
  }
  return report;
}

namespace {

// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw Error("spearman: sequence lengths differ (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + ")");
  }
  if (a.size() < 3) return std::nullopt;
  return pearson(average_ranks(a), average_ranks(b));
}

namespace {

struct MantelPlan {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> a_pairs;  // A defined, i < j
  std::vector<double> a_vals;
  std::vector<double> a_ranks;          // used on the complete-B fast path
  bool b_complete = false;              // every off-diagonal B entry defined
  std::vector<std::vector<std::uint32_t>> blocks;  // index lists, sorted block order
  std::size_t singletons = 0;
};

MantelPlan plan_mantel(const DistanceMatrix& a, const DistanceMatrix& b,
                       const std::map<std::string, std::string>& blocks) {
  MantelPlan plan;
  const std::size_t n = a.size();
  plan.b_complete = true;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (a.at(i, j).has_value()) {
        plan.a_pairs.emplace_back(i, j);
        plan.a_vals.push_back(*a.at(i, j));
      }
      if (!b.at(i, j).has_value()) plan.b_complete = false;
    }
  }
  plan.a_ranks = average_ranks(plan.a_vals);

  // Group languages by family; languages without a mapping become their
  // own block ("!" cannot start a family code, so the key is collision
  // free).
  std::map<std::string, std::vector<std::uint32_t>> groups;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto it = blocks.find(a.languages[i]);
    const std::string key = it == blocks.end() ? "!" + a.languages[i] : it->second;
    groups[key].push_back(i);
  }
  for (auto& [key, members] : groups) {
    if (members.size() == 1) ++plan.singletons;
    plan.blocks.push_back(members);
  }
  return plan;
}

// rho between A and the relabeled B, over pairs defined in both.
std::optional<double> rho_for_perm(const DistanceMatrix& a, const DistanceMatrix& b,
                                   const MantelPlan& plan,
                                   const std::vector<std::uint32_t>& perm) {
  if (plan.b_complete) {
    std::vector<double> bv;
    bv.reserve(plan.a_pairs.size());
    for (const auto& [i, j] : plan.a_pairs) bv.push_back(*b.at(perm[i], perm[j]));
    return pearson(plan.a_ranks, average_ranks(bv));
  }
  std::vector<double> av, bv;
  av.reserve(plan.a_pairs.size());
  bv.reserve(plan.a_pairs.size());
  for (std::size_t k = 0; k < plan.a_pairs.size(); ++k) {
    const auto& [i, j] = plan.a_pairs[k];
    const auto& cell = b.at(perm[i], perm[j]);
    if (!cell.has_value()) continue;
    av.push_back(plan.a_vals[k]);
    bv.push_back(*cell);
  }
  return spearman(av, bv);
}

// Group size min(prod |block|!, cap) without overflow.
std::size_t group_size_capped(const MantelPlan& plan, std::size_t cap) {
  std::size_t s = 1;
  for (const auto& block : plan.blocks) {
    for (std::size_t k = 2; k <= block.size(); ++k) {
      if (s > cap / k) return cap;
      s *= k;
    }
  }
  return std::min(s, cap);
}

std::vector<std::uint32_t> sampled_perm(const MantelPlan& plan, std::size_t n,
                                        std::uint64_t seed, std::size_t t) {
  rng::Stream stream(seed, "mantel", t);
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  for (const auto& block : plan.blocks) {
    if (block.size() < 2) continue;
    std::vector<std::uint32_t> shuffled = block;
    stream.shuffle(shuffled);
    for (std::size_t k = 0; k < block.size(); ++k) perm[block[k]] = shuffled[k];
  }
  return perm;
}

MantelResult mantel_impl(const DistanceMatrix& a, const DistanceMatrix& b,
                         const std::map<std::string, std::string>& blocks,
                         std::size_t n_perm, std::uint64_t seed, double alpha,
                         bool parallel_perms) {
  if (a.languages != b.languages) {
    throw Error("mantel_block: matrices cover different language sequences");
  }
  if (n_perm < 1) throw Error("mantel_block: need at least one permutation");

  const auto plan = plan_mantel(a, b, blocks);
  const std::size_t n = a.size();

  std::vector<double> b_obs;
  std::vector<double> a_obs;
  for (std::size_t k = 0; k < plan.a_pairs.size(); ++k) {
    const auto& [i, j] = plan.a_pairs[k];
    if (!b.at(i, j).has_value()) continue;
    a_obs.push_back(plan.a_vals[k]);
    b_obs.push_back(*b.at(i, j));
  }
  if (a_obs.size() < 3) {
    throw Error("mantel_block: only " + std::to_string(a_obs.size()) +
                " pairs defined in both matrices (need 3)");
  }
  const auto rho_obs = spearman(a_obs, b_obs);
  if (!rho_obs) {
    throw Error("mantel_block: observed correlation undefined (constant ranks)");
  }

  MantelResult result;
  result.rho_obs = *rho_obs;
  result.blocks_used = plan.blocks.size();
  result.singleton_blocks = plan.singletons;
  result.alpha_corrected = alpha;
  result.pairs_used = a_obs.size();
  result.seed = seed;

  const double bar = std::abs(*rho_obs);
  const std::size_t group = group_size_capped(plan, n_perm + 2);
  std::size_t exceed = 0;

  if (group - 1 <= n_perm) {
    // Small permutation group: walk it completely (identity included
    // via the +1 of the estimator) for an exact p-value.
    result.exhaustive = true;
    result.n_permutations = group - 1;
    std::vector<std::uint32_t> identity(n);
    std::iota(identity.begin(), identity.end(), 0u);
    auto state = plan.blocks;  // per-block index lists, advanced as an odometer
    std::vector<std::uint32_t> perm(n);
    while (true) {
      bool advanced = false;
      for (auto& block : state) {
        if (std::next_permutation(block.begin(), block.end())) {
          advanced = true;
          break;
        }
        // wrapped back to sorted order; carry into the next block
      }
      if (!advanced) break;
      perm = identity;
      for (std::size_t g = 0; g < state.size(); ++g) {
        for (std::size_t k = 0; k < state[g].size(); ++k) {
          perm[plan.blocks[g][k]] = state[g][k];
        }
      }
      const auto rho = rho_for_perm(a, b, plan, perm);
      if (rho && std::abs(*rho) >= bar) ++exceed;
    }
  } else {
    result.exhaustive = false;
    result.n_permutations = n_perm;
    const auto count = static_cast<std::ptrdiff_t>(n_perm);
    long long hits = 0;
    if (parallel_perms) {
      const int workers = parallel::worker_count();
      (void)workers;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers) reduction(+ : hits)
#endif
      for (std::ptrdiff_t t = 0; t < count; ++t) {
        const auto perm = sampled_perm(plan, n, seed, static_cast<std::size_t>(t));
        const auto rho = rho_for_perm(a, b, plan, perm);
        if (rho && std::abs(*rho) >= bar) ++hits;
      }
    } else {
      for (std::ptrdiff_t t = 0; t < count; ++t) {
        const auto perm = sampled_perm(plan, n, seed, static_cast<std::size_t>(t));
        const auto rho = rho_for_perm(a, b, plan, perm);
        if (rho && std::abs(*rho) >= bar) ++hits;
      }
    }
    exceed = static_cast<std::size_t>(hits);
  }

  result.p_value = (1.0 + static_cast<double>(exceed)) /
                   (1.0 + static_cast<double>(result.n_permutations));
  result.significant = result.p_value < alpha;
  return result;
}

}  // namespace

MantelResult mantel_block(const DistanceMatrix& a, const DistanceMatrix& b,
                          const std::map<std::string, std::string>& blocks,
                          std::size_t n_perm, std::uint64_t seed, double alpha) {
  return mantel_impl(a, b, blocks, n_perm, seed, alpha, true);
}

MantelResult mantel_block_serial(const DistanceMatrix& a, const DistanceMatrix& b,
                                 const std::map<std::string, std::string>& blocks,
                                 std::size_t n_perm, std::uint64_t seed, double alpha) {
  return mantel_impl(a, b, blocks, n_perm, seed, alpha, false);
}

double bonferroni(double alpha_family, std::size_t m_tests) {
  if (m_tests < 1) throw Error("bonferroni: m_tests must be >= 1");
  return alpha_family / static_cast<double>(m_tests);
}

BinaryMetrics binary_metrics(const std::vector<double>& pred,
                             const std::vector<double>& truth) {
  if (pred.size() != truth.size()) {
    throw Error("binary_metrics: sequence lengths differ (" + std::to_string(pred.size()) +
                " vs " + std::to_string(truth.size()) + ")");
  }
  if (pred.empty()) throw Error("binary_metrics: empty input");
  BinaryMetrics m;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if ((pred[i] != 0.0 && pred[i] != 1.0) || (truth[i] != 0.0 && truth[i] != 1.0)) {
      throw Error("binary_metrics: inputs must be 0 or 1");
    }
    if (truth[i] == 1.0) {
      pred[i] == 1.0 ? ++m.tp : ++m.fn;
    } else {
      pred[i] == 1.0 ? ++m.fp : ++m.tn;
    }
  }
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(pred.size());
  if (m.tp + m.fp > 0) {
    m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  }
  if (m.tp + m.fn > 0) {
    m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  }
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

RegressionMetrics regression_metrics(const std::vector<double>& pred,
                                     const std::vector<double>& truth) {
  if (pred.size() != truth.size()) {
    throw Error("regression_metrics: sequence lengths differ (" +
                std::to_string(pred.size()) + " vs " + std::to_string(truth.size()) + ")");
  }
  if (pred.empty()) throw Error("regression_metrics: empty input");
  double se = 0.0, ae = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - truth[i];
    se += e * e;
    ae += std::abs(e);
  }
  const auto n = static_cast<double>(pred.size());
  return {std::sqrt(se / n), ae / n};
}

double ndcg_at_k(const std::vector<std::string>& ranking,
                 const std::map<std::string, double>& relevance, std::size_t k) {
  if (k < 1) throw Error("ndcg_at_k: k must be >= 1");
  const auto gain_of = [&](const std::string& id) {
    const auto it = relevance.find(id);
    if (it == relevance.end()) throw Error("ndcg_at_k: no relevance for candidate " + id);
    if (it->second < 0.0) throw Error("ndcg_at_k: negative relevance for candidate " + id);
    return std::exp2(it->second) - 1.0;
  };
  const std::size_t depth = std::min(k, ranking.size());
  double dcg = 0.0;
  std::vector<double> gains;
  gains.reserve(ranking.size());
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const double g = gain_of(ranking[i]);
    gains.push_back(g);
    if (i < depth) dcg += g / std::log2(static_cast<double>(i) + 2.0);
  }
  std::sort(gains.begin(), gains.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < depth; ++i) {
    idcg += gains[i] / std::log2(static_cast<double>(i) + 2.0);
  }
  if (idcg == 0.0) return 0.0;
  return dcg / idcg;
}

namespace {

constexpr Category kTableOrder[] = {Category::Syntactic,  Category::Phonological,
                                    Category::Inventory,  Category::Morphological,
                                    Category::Script,     Category::Other};
constexpr ResourceLevel kLevelOrder[] = {ResourceLevel::High, ResourceLevel::Medium,
                                         ResourceLevel::Low, ResourceLevel::Unknown};

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  while (s.size() < width) s.insert(s.begin(), ' ');
  return s;
}

}  // namespace

std::string format_coverage_table(const CoverageReport& r) {
  std::string out = "category        high  medium     low unknown   total\n";
  for (const auto c : kTableOrder) {
    std::string line = to_string(c);
    line.resize(14, ' ');
    for (const auto lvl : kLevelOrder) line += pad(std::to_string(r.at(c, lvl)), 8);
    line += pad(std::to_string(r.total(c)), 8);
    out += line + "\n";
  }
  return out;
}

std::string format_sparsity_table(const SparsityReport& r) {
  std::string out = "category          high  medium     low unknown overall\n";
  for (const auto c : kTableOrder) {
    std::string line = to_string(c);
    line.resize(16, ' ');
    for (const auto lvl : kLevelOrder) line += pad(fixed4(r.at(c, lvl)), 8);
    line += pad(fixed4(r.overall[static_cast<std::size_t>(c)]), 8);
    out += line + "\n";
  }
  return out;
}

void write_coverage_csv(const std::string& path, const CoverageReport& r) {
  std::string out = "category,high,medium,low,unknown,total\n";
  for (const auto c : kTableOrder) {
    std::string line = to_string(c);
    for (const auto lvl : kLevelOrder) line += "," + std::to_string(r.at(c, lvl));
    line += "," + std::to_string(r.total(c));
    out += line + "\n";
  }
  csv::write_file(path, out);
}

void write_sparsity_csv(const std::string& path, const SparsityReport& r) {
  std::string out = "category,high,medium,low,unknown,overall\n";
  for (const auto c : kTableOrder) {
    std::string line = to_string(c);
    for (const auto lvl : kLevelOrder) line += "," + csv::format_double(r.at(c, lvl));
    line += "," + csv::format_double(r.overall[static_cast<std::size_t>(c)]);
    out += line + "\n";
  }
  csv::write_file(path, out);
}

std::string format_mantel_line(const std::string& name, const MantelResult& r) {
  std::string line = name + ": rho=" + csv::format_double(r.rho_obs) +
                     " p=" + csv::format_double(r.p_value) + " (" +
                     std::to_string(r.n_permutations) +
                     (r.exhaustive ? " permutations, exhaustive; " : " permutations, sampled; ") +
                     std::to_string(r.blocks_used) + " blocks, " +
                     std::to_string(r.singleton_blocks) + " singletons; " +
                     std::to_string(r.pairs_used) + " pairs; alpha=" +
                     csv::format_double(r.alpha_corrected) + "; " +
                     (r.significant ? "significant" : "not significant") +
                     "; seed=" + std::to_string(r.seed) + ")";
  return line;
}

}  // namespace lingbase
