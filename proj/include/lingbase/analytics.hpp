#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lingbase/core.hpp"

namespace lingbase {

/// Languages with at least one observed cell per category, split by
/// resource level. Languages without a catalog record count as unknown.
struct CoverageReport {
  std::array<std::array<std::size_t, kResourceLevelCount>, kCategoryCount> counts{};

  std::size_t at(Category c, ResourceLevel r) const {
    return counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
  }
  std::size_t total(Category c) const;
};

CoverageReport coverage(const FeatureMatrix& m, const std::vector<LanguageRecord>& catalog);

/// Which rows enter the sparsity denominator: only languages with at
/// least one observed cell in the category, or every matrix row.
enum class SparsityScope { CoveredLanguages, AllLanguages };

/// Missing-cell fractions per category and resource level. A scope with
/// no cells at all reports 1.0, so zero coverage always reads as full
/// sparsity.
struct SparsityReport {
  SparsityScope scope = SparsityScope::CoveredLanguages;
  std::array<std::array<double, kResourceLevelCount>, kCategoryCount> fraction{};
  std::array<double, kCategoryCount> overall{};

  double at(Category c, ResourceLevel r) const {
    return fraction[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
  }
};

SparsityReport sparsity(const FeatureMatrix& m, const std::vector<LanguageRecord>& catalog,
                        SparsityScope scope);

/// Average-tie rank transform followed by Pearson correlation. nullopt
/// for fewer than 3 points or zero rank variance on either side.
std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b);

struct MantelResult {
  double rho_obs = 0.0;
  double p_value = 1.0;
  std::size_t n_permutations = 0;  // non-identity permutations evaluated
  std::size_t blocks_used = 0;
  std::size_t singleton_blocks = 0;
  bool exhaustive = false;  // full within-block group enumerated
  double alpha_corrected = 0.0;
  bool significant = false;
  std::size_t pairs_used = 0;  // upper-triangle pairs defined in both
  std::uint64_t seed = 0;
};

/// Two-sided Mantel test with within-block label permutations. Blocks
/// map language -> family; unmapped languages form their own singleton
/// block. When the whole permutation group is no larger than n_perm+1
/// it is enumerated and the p-value is exact; otherwise n_perm sampled
/// permutations drive the add-one estimate
/// p = (1 + #{|rho_perm| >= |rho_obs|}) / (1 + n).
MantelResult mantel_block(const DistanceMatrix& a, const DistanceMatrix& b,
                          const std::map<std::string, std::string>& blocks,
                          std::size_t n_perm, std::uint64_t seed, double alpha);

/// Single-threaded reference for mantel_block; identical output.
MantelResult mantel_block_serial(const DistanceMatrix& a, const DistanceMatrix& b,
                                 const std::map<std::string, std::string>& blocks,
                                 std::size_t n_perm, std::uint64_t seed, double alpha);

double bonferroni(double alpha_family, std::size_t m_tests);

struct BinaryMetrics {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0.0;
  std::optional<double> precision;  // nullopt when tp+fp = 0
  std::optional<double> recall;     // nullopt when tp+fn = 0
  std::optional<double> f1;         // nullopt when precision+recall unusable
};

/// Confusion-matrix metrics with positive class 1. Inputs must be 0/1.
BinaryMetrics binary_metrics(const std::vector<double>& pred, const std::vector<double>& truth);

struct RegressionMetrics {
  double rmse = 0.0;
  double mae = 0.0;
};

RegressionMetrics regression_metrics(const std::vector<double>& pred,
                                     const std::vector<double>& truth);

/// DCG with gain 2^rel - 1 and discount log2(i+1), normalized by the
/// ideal ordering of the same candidates. Returns 0 when the ideal DCG
/// is 0. k beyond the ranking length falls back to the full ranking.
double ndcg_at_k(const std::vector<std::string>& ranking,
                 const std::map<std::string, double>& relevance, std::size_t k);

std::string format_coverage_table(const CoverageReport& r);
std::string format_sparsity_table(const SparsityReport& r);
void write_coverage_csv(const std::string& path, const CoverageReport& r);
void write_sparsity_csv(const std::string& path, const SparsityReport& r);

/// One audit line per test: rho, p, permutation and block census, seed.
std::string format_mantel_line(const std::string& name, const MantelResult& r);

}  // namespace lingbase
