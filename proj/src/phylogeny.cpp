#include "lingbase/phylogeny.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lingbase/csv.hpp"
#include "lingbase/parallel.hpp"

namespace lingbase {

Phylogeny build_phylogeny(const std::vector<LanguageRecord>& records) {
  Phylogeny p;
  std::set<std::string> nodes;
  for (const auto& r : records) {
    if (!nodes.insert(r.code.glottocode).second) {
      throw Error("build_phylogeny: duplicate code " + r.code.glottocode);
    }
  }
  p.nodes.assign(nodes.begin(), nodes.end());

  for (const auto& r : records) {
    if (!r.parent) continue;
    if (!nodes.count(*r.parent)) {
      throw Error("build_phylogeny: parent " + *r.parent + " of " + r.code.glottocode +
                  " is not in the catalog");
    }
    p.parent.emplace(r.code.glottocode, *r.parent);
    p.children[*r.parent].push_back(r.code.glottocode);
  }
  for (auto& [node, kids] : p.children) std::sort(kids.begin(), kids.end());
  for (const auto& node : p.nodes) {
    if (!p.parent.count(node)) p.roots.push_back(node);
  }

  // Walk up from every node; meeting the current walk again means a cycle.
  // state: 0 unvisited, 1 on the current walk, 2 known to reach a root.
  std::unordered_map<std::string, int> state;
  for (const auto& start : p.nodes) {
    if (state[start] == 2) continue;
    std::vector<std::string> walk;
    std::string cur = start;
    while (true) {
      const int s = state[cur];
      if (s == 2) break;
      if (s == 1) {
        std::string msg = "build_phylogeny: cycle detected: " + cur;
        for (auto it = walk.rbegin(); it != walk.rend(); ++it) {
          msg += " -> " + *it;
          if (*it == cur) break;
        }
        throw Error(msg);
      }
      state[cur] = 1;
      walk.push_back(cur);
      const auto up = p.parent.find(cur);
      if (up == p.parent.end()) break;
      cur = up->second;
    }
    for (const auto& n : walk) state[n] = 2;
  }
  return p;
}

namespace {

struct RowIndex {
  std::unordered_map<std::string, std::size_t> index;

  explicit RowIndex(const std::vector<std::string>& languages) {
    index.reserve(languages.size());
    for (std::size_t i = 0; i < languages.size(); ++i) index.emplace(languages[i], i);
  }

  std::optional<std::size_t> find(const std::string& code) const {
    const auto it = index.find(code);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

// Fills one root's tree. Rows of distinct trees are disjoint, so the
// shared matrix and lang_fills slots are data-race free across trees.
void impute_tree(const std::string& root, const Phylogeny& p, FeatureMatrix& m,
                 const RowIndex& rows, std::vector<std::size_t>& lang_fills,
                 std::vector<std::size_t>& feature_fills) {
  std::deque<std::string> queue{root};
  std::set<std::string> visited{root};
  const std::size_t cols = m.cols();
  while (!queue.empty()) {
    const std::string node = queue.front();
    queue.pop_front();
    const auto kids = p.children.find(node);
    if (kids == p.children.end()) continue;
    const auto pi = rows.find(node);
    for (const auto& child : kids->second) {
      if (!visited.insert(child).second) continue;
      queue.push_back(child);
      if (!pi) continue;
      const auto ci = rows.find(child);
      if (!ci) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        const auto& from = m.at(*pi, j);
        auto& to = m.at(*ci, j);
        if (!to.has_value() && from.has_value()) {
          to = from;
          ++lang_fills[*ci];
          ++feature_fills[j];
        }
      }
    }
  }
}

std::pair<FeatureMatrix, ImputationTrace> impute(const FeatureMatrix& m, const Phylogeny& p,
                                                 bool parallel_roots) {
  std::set<std::string> langs(m.languages.begin(), m.languages.end());
  langs.insert(p.nodes.begin(), p.nodes.end());

  FeatureMatrix out;
  out.mode = m.mode;
  out.languages.assign(langs.begin(), langs.end());
  out.features = m.features;
  out.categories = m.categories;
  out.cells.assign(out.rows() * out.cols(), std::nullopt);
  const RowIndex rows(out.languages);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto ti = *rows.find(m.languages[i]);
    for (std::size_t j = 0; j < m.cols(); ++j) out.at(ti, j) = m.at(i, j);
  }

  std::vector<std::size_t> lang_fills(out.rows(), 0);
  std::vector<std::vector<std::size_t>> feature_fills(
      p.roots.size(), std::vector<std::size_t>(out.cols(), 0));

  const auto n_roots = static_cast<std::ptrdiff_t>(p.roots.size());
  if (parallel_roots) {
    const int workers = parallel::worker_count();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
    for (std::ptrdiff_t r = 0; r < n_roots; ++r) {
      impute_tree(p.roots[r], p, out, rows, lang_fills, feature_fills[r]);
    }
    (void)workers;
  } else {
    for (std::ptrdiff_t r = 0; r < n_roots; ++r) {
      impute_tree(p.roots[r], p, out, rows, lang_fills, feature_fills[r]);
    }
  }

  ImputationTrace trace;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    trace.per_language[out.languages[i]] = lang_fills[i];
    trace.filled += lang_fills[i];
  }
  for (std::size_t j = 0; j < out.cols(); ++j) {
    std::size_t n = 0;
    for (const auto& per_root : feature_fills) n += per_root[j];
    trace.per_feature[out.features[j]] = n;
  }
  return {std::move(out), std::move(trace)};
}

}  // namespace

std::pair<FeatureMatrix, ImputationTrace> lineage_impute(const FeatureMatrix& m,
                                                         const Phylogeny& p) {
  return impute(m, p, true);
}

std::pair<FeatureMatrix, ImputationTrace> lineage_impute_serial(const FeatureMatrix& m,
                                                                const Phylogeny& p) {
  return impute(m, p, false);
}

std::optional<double> parent_child_agreement(const FeatureMatrix& m, const Phylogeny& p,
                                             std::optional<Category> category) {
  if (m.mode != MatrixMode::Binary) {
    throw Error("parent_child_agreement: matrix must be binary");
  }
  const RowIndex rows(m.languages);
  std::size_t both = 0, equal = 0;
  for (const auto& [child, parent] : p.parent) {
    const auto ci = rows.find(child);
    const auto pi = rows.find(parent);
    if (!ci || !pi) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (category && m.categories[j] != *category) continue;
      const auto& a = m.at(*pi, j);
      const auto& b = m.at(*ci, j);
      if (!a.has_value() || !b.has_value()) continue;
      ++both;
      if (*a == *b) ++equal;
    }
  }
  if (both == 0) return std::nullopt;
  return static_cast<double>(equal) / static_cast<double>(both);
}

void write_trace_language_csv(const std::string& path, const ImputationTrace& t) {
  std::string out = "language,fills\n";
  for (const auto& [code, n] : t.per_language) {
    out += code;
    out += ',';
    out += std::to_string(n);
    out += '\n';
  }
  csv::write_file(path, out);
}

void write_trace_feature_csv(const std::string& path, const ImputationTrace& t) {
  std::string out = "feature,fills\n";
  for (const auto& [feature, n] : t.per_feature) {
    out += csv::escape_field(feature, ',');
    out += ',';
    out += std::to_string(n);
    out += '\n';
  }
  csv::write_file(path, out);
}

}  // namespace lingbase
