#include "lingbase/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

namespace lingbase {

const char* to_string(Category c) {
  switch (c) {
    case Category::Syntactic: return "syntactic";
    case Category::Phonological: return "phonological";
    case Category::Inventory: return "inventory";
    case Category::Morphological: return "morphological";
    case Category::Script: return "script";
    case Category::Other: return "other";
  }
  return "other";
}

const char* to_string(ResourceLevel r) {
  switch (r) {
    case ResourceLevel::High: return "high";
    case ResourceLevel::Medium: return "medium";
    case ResourceLevel::Low: return "low";
    case ResourceLevel::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Category> parse_category(std::string_view s) {
  if (s == "syntactic") return Category::Syntactic;
  if (s == "phonological") return Category::Phonological;
  if (s == "inventory") return Category::Inventory;
  if (s == "morphological") return Category::Morphological;
  if (s == "script") return Category::Script;
  if (s == "other") return Category::Other;
  return std::nullopt;
}

std::optional<ResourceLevel> parse_resource_level(std::string_view s) {
  if (s == "high") return ResourceLevel::High;
  if (s == "medium") return ResourceLevel::Medium;
  if (s == "low") return ResourceLevel::Low;
  if (s == "unknown" || s.empty()) return ResourceLevel::Unknown;
  return std::nullopt;
}

bool is_valid_glottocode(std::string_view s) {
  if (s.size() != 8) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    const char c = s[i];
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
  }
  for (std::size_t i = 4; i < 8; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

bool is_valid_iso639_3(std::string_view s) {
  if (s.size() != 3) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

bool is_valid_script_code(std::string_view s) {
  if (s.size() != 4) return false;
  if (s[0] < 'A' || s[0] > 'Z') return false;
  return std::all_of(s.begin() + 1, s.end(),
                     [](char c) { return c >= 'a' && c <= 'z'; });
}

CategoryRegistry CategoryRegistry::defaults() {
  // SC_ must precede S_ (first match wins).
  return CategoryRegistry{{
      {"SC_", Category::Script},
      {"INV_", Category::Inventory},
      {"S_", Category::Syntactic},
      {"P_", Category::Phonological},
      {"M_", Category::Morphological},
  }};
}

Category CategoryRegistry::classify(std::string_view feature) const {
  for (const auto& [prefix, category] : prefixes) {
    if (feature.size() >= prefix.size() &&
        feature.substr(0, prefix.size()) == prefix) {
      return category;
    }
  }
  return Category::Other;
}

std::size_t FeatureMatrix::observed_count() const {
  std::size_t n = 0;
  for (const auto& c : cells) {
    if (c.has_value()) ++n;
  }
  return n;
}

FeatureMatrix FeatureMatrix::empty(MatrixMode mode,
                                   std::vector<std::string> languages,
                                   std::vector<std::string> features,
                                   const CategoryRegistry& registry) {
  FeatureMatrix m;
  m.mode = mode;
  m.languages = std::move(languages);
  m.features = std::move(features);
  m.categories.reserve(m.features.size());
  for (const auto& f : m.features) m.categories.push_back(registry.classify(f));
  m.cells.assign(m.languages.size() * m.features.size(), std::nullopt);
  return m;
}

DistanceMatrix DistanceMatrix::empty(std::vector<std::string> languages) {
  DistanceMatrix d;
  d.languages = std::move(languages);
  d.entries.assign(d.languages.size() * d.languages.size(), std::nullopt);
  for (std::size_t i = 0; i < d.languages.size(); ++i) d.at(i, i) = 0.0;
  return d;
}

namespace {

void check_sorted_unique(const std::vector<std::string>& names, const char* what,
                         std::vector<Violation>& out) {
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!seen.insert(names[i]).second) {
      out.push_back({std::string(what) + "-unique", names[i],
                     std::string(what) + " appears more than once"});
    }
    if (i > 0 && !(names[i - 1] < names[i]) && names[i - 1] != names[i]) {
      out.push_back({std::string(what) + "-order", names[i],
                     std::string(what) + " sequence is not lexicographic"});
    }
  }
}

}  // namespace

std::vector<Violation> validate_matrix(const FeatureMatrix& m) {
  std::vector<Violation> out;

  if (m.cells.size() != m.rows() * m.cols()) {
    out.push_back({"grid-shape", "",
                   "cell grid size " + std::to_string(m.cells.size()) +
                       " does not equal " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols())});
    return out;  // cell checks below would index out of range
  }
  if (m.categories.size() != m.cols()) {
    out.push_back({"category-shape", "",
                   "category list does not align with the feature list"});
  }

  check_sorted_unique(m.languages, "language", out);
  check_sorted_unique(m.features, "feature", out);

  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Cell& c = m.at(i, j);
      if (!c.has_value()) continue;
      const double v = *c;
      const std::string where = m.languages[i] + "/" + m.features[j];
      if (!std::isfinite(v)) {
        out.push_back({"cell-finite", where, "observed cell is not finite"});
        continue;
      }
      if (m.mode == MatrixMode::Binary) {
        if (v != 0.0 && v != 1.0) {
          out.push_back({"cell-mode", where,
                         "binary-mode cell holds a non-binary value"});
        }
      } else if (v < 0.0 || v > 1.0) {
        out.push_back({"cell-range", where,
                       "continuous-mode cell lies outside [0, 1]"});
      }
    }
  }
  return out;
}

std::vector<Violation> validate_distance_matrix(const DistanceMatrix& d) {
  std::vector<Violation> out;
  const std::size_t n = d.size();
  if (d.entries.size() != n * n) {
    out.push_back({"grid-shape", "", "entry grid is not square over the languages"});
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!d.at(i, i).has_value() || *d.at(i, i) != 0.0) {
      out.push_back({"diagonal", d.languages[i], "diagonal entry is not 0"});
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = d.at(i, j);
      const auto& b = d.at(j, i);
      const std::string where = d.languages[i] + "/" + d.languages[j];
      if (a.has_value() != b.has_value() ||
          (a.has_value() && *a != *b)) {
        out.push_back({"symmetry", where, "entry differs from its transpose"});
      }
      if (a.has_value() && (*a < 0.0 || *a > 1.0 || !std::isfinite(*a))) {
        out.push_back({"range", where, "distance lies outside [0, 1]"});
      }
    }
  }
  return out;
}

}  // namespace lingbase
