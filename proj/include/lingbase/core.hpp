#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lingbase {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input (malformed files, unknown values, missing artifacts).
/// The CLI maps this to exit code 2; everything else maps to 1.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A cell is either missing or holds an observed real value. Binary
/// matrices restrict observed values to {0, 1}; continuous matrices to
/// [0, 1]. Missing is a state, never a number.
using Cell = std::optional<double>;

enum class Category {
  Syntactic,
  Phonological,
  Inventory,
  Morphological,
  Script,
  Other,
};

inline constexpr std::size_t kCategoryCount = 6;

enum class MatrixMode { Binary, Continuous };

enum class ResourceLevel { High, Medium, Low, Unknown };

inline constexpr std::size_t kResourceLevelCount = 4;

const char* to_string(Category c);
const char* to_string(ResourceLevel r);
std::optional<Category> parse_category(std::string_view s);
std::optional<ResourceLevel> parse_resource_level(std::string_view s);

/// Glottocode shape: [a-z0-9]{4}[0-9]{4}, e.g. "stan1293".
bool is_valid_glottocode(std::string_view s);
/// ISO 639-3 shape: three lowercase letters.
bool is_valid_iso639_3(std::string_view s);
/// ISO 15924 shape: [A-Z][a-z]{3}, e.g. "Latn".
bool is_valid_script_code(std::string_view s);

struct LanguageCode {
  std::string glottocode;
  std::optional<std::string> iso639_3;
};

struct LanguageRecord {
  LanguageCode code;
  std::string name;
  std::optional<std::string> parent;  // parent glottocode, absent for roots
  std::string family;                 // top-level family; own code for isolates
  ResourceLevel resource_level = ResourceLevel::Unknown;
  std::optional<double> latitude;
  std::optional<double> longitude;
};

/// Maps feature names to categories by prefix, first match wins. The
/// default registry follows the usual naming convention (S_ syntactic,
/// P_ phonological, INV_ inventory, M_ morphological, SC_ script); the
/// prefix list is configurable because morphological sources do not all
/// agree on a prefix.
struct CategoryRegistry {
  std::vector<std::pair<std::string, Category>> prefixes;

  static CategoryRegistry defaults();
  Category classify(std::string_view feature) const;
};

/// Languages x features grid. Row and column order are lexicographic
/// after ingestion; all construction paths keep them sorted.
struct FeatureMatrix {
  MatrixMode mode = MatrixMode::Binary;
  std::vector<std::string> languages;
  std::vector<std::string> features;
  std::vector<Category> categories;  // aligned with features
  std::vector<Cell> cells;           // row-major

  std::size_t rows() const { return languages.size(); }
  std::size_t cols() const { return features.size(); }

  Cell& at(std::size_t i, std::size_t j) { return cells[i * features.size() + j]; }
  const Cell& at(std::size_t i, std::size_t j) const {
    return cells[i * features.size() + j];
  }

  std::size_t observed_count() const;
  std::size_t missing_count() const { return cells.size() - observed_count(); }

  /// All-missing matrix over the given (sorted) index.
  static FeatureMatrix empty(MatrixMode mode, std::vector<std::string> languages,
                             std::vector<std::string> features,
                             const CategoryRegistry& registry);
};

/// Per-source layers over one shared language/feature index.
struct SourceLayeredMatrix {
  std::vector<std::string> sources;
  std::vector<FeatureMatrix> layers;  // aligned with sources
};

/// Symmetric matrix of optional distances in [0, 1]; diagonal always 0.
/// An absent entry means the pair had no shared observed features.
struct DistanceMatrix {
  std::vector<std::string> languages;
  std::vector<std::optional<double>> entries;  // row-major n*n

  std::size_t size() const { return languages.size(); }
  std::optional<double>& at(std::size_t i, std::size_t j) {
    return entries[i * languages.size() + j];
  }
  const std::optional<double>& at(std::size_t i, std::size_t j) const {
    return entries[i * languages.size() + j];
  }

  static DistanceMatrix empty(std::vector<std::string> languages);
};

struct Violation {
  std::string rule;     // short machine-friendly rule id
  std::string where;    // row/column/cell the rule failed on
  std::string message;
};

/// Checks every FeatureMatrix invariant. Never throws; an empty result
/// means the matrix is well formed.
std::vector<Violation> validate_matrix(const FeatureMatrix& m);

/// Shape, symmetry, range and diagonal checks for an ingested distance
/// matrix.
std::vector<Violation> validate_distance_matrix(const DistanceMatrix& d);

}  // namespace lingbase
