#include "lingbase/distances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lingbase/csv.hpp"
#include "lingbase/parallel.hpp"

namespace lingbase {

std::optional<double> angular_distance(std::span<const Cell> a, std::span<const Cell> b) {
  if (a.size() != b.size()) {
    throw Error("angular_distance: vector lengths differ (" + std::to_string(a.size()) +
                " vs " + std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  bool shared = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].has_value() || !b[i].has_value()) continue;
    shared = true;
    dot += *a[i] * *b[i];
    na += *a[i] * *a[i];
    nb += *b[i] * *b[i];
  }
  if (!shared) return std::nullopt;
  const bool zero_a = na == 0.0, zero_b = nb == 0.0;
  if (zero_a && zero_b) return 0.0;
  if (zero_a || zero_b) return 1.0;
  // One sqrt over the product keeps the cosine of identical integer
  // vectors at exactly 1, so self-distance is exactly 0.
  const double c = std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
  return std::acos(c) / std::numbers::pi;
}

namespace {

// Column subset for one category, in feature order.
std::vector<std::size_t> category_columns(const FeatureMatrix& m,
                                          std::optional<Category> category) {
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (!category || m.categories[j] == *category) cols.push_back(j);
  }
  if (cols.empty()) {
    throw Error(std::string("distance_matrix: no features in category ") +
                (category ? to_string(*category) : "(all)"));
  }
  return cols;
}

DistanceMatrix pairwise(const FeatureMatrix& m, std::optional<Category> category,
                        bool parallel_rows) {
  const auto cols = category_columns(m, category);
  const std::size_t n = m.rows();

  // Gather the category slice per language so the pair loop reads
  // contiguous memory.
  std::vector<Cell> slice(n * cols.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) slice[i * cols.size() + k] = m.at(i, cols[k]);
  }
  const auto row = [&](std::size_t i) {
    return std::span<const Cell>(slice.data() + i * cols.size(), cols.size());
  };

  auto d = DistanceMatrix::empty(m.languages);
  // Cell (i,j) with i<j is written only by the iteration that owns row
  // i, so the parallel loop never writes one slot twice.
  const auto body = [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto dist = angular_distance(row(i), row(j));
      d.at(i, j) = dist;
      d.at(j, i) = dist;
    }
  };
  if (parallel_rows) {
    const int workers = parallel::worker_count();
    (void)workers;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      body(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
  return d;
}

}  // namespace

DistanceMatrix distance_matrix(const FeatureMatrix& m, std::optional<Category> category) {
  return pairwise(m, category, true);
}

DistanceMatrix distance_matrix_serial(const FeatureMatrix& m,
                                      std::optional<Category> category) {
  return pairwise(m, category, false);
}

void write_distance_csv(const std::string& path, const DistanceMatrix& d) {
  std::string out = "code";
  for (const auto& code : d.languages) {
    out += ',';
    out += code;
  }
  out += '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += d.languages[i];
    for (std::size_t j = 0; j < d.size(); ++j) {
      out += ',';
      if (d.at(i, j)) out += csv::format_double(*d.at(i, j));
    }
    out += '\n';
  }
  csv::write_file(path, out);
}

DistanceMatrix read_distance_csv(const std::string& path) {
  const auto rows = csv::read_table(path, ',');
  if (rows.empty()) throw InputError(path + ": missing header row");
  const auto& header = rows[0].fields;
  if (header.empty() || header[0] != "code") {
    throw InputError(path + ":" + std::to_string(rows[0].line) +
                     ": first column must be code");
  }
  const std::size_t n = header.size() - 1;
  if (rows.size() - 1 != n) {
    throw InputError(path + ": " + std::to_string(rows.size() - 1) + " rows for " +
                     std::to_string(n) + " header codes");
  }
  std::unordered_set<std::string> unique(header.begin() + 1, header.end());
  if (unique.size() != n) throw InputError(path + ": duplicate language codes in header");

  DistanceMatrix d;
  d.languages.assign(header.begin() + 1, header.end());
  d.entries.assign(n * n, std::nullopt);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i + 1];
    if (row.fields.size() != header.size()) {
      throw InputError(path + ":" + std::to_string(row.line) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(row.fields.size()));
    }
    if (row.fields[0] != d.languages[i]) {
      throw InputError(path + ":" + std::to_string(row.line) + ": row code '" +
                       row.fields[0] + "' does not match header order ('" +
                       d.languages[i] + "' expected)");
    }
    for (std::size_t j = 0; j < n; ++j) {
      const auto& field = row.fields[j + 1];
      if (field.empty()) continue;
      const auto v = csv::parse_double(field);
      if (!v) {
        throw InputError(path + ":" + std::to_string(row.line) + ": unreadable distance '" +
                         field + "'");
      }
      d.at(i, j) = v;
    }
  }
  const auto violations = validate_distance_matrix(d);
  if (!violations.empty()) {
    throw InputError(path + ": " + violations[0].rule + " at " + violations[0].where + ": " +
                     violations[0].message);
  }
  return d;
}

}  // namespace lingbase
