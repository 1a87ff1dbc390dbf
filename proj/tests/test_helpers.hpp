#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lingbase/core.hpp"
#include "lingbase/csv.hpp"

namespace testutil {

/// Fresh scratch directory under the system temp root, wiped on entry so
/// reruns start clean.
inline std::string scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lingbase_ut_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

inline std::string write_fixture(const std::string& dir, const std::string& name,
                                 const std::string& text) {
  const auto path = dir + "/" + name;
  lingbase::csv::write_file(path, text);
  return path;
}

/// Binary matrix straight from rows of -1 (missing), 0, 1.
inline lingbase::FeatureMatrix make_matrix(std::vector<std::string> languages,
                                           std::vector<std::string> features,
                                           const std::vector<std::vector<int>>& rows) {
  auto m = lingbase::FeatureMatrix::empty(lingbase::MatrixMode::Binary,
                                          std::move(languages), std::move(features),
                                          lingbase::CategoryRegistry::defaults());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (rows[i][j] >= 0) m.at(i, j) = static_cast<double>(rows[i][j]);
    }
  }
  return m;
}

}  // namespace testutil
