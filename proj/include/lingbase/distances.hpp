#pragma once

#include <optional>
#include <span>
#include <string>

#include "lingbase/core.hpp"

namespace lingbase {

/// Normalized angular distance acos(A.B / (|A||B|)) / pi over the
/// coordinates observed in both vectors. nullopt when no coordinate is
/// shared. Zero-norm conventions on the shared restriction: both zero
/// -> 0.0, exactly one zero -> 1.0. The cosine argument is clamped to
/// [-1, 1] before acos.
std::optional<double> angular_distance(std::span<const Cell> a, std::span<const Cell> b);

/// Pairwise angular distances over the features of one category
/// (nullopt = every feature). Symmetric, zero diagonal, undefined
/// entries preserved.
DistanceMatrix distance_matrix(const FeatureMatrix& m,
                               std::optional<Category> category = std::nullopt);

/// Single-threaded reference for distance_matrix; bit-identical output.
DistanceMatrix distance_matrix_serial(const FeatureMatrix& m,
                                      std::optional<Category> category = std::nullopt);

/// CSV form: header `code,<code1>,...`, symmetric body, empty cell =
/// undefined pair.
void write_distance_csv(const std::string& path, const DistanceMatrix& d);

/// Reads and validates a distance CSV (shape, diagonal, symmetry,
/// range). Violations raise InputError naming the first offending pair.
DistanceMatrix read_distance_csv(const std::string& path);

}  // namespace lingbase
