#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "robustfit/dataset.hpp"

namespace robustfit::io {

/// Text format:
///   # robustfit v1 <problem> <width> <height>
///   x1 y1 x2 y2 [label]
/// Coordinates are written with 9 significant digits; label 1 marks a
/// validation inlier, 0 anything else. Blank lines and further '#' lines are
/// ignored.
Dataset parse_correspondences(std::istream& in);
Dataset parse_correspondences(const std::filesystem::path& path);

void write_correspondences(std::ostream& out, const Dataset& data);
void write_correspondences(const std::filesystem::path& path, const Dataset& data);

/// Shortest "%.9g" rendering used by every text output of the toolkit.
std::string format_number(double v);

/// Parses a finite decimal exactly as strtod would (round to nearest).
/// Returns false on trailing garbage or non-finite input.
bool parse_number(std::string_view text, double& out);

}  // namespace robustfit::io
