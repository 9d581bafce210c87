#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

#include "robustfit/geometry.hpp"

namespace robustfit {

enum class Problem { homography, fundamental };

struct ImageSize {
  double width = 640.0;
  double height = 480.0;

  double diagonal() const { return std::hypot(width, height); }
};

struct Dataset {
  Problem problem = Problem::homography;
  ImageSize image_size;
  std::vector<Correspondence> correspondences;
  bool has_labels = false;

  std::size_t size() const { return correspondences.size(); }
  std::size_t count(Label label) const;
};

inline ModelKind model_kind(Problem p) {
  return p == Problem::fundamental ? ModelKind::fundamental : ModelKind::homography;
}

std::string_view to_string(Problem p);
/// Throws InvalidInput on unknown names.
Problem problem_from_string(std::string_view name);

}  // namespace robustfit
