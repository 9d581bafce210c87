#include "robustfit/dataset.hpp"

#include <algorithm>
#include <string>

#include "robustfit/error.hpp"

namespace robustfit {

std::size_t Dataset::count(Label label) const {
  return static_cast<std::size_t>(
      std::count_if(correspondences.begin(), correspondences.end(),
                    [label](const Correspondence& c) { return c.label == label; }));
}

std::string_view to_string(Problem p) {
  return p == Problem::fundamental ? "fundamental" : "homography";
}

Problem problem_from_string(std::string_view name) {
  if (name == "homography") return Problem::homography;
  if (name == "fundamental") return Problem::fundamental;
  throw InvalidInput("unknown problem '" + std::string(name) + "'");
}

}  // namespace robustfit
