#include "robustfit/correspondence_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

#include "robustfit/error.hpp"

namespace robustfit::io {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double field(std::string_view tok, int line, std::size_t column, const char* name) {
  double v = 0.0;
  if (!parse_number(tok, v)) {
    throw ParseError("field " + std::to_string(column) + " (" + name + "): '" + std::string(tok) +
                         "' is not a finite number",
                     line);
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

bool parse_number(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

Dataset parse_correspondences(std::istream& in) {
  Dataset data;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  std::optional<bool> labeled;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (!have_header) {
      if (tok.size() != 6 || tok[0] != "#" || tok[1] != "robustfit" || tok[2] != "v1") {
        throw ParseError("expected header '# robustfit v1 <problem> <width> <height>'", lineno);
      }
      try {
        data.problem = problem_from_string(tok[3]);
      } catch (const InvalidInput& e) {
        throw ParseError(e.what(), lineno);
      }
      data.image_size.width = field(tok[4], lineno, 5, "width");
      data.image_size.height = field(tok[5], lineno, 6, "height");
      if (!(data.image_size.width > 0.0 && data.image_size.height > 0.0)) {
        throw ParseError("image width and height must be positive", lineno);
      }
      have_header = true;
      continue;
    }
    if (tok[0].front() == '#') continue;
    if (tok.size() != 4 && tok.size() != 5) {
      throw ParseError("expected 'x1 y1 x2 y2 [label]', got " + std::to_string(tok.size()) +
                           " fields",
                       lineno);
    }
    const bool has_label = tok.size() == 5;
    if (labeled && *labeled != has_label) {
      throw ParseError("labels must be present on every record or on none", lineno);
    }
    labeled = has_label;
    Correspondence c;
    c.x1 = {field(tok[0], lineno, 1, "x1"), field(tok[1], lineno, 2, "y1")};
    c.x2 = {field(tok[2], lineno, 3, "x2"), field(tok[3], lineno, 4, "y2")};
    if (has_label) {
      if (tok[4] == "1") {
        c.label = Label::inlier;
      } else if (tok[4] == "0") {
        c.label = Label::outlier;
      } else {
        throw ParseError("field 5 (label): expected 0 or 1, got '" + std::string(tok[4]) + "'",
                         lineno);
      }
    }
    data.correspondences.push_back(c);
  }
  if (!have_header) throw ParseError("missing header", lineno == 0 ? 1 : lineno);
  data.has_labels = labeled.value_or(false);
  return data;
}

Dataset parse_correspondences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  return parse_correspondences(in);
}

void write_correspondences(std::ostream& out, const Dataset& data) {
  out << "# robustfit v1 " << to_string(data.problem) << ' '
      << format_number(data.image_size.width) << ' ' << format_number(data.image_size.height)
      << '\n';
  for (const Correspondence& c : data.correspondences) {
    out << format_number(c.x1.x()) << ' ' << format_number(c.x1.y()) << ' '
        << format_number(c.x2.x()) << ' ' << format_number(c.x2.y());
    if (data.has_labels) out << ' ' << (c.label == Label::inlier ? '1' : '0');
    out << '\n';
  }
}

void write_correspondences(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  write_correspondences(out, data);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace robustfit::io
