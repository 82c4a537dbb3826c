#include "fracspec/grid.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracspec {

double GridFunction::integral() const {
  double s = 0.0;
  for (std::size_t p = 0; p < values.size(); ++p) s += weights[p] * values[p];
  return s;
}

double GridFunction::norm2() const {
  double s = 0.0;
  for (std::size_t p = 0; p < values.size(); ++p)
    s += weights[p] * values[p] * values[p];
  return s;
}

void GridFunction::check_consistent() const {
  if (dim < 1) throw std::invalid_argument("GridFunction dim must be >= 1");
  if (values.size() != weights.size() ||
      coords.size() != values.size() * static_cast<std::size_t>(dim))
    throw std::invalid_argument("GridFunction column sizes disagree");
}

namespace {

std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return {buf, static_cast<std::size_t>(n)};
}

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw std::invalid_argument("CSV field is not a number: '" + s + "'");
  return v;
}

}  // namespace

std::string to_csv(const GridFunction& g) {
  g.check_consistent();
  std::ostringstream os;
  for (int a = 0; a < g.dim; ++a) os << 'x' << (a + 1) << ',';
  os << "value,weight\r\n";
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (int a = 0; a < g.dim; ++a)
      os << format_double(g.coords[p * g.dim + a]) << ',';
    os << format_double(g.values[p]) << ',' << format_double(g.weights[p])
       << "\r\n";
  }
  return os.str();
}

GridFunction from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty CSV");
  const auto header = split_record(line);
  if (header.size() < 3 || header[header.size() - 2] != "value" ||
      header.back() != "weight")
    throw std::invalid_argument(
        "CSV header must be x1[,x2[,...]],value,weight");
  GridFunction g;
  g.dim = static_cast<int>(header.size()) - 2;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_record(line);
    if (fields.size() != header.size())
      throw std::invalid_argument("CSV row width disagrees with header");
    for (int a = 0; a < g.dim; ++a) g.coords.push_back(parse_double(fields[a]));
    g.values.push_back(parse_double(fields[g.dim]));
    g.weights.push_back(parse_double(fields[g.dim + 1]));
  }
  g.check_consistent();
  return g;
}

void write_csv(const GridFunction& g, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << to_csv(g);
}

GridFunction read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return from_csv(ss.str());
}

}  // namespace fracspec
