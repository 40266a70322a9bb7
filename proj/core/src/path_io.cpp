#include "pathwise/path_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pathwise {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t row) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw std::invalid_argument("path csv: bad number '" + s + "' on data row " +
                                std::to_string(row));
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

SampledPath read_path_csv(std::istream& in, const PathReadOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("path csv: empty input");
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "t")
    throw std::invalid_argument("path csv: header must start with 't'");
  std::size_t d = 0;
  while (1 + d < header.size() && header[1 + d] == "x" + std::to_string(d + 1)) ++d;
  if (d == 0) throw std::invalid_argument("path csv: no value columns x1..xd");
  const std::size_t rest = header.size() - 1 - d;
  if (rest != 0 && rest != d)
    throw std::invalid_argument("path csv: expected either no jump columns or jump1..jump" +
                                std::to_string(d));
  for (std::size_t c = 0; c < rest; ++c)
    if (header[1 + d + c] != "jump" + std::to_string(c + 1))
      throw std::invalid_argument("path csv: unexpected column '" + header[1 + d + c] + "'");
  const bool has_jumps = rest == d;

  std::vector<double> grid;
  std::vector<double> vals;
  std::vector<std::vector<double>> raw_jumps;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw std::invalid_argument("path csv: wrong field count on data row " +
                                  std::to_string(row));
    grid.push_back(parse_double(fields[0], row));
    for (std::size_t c = 0; c < d; ++c) vals.push_back(parse_double(fields[1 + c], row));
    if (has_jumps) {
      std::vector<double> j(d);
      for (std::size_t c = 0; c < d; ++c) j[c] = parse_double(fields[1 + d + c], row);
      raw_jumps.push_back(std::move(j));
    }
  }
  if (grid.size() < 2) throw std::invalid_argument("path csv: need at least two rows");

  std::vector<Jump> jumps;
  if (has_jumps) {
    double scale = 1.0;
    for (double v : vals) scale = std::max(scale, std::abs(v));
    const double threshold = options.jump_threshold_rel * scale;
    for (std::size_t i = 0; i < raw_jumps.size(); ++i) {
      Vector size = raw_jumps[i];
      bool any = false;
      for (double& v : size) {
        if (std::abs(v) <= threshold) v = 0.0;
        any = any || v != 0.0;
      }
      if (!any) continue;
      if (i == 0) throw std::invalid_argument("path csv: jump recorded at the first row");
      jumps.push_back({grid[i], std::move(size)});
    }
  }
  return SampledPath(std::move(grid), d, std::move(vals), std::move(jumps));
}

SampledPath read_path_csv_file(const std::string& filename, const PathReadOptions& options) {
  std::ifstream in(filename);
  if (!in) throw std::runtime_error("cannot open path file '" + filename + "'");
  return read_path_csv(in, options);
}

void write_path_csv(std::ostream& out, const SampledPath& path) {
  const std::size_t d = path.dim();
  const bool jumps = !path.jumps().empty();
  out << 't';
  for (std::size_t c = 0; c < d; ++c) out << ",x" << c + 1;
  if (jumps)
    for (std::size_t c = 0; c < d; ++c) out << ",jump" << c + 1;
  out << '\n';
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << format_double(path.time(i));
    for (std::size_t c = 0; c < d; ++c) out << ',' << format_double(path.value(i, c));
    if (jumps) {
      const Vector j = path.jump(i);
      for (std::size_t c = 0; c < d; ++c) out << ',' << format_double(j[c]);
    }
    out << '\n';
  }
}

}  // namespace pathwise
