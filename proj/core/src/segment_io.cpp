#include "floquet_sep/segment_io.hpp"

#include <charconv>
#include <istream>
#include <locale>
#include <ostream>
#include <sstream>
#include <vector>

#include "floquet_sep/errors.hpp"

namespace floquet_sep {

namespace {

std::vector<double> parse_row(const std::string& line, int lineno) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    auto comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    double v = 0.0;
    const char* first = line.data() + pos;
    const char* last = line.data() + comma;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      throw InvalidArgument("segment csv line " + std::to_string(lineno) +
                            ": cannot parse '" + std::string(first, last) + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << x;
  return os.str();
}

void write_segment_csv(std::ostream& os, const Segment& u) {
  const int n = u.dim();
  os << "# head";
  for (int i = 0; i < n; ++i) os << ',' << format_double(u.head()(i));
  os << "\ns";
  for (int i = 0; i < n; ++i) os << ",z_" << (i + 1);
  os << '\n';
  for (int j = 0; j <= u.resolution(); ++j) {
    os << format_double(u.node_time(j));
    for (int i = 0; i < n; ++i) os << ',' << format_double(u.node(j)(i));
    os << '\n';
  }
}

Segment read_segment_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# head,", 0) != 0) {
    throw InvalidArgument("segment csv: missing '# head,...' line");
  }
  const auto head = parse_row(line.substr(7), 1);
  if (!std::getline(is, line) || line.rfind("s,", 0) != 0) {
    throw InvalidArgument("segment csv: missing 's,z_1,...' header");
  }
  std::vector<std::vector<double>> rows;
  int lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto row = parse_row(line, lineno);
    if (row.size() != head.size() + 1) {
      throw InvalidArgument("segment csv line " + std::to_string(lineno) +
                            ": expected " + std::to_string(head.size() + 1) +
                            " columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 3) throw InvalidArgument("segment csv: too few rows");
  const int n = static_cast<int>(head.size());
  const int m = static_cast<int>(rows.size()) - 1;
  Segment u(n, m);
  for (int i = 0; i < n; ++i) u.head()(i) = head[static_cast<std::size_t>(i)];
  for (int j = 0; j <= m; ++j) {
    for (int i = 0; i < n; ++i) {
      u.node(j)(i) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i) + 1];
    }
  }
  return u;
}

}  // namespace floquet_sep
