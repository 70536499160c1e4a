#pragma once

#include <iosfwd>
#include <string>

#include "floquet_sep/segment.hpp"

namespace floquet_sep {

/// Formats a double with 17 significant digits in the classic locale.
std::string format_double(double x);

/// CSV with a `# head,h_1,...,h_N` line, a `s,z_1,...,z_N` header, and one
/// row per grid node.
void write_segment_csv(std::ostream& os, const Segment& u);
Segment read_segment_csv(std::istream& is);

}  // namespace floquet_sep
