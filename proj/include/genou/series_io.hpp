#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "genou/genou_sim.hpp"

namespace genou {

/// Shortest round-trip decimal form of x ("%.17g").
std::string format_double(double x);

/// Writes `# key: value` provenance lines followed by a `k,V,H,I` table.
/// Row k = 0 carries V_0 with empty H and I.
void write_series_csv(std::ostream& out, const SkeletonSeries& s);

/// Reads either the k,V,H,I layout above or a single numeric column (with or
/// without a header). A single column is returned as V with empty H and I.
SkeletonSeries read_series_csv(std::istream& in);

/// Writes `content` to `path` via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace genou
