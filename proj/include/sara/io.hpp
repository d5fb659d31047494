#pragma once

#include <istream>
#include <string>
#include <vector>

#include "sara/series.hpp"

namespace sara {

/// Reads `label<TAB>position<TAB>value` rows (header required) into one
/// Series per label, sorted by position. Returned series are label-sorted.
/// Errors carry the 1-based line number of the offending row.
std::vector<Series<double>> ingest(std::istream& in);
std::vector<Series<double>> ingest_file(const std::string& path);

/// Inverse of ingest for a single series; indices stand in for missing
/// positions.
void write_series_tsv(std::ostream& os, const std::vector<Series<double>>& series);

}  // namespace sara
