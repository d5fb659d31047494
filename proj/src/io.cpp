#include "sara/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string_view>
#include <utility>

#include "sara/error.hpp"

namespace sara {

namespace {

std::string line_tag(std::size_t line) { return "line " + std::to_string(line); }

std::vector<std::string_view> split_tabs(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = s.find('\t', start);
    out.push_back(s.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

bool is_missing_token(std::string_view tok) {
  std::string lower(tok);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (!lower.empty() && (lower[0] == '+' || lower[0] == '-')) lower.erase(0, 1);
  return lower.empty() || lower == "na" || lower == "nan" || lower == "inf" ||
         lower == "infinity" || lower == "null";
}

struct Row {
  std::int64_t position;
  double value;
  std::size_t line;
};

}  // namespace

std::vector<Series<double>> ingest(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::ParseError, "line 1: missing header");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "label\tposition\tvalue") {
    throw Error(ErrorKind::ParseError,
                "line 1: expected header 'label<TAB>position<TAB>value'");
  }

  std::map<std::string, std::vector<Row>> groups;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw Error(ErrorKind::ParseError,
                  line_tag(line_no) + ": expected 3 tab-separated fields");
    }
    Row row{0, 0.0, line_no};
    const auto pos = fields[1];
    auto [pend, perr] = std::from_chars(pos.data(), pos.data() + pos.size(), row.position);
    if (perr != std::errc() || pend != pos.data() + pos.size()) {
      throw Error(ErrorKind::ParseError, line_tag(line_no) + ": bad position '" +
                                             std::string(pos) + "'");
    }
    const auto val = fields[2];
    auto [vend, verr] = std::from_chars(val.data(), val.data() + val.size(), row.value);
    const bool parsed = verr == std::errc() && vend == val.data() + val.size();
    if (!parsed || !std::isfinite(row.value)) {
      if (parsed || is_missing_token(val)) {
        throw Error(ErrorKind::NonFiniteValue, line_tag(line_no) +
                                                   ": non-finite value '" +
                                                   std::string(val) + "'");
      }
      throw Error(ErrorKind::ParseError,
                  line_tag(line_no) + ": bad value '" + std::string(val) + "'");
    }
    groups[std::string(fields[0])].push_back(row);
  }

  std::vector<Series<double>> out;
  for (auto& [label, rows] : groups) {
    if (rows.size() < 2) {
      throw Error(ErrorKind::EmptyGroup,
                  "label '" + label + "' has fewer than 2 observations");
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.position < b.position; });
    VectorX<double> values(static_cast<Index>(rows.size()));
    std::vector<std::int64_t> positions(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].position == rows[i - 1].position) {
        throw Error(ErrorKind::ParseError, line_tag(rows[i].line) +
                                               ": duplicate position for label '" +
                                               label + "'");
      }
      values(static_cast<Index>(i)) = rows[i].value;
      positions[i] = rows[i].position;
    }
    out.emplace_back(std::move(values), std::move(positions), label);
  }
  return out;
}

std::vector<Series<double>> ingest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  return ingest(in);
}

void write_series_tsv(std::ostream& os, const std::vector<Series<double>>& series) {
  const auto old = os.precision(17);
  os << "label\tposition\tvalue\n";
  for (const auto& s : series) {
    for (Index i = 0; i < s.size(); ++i) {
      const std::int64_t pos =
          s.has_positions() ? s.positions()[static_cast<std::size_t>(i)] : i + 1;
      os << s.label() << '\t' << pos << '\t' << s.values()(i) << '\n';
    }
  }
  os.precision(old);
}

}  // namespace sara
