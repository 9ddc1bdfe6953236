#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcvrr {

// Comma splitting with surrounding-whitespace trim; no quoting, the formats
// here are purely numeric.
std::vector<std::string> split_csv_line(const std::string& line);

// Strict full-token numeric parses; throw parse_error tagged with `line`.
double parse_csv_double(const std::string& token, long line);
long parse_csv_long(const std::string& token, long line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<long> line_numbers;  // source line of each row
  int column(const std::string& name) const;  // -1 if absent
};

// Header line plus numeric rows; blank lines are skipped, ragged rows throw.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

}  // namespace mcvrr
