#include "mcvrr/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>

#include "mcvrr/errors.hpp"

namespace mcvrr {

static std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double parse_csv_double(const std::string& token, long line) {
  if (token.empty()) throw parse_error(line, "empty numeric field");
  char* end = nullptr;
  double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size())
    throw parse_error(line, "bad numeric field '" + token + "'");
  return v;
}

long parse_csv_long(const std::string& token, long line) {
  if (token.empty()) throw parse_error(line, "empty integer field");
  char* end = nullptr;
  long v = std::strtol(token.c_str(), &end, 10);
  if (end != token.c_str() + token.size())
    throw parse_error(line, "bad integer field '" + token + "'");
  return v;
}

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (table.header.empty()) {
      table.header = split_csv_line(line);
      continue;
    }
    std::vector<std::string> tokens = split_csv_line(line);
    if (tokens.size() != table.header.size())
      throw parse_error(line_no, "expected " + std::to_string(table.header.size()) +
                                     " fields, got " + std::to_string(tokens.size()));
    std::vector<double> row(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i)
      row[i] = parse_csv_double(tokens[i], line_no);
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  if (table.header.empty()) throw parse_error(1, "empty input, expected a header line");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(0, "cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace mcvrr
