#pragma once

// CSV dialect: UTF-8, comma separated, header row required, '.' decimal
// point, optional double-quoted fields. Numbers are written in the shortest
// form that parses back to the identical double.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tailclust/tail_core.hpp"

namespace tailclust {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Throws ParseError with 1-based file row (the header is row 1) on ragged rows
/// or unterminated quotes.
CsvTable read_csv(std::istream& in);

std::string format_double(double value);

/// Whole-field decimal parse; false on anything else (including "inf"/"nan").
bool parse_double(std::string_view text, double& out);

/// All-numeric table, header = column labels.
DataMatrix read_data_csv(std::istream& in);
void write_data_csv(std::ostream& out, const DataMatrix& data);

}  // namespace tailclust
