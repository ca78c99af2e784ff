#include "tailclust/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "tailclust/error.hpp"

namespace tailclust {

namespace {

// Splits one logical record; `line_no` is advanced for embedded newlines.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  const std::size_t start_line = line_no;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  for (;;) {
    if (i == line.size()) {
      if (quoted) {
        std::string more;
        if (!std::getline(in, more)) throw ParseError("unterminated quoted field", start_line);
        ++line_no;
        field.push_back('\n');
        line = std::move(more);
        i = 0;
        continue;
      }
      break;
    }
    const char c = line[i++];
    if (quoted) {
      if (c == '"') {
        if (i < line.size() && line[i] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r' && i == line.size()) {
      // CRLF line ending
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return true;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::size_t line_no = 0;
  std::vector<std::string> fields;
  if (!read_record(in, fields, line_no)) throw ParseError("CSV input is empty; a header row is required", 1);
  if (!fields.empty() && fields[0].starts_with("\xEF\xBB\xBF")) fields[0].erase(0, 3);
  for (auto& f : fields) f = trim(std::move(f));
  table.header = fields;
  while (read_record(in, fields, line_no)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
    if (fields.size() != table.header.size()) {
      throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (auto& f : fields) f = trim(std::move(f));
    table.rows.push_back(fields);
  }
  return table;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size() && std::isfinite(out);
}

DataMatrix read_data_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const std::size_t p = table.header.size();
  const std::size_t n = table.rows.size();
  for (std::size_t j = 0; j < p; ++j) {
    if (table.header[j].empty()) throw ParseError("empty column label", 1, j + 1);
  }
  if (n < 2) throw ParseError("need at least 2 data rows, found " + std::to_string(n));
  std::vector<double> values(n * p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double v = 0.0;
      if (!parse_double(table.rows[i][j], v)) {
        throw ParseError("not a finite number: '" + table.rows[i][j] + "'", i + 2, j + 1);
      }
      values[j * n + i] = v;
    }
  }
  try {
    return DataMatrix(n, p, std::move(values), table.header);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 1);
  }
}

void write_data_csv(std::ostream& out, const DataMatrix& data) {
  const auto labels = data.all_labels();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (j) out << ',';
    const bool quote = labels[j].find_first_of(",\"\n") != std::string::npos;
    if (quote) {
      out << '"';
      for (char c : labels[j]) out << (c == '"' ? "\"\"" : std::string(1, c));
      out << '"';
    } else {
      out << labels[j];
    }
  }
  out << '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      if (j) out << ',';
      out << format_double(data(i, j));
    }
    out << '\n';
  }
}

}  // namespace tailclust
