#include "nvcycle/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "nvcycle/errors.hpp"

namespace nvcycle::csv {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const std::string& source, std::size_t line_no,
                       const std::string& what) {
  throw ParseError(source + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double(const std::string& field, const std::string& source,
                    std::size_t line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    fail(source, line_no, "cannot parse number '" + field + "'");
  return value;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw NumericError("to_chars failed");
  return std::string(buf, ptr);
}

const std::string& Table::meta_value(const std::string& key) const {
  static const std::string empty;
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return empty;
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ParseError("missing column '" + name + "'");
}

Table read_table(std::istream& in, const std::string& source_name) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const std::string body = trim(text.substr(1));
      std::size_t eq = body.find('=');
      if (eq != std::string::npos) {
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (key == "schema")
          table.schema = value;
        else
          table.meta.emplace_back(std::move(key), std::move(value));
      }
      continue;
    }
    if (!have_header) {
      table.header = split_fields(text);
      have_header = true;
      continue;
    }
    std::vector<std::string> fields = split_fields(text);
    if (fields.size() != table.header.size())
      fail(source_name, line_no,
           "expected " + std::to_string(table.header.size()) + " fields, got " +
               std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& field : fields)
      row.push_back(parse_double(field, source_name, line_no));
    table.rows.push_back(std::move(row));
  }
  if (!have_header) fail(source_name, line_no, "no header row found");
  return table;
}

Table read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_table(in, path);
}

void write_table(std::ostream& out, const Table& table) {
  if (!table.schema.empty()) out << "# schema=" << table.schema << "\n";
  for (const auto& [key, value] : table.meta)
    out << "# " << key << "=" << value << "\n";
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

void write_table_file(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  write_table(out, table);
  if (!out) throw ParseError("write failed for '" + path + "'");
}

}  // namespace nvcycle::csv
