#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

// Minimal CSV layer shared by all file formats: a header row, numeric data
// rows, and `# key=value` comment lines. Every file we write starts with a
// `# schema=<name>/v1` comment so downstream tooling can dispatch on it.
// Doubles are rendered with std::to_chars (shortest round-trip), which keeps
// outputs byte-identical across runs and platforms.

namespace nvcycle::csv {

// Shortest decimal string that parses back to exactly x.
std::string format_double(double x);

struct Table {
  std::string schema;                                       // "<name>/v1"
  std::vector<std::pair<std::string, std::string>> meta;    // extra # key=value lines
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Empty string when the key is absent.
  const std::string& meta_value(const std::string& key) const;
  std::size_t column(const std::string& name) const;  // throws ParseError if missing
};

// Throws ParseError with "<source>:<line>" context on malformed input.
Table read_table(std::istream& in, const std::string& source_name);
Table read_table_file(const std::string& path);

void write_table(std::ostream& out, const Table& table);
void write_table_file(const std::string& path, const Table& table);

}  // namespace nvcycle::csv
