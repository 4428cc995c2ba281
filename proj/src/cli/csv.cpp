#include <fstream>
#include <sstream>

#include "zinfer/cli.hpp"

namespace zinfer::cli {

namespace {

std::string trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Comma-separated fields; a field may be wrapped in double quotes, with ""
// as an escaped quote inside.
std::vector<std::string> split_line(const std::string& line)
{
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      }
      else if (c == '"') {
        quoted = false;
      }
      else {
        cur += c;
      }
    }
    else if (c == '"') {
      quoted = true;
    }
    else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    }
    else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const
{
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name)
      return j;
  throw InputError("column '" + name + "' not found in the data header");
}

CsvTable read_csv(std::istream& in, const std::string& source)
{
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
      line.erase(0, 3);
    if (trim(line).empty())
      continue;
    std::vector<std::string> fields = split_line(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size())
      throw InputError(source + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(table.header.size()) + " fields, found " + std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty())
    throw InputError(source + ": no header row");
  return table;
}

CsvTable read_csv_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open data file '" + path + "'");
  return read_csv(in, path);
}

}  // namespace zinfer::cli
