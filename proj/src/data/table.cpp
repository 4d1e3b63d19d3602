#include "ltn/data/table.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "ltn/error.hpp"

namespace ltn {

namespace {

std::string trim(std::string_view s) {
  auto b = s.begin();
  auto e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return std::string(b, e);
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

std::string strip_dots(std::string s) {
  while (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Key for duplicate detection: kind tag plus exact bits or text.
std::string row_key(const std::vector<Cell>& row) {
  std::string key;
  for (const auto& c : row) {
    if (std::holds_alternative<double>(c)) {
      const auto bits = std::bit_cast<std::uint64_t>(std::get<double>(c));
      key += 'd';
      key.append(reinterpret_cast<const char*>(&bits), sizeof bits);
    } else if (std::holds_alternative<std::string>(c)) {
      const auto& s = std::get<std::string>(c);
      key += 's' + std::to_string(s.size()) + ':' + s;
    } else {
      key += 'm';
    }
  }
  return key;
}

}  // namespace

std::string to_string(ColumnKind k) {
  switch (k) {
    case ColumnKind::Numeric: return "numeric";
    case ColumnKind::Categorical: return "categorical";
    case ColumnKind::Label: return "label";
  }
  return "?";
}

ColumnKind column_kind_from_string(const std::string& s) {
  if (s == "numeric") return ColumnKind::Numeric;
  if (s == "categorical") return ColumnKind::Categorical;
  if (s == "label") return ColumnKind::Label;
  throw DataError("unknown column kind '" + s + "' (expected numeric, categorical or label)");
}

std::optional<std::size_t> Schema::find(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::index_of(const std::string& name) const {
  if (auto i = find(name)) return *i;
  throw DataError("no column named '" + name + "'");
}

Schema Schema::parse(const std::string& text) {
  Schema schema;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, ',');
    if (fields.size() != 2 || fields[0].empty()) {
      throw DataError("schema line " + std::to_string(line_no) + ": expected 'name,kind'");
    }
    if (schema.find(fields[0])) throw DataError("schema line " + std::to_string(line_no) + ": duplicate column");
    schema.columns.push_back({fields[0], column_kind_from_string(fields[1])});
  }
  if (schema.columns.empty()) throw DataError("schema has no columns");
  return schema;
}

Schema Schema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read schema " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Schema::to_text() const {
  std::string out;
  for (const auto& c : columns) out += quote_if_needed(c.name) + "," + to_string(c.kind) + "\n";
  return out;
}

bool is_missing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }

std::string cell_to_string(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(c));
    return buf;
  }
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return "";
}

void DatasetTable::append(std::vector<Cell> row) {
  if (row.size() != schema.size()) {
    throw DataError("row " + std::to_string(rows.size() + 1) + " has " + std::to_string(row.size()) +
                    " fields, expected " + std::to_string(schema.size()));
  }
  rows.push_back(std::move(row));
}

std::vector<Cell> DatasetTable::column(const std::string& name) const {
  const auto c = schema.index_of(name);
  std::vector<Cell> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

DatasetTable parse_table(const std::string& text, const Schema& schema, const LoadOptions& options,
                         const std::string& source) {
  DatasetTable table;
  table.schema = schema;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::size_t> order(schema.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_fields(line, options.delimiter);
    if (first) {
      first = false;
      std::set<std::string> names(fields.begin(), fields.end());
      bool is_header = names.size() == schema.size() && fields.size() == schema.size() &&
                       std::all_of(fields.begin(), fields.end(), [&](const auto& f) { return schema.find(f); });
      if (options.header && *options.header && !is_header) {
        throw DataError(source + ": header does not match the schema columns");
      }
      if (options.header && !*options.header) is_header = false;
      if (is_header) {
        // order[i] = file position of schema column i
        for (std::size_t pos = 0; pos < fields.size(); ++pos) order[schema.index_of(fields[pos])] = pos;
        continue;
      }
    }
    if (fields.size() != schema.size()) {
      throw DataError(source + ": row at line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(schema.size()));
    }
    std::vector<Cell> row(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const std::string& f = fields[order[c]];
      switch (schema.columns[c].kind) {
        case ColumnKind::Numeric:
          if (auto v = parse_number(f)) row[c] = *v;
          break;
        case ColumnKind::Categorical:
          if (!f.empty()) row[c] = f;
          break;
        case ColumnKind::Label:
          if (auto s = strip_dots(f); !s.empty()) row[c] = std::move(s);
          break;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

DatasetTable load_table(const std::filesystem::path& path, const Schema& schema, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read data file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_table(ss.str(), schema, options, path.string());
}

void write_table(const DatasetTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t c = 0; c < table.schema.size(); ++c) {
    out << (c ? "," : "") << quote_if_needed(table.schema.columns[c].name);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << quote_if_needed(cell_to_string(row[c]));
    out << '\n';
  }
}

DatasetTable clean(const DatasetTable& table) {
  DatasetTable out;
  out.schema = table.schema;
  std::set<std::string> seen;
  for (const auto& row : table.rows) {
    const bool bad = std::any_of(row.begin(), row.end(), [](const Cell& c) {
      return is_missing(c) || (std::holds_alternative<double>(c) && !std::isfinite(std::get<double>(c)));
    });
    if (bad) continue;
    if (!seen.insert(row_key(row)).second) continue;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace ltn
