#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ltn {

enum class ColumnKind { Numeric, Categorical, Label };

std::string to_string(ColumnKind k);
ColumnKind column_kind_from_string(const std::string& s);

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  friend bool operator==(const Column&, const Column&) = default;
};

struct Schema {
  std::vector<Column> columns;

  std::size_t size() const { return columns.size(); }
  std::optional<std::size_t> find(const std::string& name) const;
  /// Throws DataError if the column does not exist.
  std::size_t index_of(const std::string& name) const;

  /// One "name,kind" pair per line; "#" comments and blank lines ignored.
  static Schema load(const std::filesystem::path& path);
  static Schema parse(const std::string& text);
  std::string to_text() const;
  friend bool operator==(const Schema&, const Schema&) = default;
};

/// Missing (monostate), a number, or a string.
using Cell = std::variant<std::monostate, double, std::string>;

bool is_missing(const Cell& c);
std::string cell_to_string(const Cell& c);

struct DatasetTable {
  Schema schema;
  std::vector<std::vector<Cell>> rows;

  std::size_t size() const { return rows.size(); }
  /// Adds a row after checking its arity.
  void append(std::vector<Cell> row);
  std::vector<Cell> column(const std::string& name) const;
  friend bool operator==(const DatasetTable&, const DatasetTable&) = default;
};

struct LoadOptions {
  char delimiter = ',';
  /// If unset, the first line is a header when its fields are exactly the
  /// schema's column names (in any order).
  std::optional<bool> header;
};

/// Numeric cells that do not parse become missing; "inf", "-inf" and
/// "nan" parse to the corresponding values (and are dropped by clean).
/// Label strings lose trailing dots. A header may order columns
/// differently from the schema.
DatasetTable load_table(const std::filesystem::path& path, const Schema& schema, const LoadOptions& options = {});
DatasetTable parse_table(const std::string& text, const Schema& schema, const LoadOptions& options = {},
                         const std::string& source = "<input>");

/// Header line plus rows; numbers printed with 17 significant digits.
void write_table(const DatasetTable& table, const std::filesystem::path& path);

/// Removes exact duplicate rows (first occurrence kept) and rows with a
/// missing or non-finite cell. Order is otherwise preserved.
DatasetTable clean(const DatasetTable& table);

}  // namespace ltn
