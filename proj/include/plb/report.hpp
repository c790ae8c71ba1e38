#pragma once

#include <string>
#include <vector>

#include "plb/stats.hpp"

namespace plb {

enum class TableKind { AbsoluteMicro, RelativeMicro, AbsoluteLarger, RelativeLarger, NoConversion };
enum class TableFormat { Plain, Latex };

struct Cell {
  enum class Kind { Missing, Absolute, Ratio, NotAvailable };
  Kind kind = Kind::Missing;
  Summary abs;
  RatioCell rat;

  static Cell absolute(Summary s) { return {Kind::Absolute, s, {}}; }
  static Cell of_ratio(RatioCell r) { return {Kind::Ratio, {}, r}; }
  static Cell not_available() { return {Kind::NotAvailable, {}, {}}; }
};

struct ReportRow {
  std::string benchmark;
  std::vector<Cell> cells;
};

/// Rows measured under one configuration (one "VM" block of a table).
struct ReportGroup {
  std::string label;
  std::vector<ReportRow> rows;
};

struct ReportTable {
  TableKind kind = TableKind::AbsoluteMicro;
  std::vector<ReportGroup> groups;
};

/// Number of measurement columns for a table kind.
std::size_t column_count(TableKind kind);
/// Plain-text column titles.
std::vector<std::string> column_titles(TableKind kind);
std::string table_title(TableKind kind);

/// Throws std::invalid_argument for an empty table or a row whose cells
/// don't match the kind's columns (use Cell::not_available for gaps).
std::string emit_table(const ReportTable& table, TableFormat format);

}  // namespace plb
