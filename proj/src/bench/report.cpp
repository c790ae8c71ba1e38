#include "plb/report.hpp"

#include <algorithm>
#include <stdexcept>

namespace plb {

namespace {

const char* kHost = "\\emph{Host}";
const char* kProlog = "\\emph{Prolog}";

std::string frac(const std::string& den) {
  return "$\\frac{\\mbox{\\emph{Host}}\\rightarrow\\mbox{\\emph{Prolog}}}{" + den + "}$";
}

std::vector<std::string> latex_headers(TableKind kind) {
  std::string cross = std::string(kHost) + " $\\rightarrow$ " + kProlog;
  switch (kind) {
    case TableKind::AbsoluteMicro: return {kHost, kProlog, cross};
    case TableKind::RelativeMicro:
      return {frac("\\mbox{\\emph{Host}}"), frac("\\mbox{\\emph{Prolog}}"), frac("\\mbox{Reference}")};
    case TableKind::AbsoluteLarger: return {kProlog, cross};
    case TableKind::RelativeLarger: return {frac("\\mbox{\\emph{Prolog}}"), frac("\\mbox{Reference}")};
    case TableKind::NoConversion:
      return {std::string(kHost) + " $\\overset{nc}{\\rightarrow}$ " + kProlog,
              frac("\\mbox{\\emph{Host}}\\overset{nc}{\\rightarrow}\\mbox{\\emph{Prolog}}")};
  }
  return {};
}

std::string plain_cell(const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::Absolute: return format_absolute(c.abs);
    case Cell::Kind::Ratio: return format_ratio(c.rat);
    case Cell::Kind::NotAvailable: return kNotAvailable;
    case Cell::Kind::Missing: break;
  }
  throw std::invalid_argument("missing cell");
}

std::string latex_cell(const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::Absolute: return latex_absolute(c.abs);
    case Cell::Kind::Ratio: return latex_ratio(c.rat);
    case Cell::Kind::NotAvailable: return kLatexNotAvailable;
    case Cell::Kind::Missing: break;
  }
  throw std::invalid_argument("missing cell");
}

void validate(const ReportTable& t) {
  std::size_t rows = 0;
  for (const auto& g : t.groups) {
    for (const auto& r : g.rows) {
      ++rows;
      if (r.cells.size() != column_count(t.kind)) {
        throw std::invalid_argument("row " + r.benchmark + " has " + std::to_string(r.cells.size()) +
                                    " cells, table needs " + std::to_string(column_count(t.kind)));
      }
      for (const auto& c : r.cells) {
        if (c.kind == Cell::Kind::Missing) {
          throw std::invalid_argument("row " + r.benchmark + " has a missing cell");
        }
      }
    }
  }
  if (rows == 0) throw std::invalid_argument("empty table");
}

// Display width in code points; the cells contain "±" and "×".
std::size_t width(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string pad(const std::string& s, std::size_t w, bool right) {
  std::string fill(w > width(s) ? w - width(s) : 0, ' ');
  return right ? fill + s : s + fill;
}

std::string emit_plain(const ReportTable& t) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> head{"VM", "Benchmark"};
  for (auto& c : column_titles(t.kind)) head.push_back(c);
  lines.push_back(head);
  std::vector<std::size_t> group_starts;
  for (const auto& g : t.groups) {
    group_starts.push_back(lines.size());
    bool first = true;
    for (const auto& r : g.rows) {
      std::vector<std::string> line{first ? g.label : "", r.benchmark};
      for (const auto& c : r.cells) line.push_back(plain_cell(c));
      lines.push_back(line);
      first = false;
    }
  }
  std::vector<std::size_t> w(head.size(), 0);
  for (const auto& l : lines) {
    for (std::size_t i = 0; i < l.size(); ++i) w[i] = std::max(w[i], width(l[i]));
  }
  std::size_t total = 0;
  for (auto x : w) total += x;
  total += 2 * (w.size() - 1);
  std::string rule(total, '-');

  std::string out = table_title(t.kind) + "\n";
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (std::find(group_starts.begin(), group_starts.end(), li) != group_starts.end()) out += rule + "\n";
    std::string row;
    for (std::size_t i = 0; i < lines[li].size(); ++i) {
      if (i > 0) row += "  ";
      row += pad(lines[li][i], w[i], i >= 2 && li > 0);
    }
    while (!row.empty() && row.back() == ' ') row.pop_back();
    out += row + "\n";
  }
  return out;
}

std::string emit_latex(const ReportTable& t) {
  std::size_t n = column_count(t.kind);
  std::string spec = "ll";
  for (std::size_t i = 0; i < n; ++i) spec += "rl";
  std::string out = "\\begin{tabular}{" + spec + "}\n\\toprule\n\\multicolumn{1}{c}{VM}&Benchmark\n";
  for (const auto& h : latex_headers(t.kind)) out += "& \\multicolumn{2}{c}{" + h + "}\n";
  out += "\\\\\n";
  for (const auto& g : t.groups) {
    if (g.rows.empty()) continue;
    out += "\\midrule\n";
    bool first = true;
    for (const auto& r : g.rows) {
      if (first) {
        out += "\\multirow{" + std::to_string(g.rows.size()) + "}{*}{" + g.label + "} & " + r.benchmark + "\n";
      } else {
        out += " & " + r.benchmark + "\n";
      }
      for (const auto& c : r.cells) out += "& " + latex_cell(c) + "\n";
      out += "\\\\\n";
      first = false;
    }
  }
  out += "\\bottomrule\n\\end{tabular}\n";
  return out;
}

}  // namespace

std::size_t column_count(TableKind kind) {
  switch (kind) {
    case TableKind::AbsoluteMicro:
    case TableKind::RelativeMicro: return 3;
    case TableKind::AbsoluteLarger:
    case TableKind::RelativeLarger:
    case TableKind::NoConversion: return 2;
  }
  return 0;
}

std::vector<std::string> column_titles(TableKind kind) {
  switch (kind) {
    case TableKind::AbsoluteMicro: return {"Host", "Prolog", "Host -> Prolog"};
    case TableKind::RelativeMicro: return {"cross / Host", "cross / Prolog", "cross / Reference"};
    case TableKind::AbsoluteLarger: return {"Prolog", "Host -> Prolog"};
    case TableKind::RelativeLarger: return {"cross / Prolog", "cross / Reference"};
    case TableKind::NoConversion: return {"Host -nc-> Prolog", "cross / nc"};
  }
  return {};
}

std::string table_title(TableKind kind) {
  switch (kind) {
    case TableKind::AbsoluteMicro: return "Absolute Times Micro";
    case TableKind::RelativeMicro: return "Relative Times Micro";
    case TableKind::AbsoluteLarger: return "Absolute Times Larger";
    case TableKind::RelativeLarger: return "Relative Times Larger";
    case TableKind::NoConversion: return "Absolute and Relative Times no Conversion";
  }
  return {};
}

std::string emit_table(const ReportTable& table, TableFormat format) {
  validate(table);
  return format == TableFormat::Plain ? emit_plain(table) : emit_latex(table);
}

}  // namespace plb
