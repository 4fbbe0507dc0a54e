#ifndef NWISE_CLI_HPP
#define NWISE_CLI_HPP

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nwise::cli {

enum class OutputFormat { text, json, csv };

enum class RowKind { makarov_lower, sharp_lower, exact, sharp_upper, makarov_upper };

const char* row_name(RowKind kind);

/// Uniform-marginal comparison table: one block of rows per marginal level,
/// one column per k.
struct TableSpec {
  std::size_t n = 8;
  std::vector<std::string> levels;  // decimal strings, e.g. "0.1"
  long k_min = 1;
  long k_max = 4;
  std::vector<RowKind> rows{RowKind::makarov_lower, RowKind::sharp_lower, RowKind::exact,
                            RowKind::sharp_upper, RowKind::makarov_upper};
  /// Published cells for the preset, indexed [level][row][k - k_min]; empty
  /// for custom tables.
  std::vector<std::array<std::vector<std::string>, 5>> published;
};

/// "paper-table-1" (k = 1..4) or "paper-table-2" (k = 5..8); nullopt when unknown.
std::optional<TableSpec> table_preset(const std::string& name);

struct RenderedTable {
  TableSpec spec;
  /// cells[level][row][k - k_min], formatted numbers.
  std::vector<std::vector<std::vector<std::string>>> cells;
  /// Makarov cells whose printed-formula value differs from the published one.
  std::vector<std::string> notes;
};

RenderedTable compute_table(const TableSpec& spec, bool rational, int precision);

void write_table(const RenderedTable& table, OutputFormat format, std::ostream& out);

/// Entry point behind the `nwise` executable. Returns the process exit code:
/// 0 success, 2 usage or validation error, 1 internal error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nwise::cli

#endif  // NWISE_CLI_HPP
