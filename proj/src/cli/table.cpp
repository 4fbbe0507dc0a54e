#include <ostream>
#include <sstream>

#include "json.hpp"
#include "nwise/bounds.hpp"
#include "nwise/cli.hpp"
#include "nwise/format.hpp"
#include "nwise/marginals.hpp"

namespace nwise::cli {
namespace {

using Cells = std::vector<std::string>;

// Published Makarov rows (first and fifth row of each level), k = 1..4 and
// k = 5..8, levels 0.1..0.5. The sharp and exact rows are always computed.
struct PublishedLevel {
  Cells makarov_lower;
  Cells makarov_upper;
};

const PublishedLevel kTable1[] = {
    {{"4.6953e-01", "8.6895e-02", "5.0243e-03", "4.3165e-04"},
     {"1.0000e+00", "5.6953e-01", "1.8690e-01", "3.8092e-02"}},
    {{"6.3223e-01", "2.9668e-01", "5.6282e-02", "1.0406e-02"},
     {"1.0000e+00", "8.3223e-01", "4.9668e-01", "2.0308e-01"}},
    {{"7.4470e-01", "4.4823e-01", "1.9410e-01", "5.7968e-02"},
     {"1.0000e+00", "9.4235e-01", "7.4470e-01", "4.4823e-01"}},
    {{"8.9362e-01", "6.8461e-01", "4.0591e-01", "1.7367e-01"},
     {"1.0000e+00", "9.8320e-01", "8.9362e-01", "6.8461e-01"}},
    {{"9.6484e-01", "8.5547e-01", "6.3672e-01", "3.6328e-01"},
     {"1.0000e+00", "9.9610e-01", "9.6484e-01", "8.5547e-01"}},
};

const PublishedLevel kTable2[] = {
    {{"2.3410e-05", "7.3000e-07", "9.9999e-09", "0.0000e+00"},
     {"5.0244e-03", "4.3165e-04", "2.3410e-05", "7.3000e-07"}},
    {{"1.2314e-03", "8.4480e-05", "2.5600e-06", "0.0000e+00"},
     {"5.6282e-02", "1.0406e-02", "1.2314e-03", "8.4480e-05"}},
    {{"1.1292e-02", "1.2903e-03", "6.5610e-05", "0.0000e+00"},
     {"1.9410e-01", "5.7968e-02", "1.1292e-02", "1.2903e-03"}},
    {{"4.9807e-02", "8.5200e-03", "6.5536e-04", "0.0000e+00"},
     {"4.0591e-01", "1.7367e-01", "4.9807e-02", "8.5197e-03"}},
    {{"1.4453e-01", "3.5156e-02", "3.9063e-03", "0.0000e+00"},
     {"6.3672e-01", "3.6328e-01", "1.4453e-01", "3.5156e-02"}},
};

std::size_t row_index(RowKind kind) { return static_cast<std::size_t>(kind); }

template <Scalar Real>
std::string cell(RowKind kind, const BasicMarginalProfile<Real>& profile, long k, int precision) {
  switch (kind) {
    case RowKind::makarov_lower:
      return format_scientific(makarov_bounds(profile, k).lower, precision);
    case RowKind::makarov_upper:
      return format_scientific(makarov_bounds(profile, k).upper, precision);
    case RowKind::sharp_lower:
      return format_scientific(sharp_bounds(profile, k).sharp_lower, precision);
    case RowKind::exact:
      return format_scientific(sharp_bounds(profile, k).exact_mutual, precision);
    case RowKind::sharp_upper:
      return format_scientific(sharp_bounds(profile, k).sharp_upper, precision);
  }
  return {};
}

template <Scalar Real>
std::vector<std::vector<std::string>> level_cells(const TableSpec& spec,
                                                  const BasicMarginalProfile<Real>& profile,
                                                  int precision) {
  std::vector<std::vector<std::string>> rows;
  for (RowKind kind : spec.rows) {
    std::vector<std::string> row;
    for (long k = spec.k_min; k <= spec.k_max; ++k) row.push_back(cell(kind, profile, k, precision));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

const char* row_name(RowKind kind) {
  switch (kind) {
    case RowKind::makarov_lower: return "makarov_lower";
    case RowKind::sharp_lower: return "sharp_lower";
    case RowKind::exact: return "exact";
    case RowKind::sharp_upper: return "sharp_upper";
    case RowKind::makarov_upper: return "makarov_upper";
  }
  return "?";
}

std::optional<TableSpec> table_preset(const std::string& name) {
  const PublishedLevel* published = nullptr;
  TableSpec spec;
  spec.n = 8;
  spec.levels = {"0.1", "0.2", "0.3", "0.4", "0.5"};
  if (name == "paper-table-1") {
    spec.k_min = 1;
    spec.k_max = 4;
    published = kTable1;
  } else if (name == "paper-table-2") {
    spec.k_min = 5;
    spec.k_max = 8;
    published = kTable2;
  } else {
    return std::nullopt;
  }
  for (std::size_t level = 0; level < spec.levels.size(); ++level) {
    std::array<Cells, 5> rows;
    rows[row_index(RowKind::makarov_lower)] = published[level].makarov_lower;
    rows[row_index(RowKind::makarov_upper)] = published[level].makarov_upper;
    spec.published.push_back(std::move(rows));
  }
  return spec;
}

RenderedTable compute_table(const TableSpec& spec, bool rational, int precision) {
  if (spec.k_min > spec.k_max) throw ValidationError("empty k range");
  if (spec.k_min < 0 || spec.k_max > static_cast<long>(spec.n)) {
    throw ValidationError("k range must lie within [0, n]");
  }
  RenderedTable table;
  table.spec = spec;
  for (std::size_t level = 0; level < spec.levels.size(); ++level) {
    const std::vector<double> raw = parse_marginal_list(spec.levels[level]);
    if (raw.size() != 1) throw ValidationError("each table level is a single probability");
    const MarginalProfile profile =
        MarginalProfile::from_raw(std::vector<double>(spec.n, raw.front()));
    table.cells.push_back(rational ? level_cells(spec, to_exact(profile), precision)
                                   : level_cells(spec, profile, precision));

    if (level >= spec.published.size()) continue;
    for (std::size_t r = 0; r < spec.rows.size(); ++r) {
      const Cells& reference = spec.published[level][row_index(spec.rows[r])];
      for (std::size_t c = 0; c < reference.size() && c < table.cells[level][r].size(); ++c) {
        if (reference[c] != table.cells[level][r][c]) {
          std::ostringstream note;
          note << "a=" << spec.levels[level] << " " << row_name(spec.rows[r])
               << " k=" << spec.k_min + static_cast<long>(c) << ": printed formula gives "
               << table.cells[level][r][c] << ", published cell " << reference[c];
          table.notes.push_back(note.str());
        }
      }
    }
  }
  return table;
}

void write_table(const RenderedTable& table, OutputFormat format, std::ostream& out) {
  const TableSpec& spec = table.spec;
  if (format == OutputFormat::json) {
    nlohmann::json doc;
    doc["n"] = spec.n;
    doc["k"] = nlohmann::json::array();
    for (long k = spec.k_min; k <= spec.k_max; ++k) doc["k"].push_back(k);
    doc["levels"] = nlohmann::json::array();
    for (std::size_t level = 0; level < spec.levels.size(); ++level) {
      nlohmann::json rows;
      for (std::size_t r = 0; r < spec.rows.size(); ++r) {
        rows[row_name(spec.rows[r])] = table.cells[level][r];
      }
      doc["levels"].push_back({{"a", spec.levels[level]}, {"rows", rows}});
    }
    doc["notes"] = table.notes;
    out << doc.dump(2) << '\n';
    return;
  }

  const bool csv = format == OutputFormat::csv;
  if (csv) {
    out << "a,row";
    for (long k = spec.k_min; k <= spec.k_max; ++k) out << ",k=" << k;
    out << '\n';
  } else {
    out << "n = " << spec.n << ", k = " << spec.k_min << ".." << spec.k_max << '\n';
    out << "a    row           ";
    for (long k = spec.k_min; k <= spec.k_max; ++k) {
      std::string head = "k=" + std::to_string(k);
      head.resize(12, ' ');
      out << ' ' << head;
    }
    out << '\n';
  }
  for (std::size_t level = 0; level < spec.levels.size(); ++level) {
    for (std::size_t r = 0; r < spec.rows.size(); ++r) {
      if (csv) {
        out << spec.levels[level] << ',' << row_name(spec.rows[r]);
        for (const std::string& c : table.cells[level][r]) out << ',' << c;
      } else {
        std::string label = spec.levels[level];
        label.resize(5, ' ');
        std::string name = row_name(spec.rows[r]);
        name.resize(14, ' ');
        out << label << name;
        for (const std::string& c : table.cells[level][r]) out << ' ' << c << "  ";
      }
      out << '\n';
    }
  }
  if (!table.notes.empty()) {
    if (!csv) out << "notes: Makarov rows use the closed forms as printed; deviations from the published cells:\n";
    for (const std::string& note : table.notes) out << (csv ? "# " : "  ") << note << '\n';
  }
}

}  // namespace nwise::cli
