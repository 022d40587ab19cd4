#pragma once

#include <string>
#include <vector>

namespace thinfilm {

/// Columnar view of a diagnostics/summary CSV (leading `# manifest` comment
/// line is recognized and kept aside).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // column-major
  std::string manifest;

  static CsvTable read_file(const std::string& path);
  // Throws ConfigError naming the column when it does not exist.
  const std::vector<double>& column(const std::string& name) const;
  std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
};

struct PlotSpec {
  std::vector<std::string> columns;
  std::string x_column = "t";
  bool log_y = false;
  std::string title;
  std::string output;

  static PlotSpec from_file(const std::string& path);
};

/// Self-contained SVG 1.1 line chart, one polyline per selected column.
/// Byte-deterministic for fixed inputs. The file starts with the <svg> root
/// element; the producing manifest hash is embedded as its first child
/// comment. Log-scale y axes carry power-of-ten tick labels; points with
/// non-positive values are dropped on a log axis.
std::string render_line_chart(const CsvTable& table, const PlotSpec& spec,
                              const std::string& manifest_hash);

/// Reads the CSV, renders, writes spec.output (default: csv path + ".svg").
void write_plot(const std::string& csv_path, const PlotSpec& spec);

}  // namespace thinfilm
