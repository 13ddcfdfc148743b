#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degenwave/spectral.hpp"

namespace degenwave::cli {

/// Writes to `path.tmp` and renames over `path`, creating parent directories.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// "%.17g".
std::string num(double v);

/// CSV text: one "# config: {...}" comment line, a header row, then rows.
class CsvTable {
 public:
  CsvTable(const nlohmann::ordered_json& config, std::vector<std::string> header);
  void row(const std::vector<double>& values);
  std::string str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

/// JSON document {"schema", "config", "result"} dumped with 2-space indent.
std::string report(const std::string& schema, const nlohmann::ordered_json& config,
                   const nlohmann::ordered_json& result);

/// Plain-text eigenbasis cache: a header line naming (m, interior count,
/// parameters), then m lines "lambda residual", then one line per interior
/// node with the m eigenvector entries.
void save_basis(const std::filesystem::path& path, const EigenBasis& basis, const std::string& header);
std::optional<EigenBasis> load_basis(const std::filesystem::path& path, const std::string& header);

/// gnuplot script plotting columns of a CSV written by CsvTable.
struct PlotSeries {
  int x_column;  // 1-based
  int y_column;
  std::string title;
};
std::string gnuplot_script(const std::string& csv_name, const std::string& png_name, const std::string& xlabel,
                           const std::string& ylabel, const std::vector<PlotSeries>& series, bool log_y = false);

}  // namespace degenwave::cli
