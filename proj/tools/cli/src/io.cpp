#include "degenwave/cli/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "degenwave/error.hpp"

namespace degenwave::cli {

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SolverError("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw SolverError("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(const nlohmann::ordered_json& config, std::vector<std::string> header)
    : columns_(header.size()) {
  text_ = "# config: " + config.dump() + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += "\n";
}

void CsvTable::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw SolverError("CSV row has the wrong number of columns");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += num(values[i]);
  }
  text_ += '\n';
}

std::string report(const std::string& schema, const nlohmann::ordered_json& config,
                   const nlohmann::ordered_json& result) {
  nlohmann::ordered_json j;
  j["schema"] = schema;
  j["config"] = config;
  j["result"] = result;
  return j.dump(2) + "\n";
}

void save_basis(const std::filesystem::path& path, const EigenBasis& basis, const std::string& header) {
  std::string text = "# " + header + "\n" + std::to_string(basis.size()) + " " +
                     std::to_string(basis.interior_count()) + " " + num(basis.volume_element) + "\n";
  for (Index k = 0; k < basis.size(); ++k) text += num(basis.eigenvalues[k]) + " " + num(basis.residuals[k]) + "\n";
  for (Index i = 0; i < basis.interior_count(); ++i) {
    for (Index k = 0; k < basis.size(); ++k) {
      if (k) text += ' ';
      text += num(basis.eigenvectors(i, k));
    }
    text += '\n';
  }
  atomic_write(path, text);
}

std::optional<EigenBasis> load_basis(const std::filesystem::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line) || line != "# " + header) return std::nullopt;
  Index m = 0, rows = 0;
  EigenBasis basis;
  if (!(in >> m >> rows >> basis.volume_element) || m < 1 || rows < 1) return std::nullopt;
  basis.eigenvalues.resize(m);
  basis.residuals.resize(m);
  basis.eigenvectors.resize(rows, m);
  for (Index k = 0; k < m; ++k) {
    if (!(in >> basis.eigenvalues[k] >> basis.residuals[k])) return std::nullopt;
  }
  for (Index i = 0; i < rows; ++i) {
    for (Index k = 0; k < m; ++k) {
      if (!(in >> basis.eigenvectors(i, k))) return std::nullopt;
    }
  }
  return basis;
}

std::string gnuplot_script(const std::string& csv_name, const std::string& png_name, const std::string& xlabel,
                           const std::string& ylabel, const std::vector<PlotSeries>& series, bool log_y) {
  std::ostringstream os;
  os << "# gnuplot " << csv_name.substr(0, csv_name.rfind('.')) << ".gp\n"
     << "set datafile separator ','\n"
     << "set datafile commentschars '#'\n"
     << "set key autotitle columnhead\n"
     << "set terminal pngcairo size 900,600\n"
     << "set output '" << png_name << "'\n"
     << "set xlabel '" << xlabel << "'\n"
     << "set ylabel '" << ylabel << "'\n";
  if (log_y) os << "set logscale y\n";
  os << "plot ";
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i) os << ", \\\n     ";
    os << "'" << csv_name << "' using " << series[i].x_column << ":" << series[i].y_column << " with lines title '"
       << series[i].title << "'";
  }
  os << "\n";
  return os.str();
}

}  // namespace degenwave::cli
