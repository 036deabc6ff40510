#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "chfem/fe_space.hpp"

namespace chfem {

/// Decimal text with 17 significant digits; parses back to the same double.
std::string format_real(double v);

enum class SnapshotFormat { vtk_legacy, csv_grid };

SnapshotFormat parse_snapshot_format(const std::string& name);
std::string to_string(SnapshotFormat f);

/// Writes u (and w when given) on the DOF nodes.
///  - vtk_legacy: ASCII UNSTRUCTURED_GRID with triangle cells. P2 fields use
///    the full node cloud and four P1 sub-triangles per cell.
///  - csv_grid: header "x,y,u[,w]", one row per DOF.
/// Throws std::runtime_error when the file cannot be written.
void write_snapshot(const std::filesystem::path& path, const Field& u, const Field* w = nullptr,
                    SnapshotFormat format = SnapshotFormat::vtk_legacy, const std::string& title = "chfem");

struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
  /// Cell parsed as a double ("nan" allowed); throws std::runtime_error.
  double real(std::size_t row, std::size_t col) const;
  std::vector<double> reals(const std::string& name) const;
};

/// Reads a CSV with one header line. Throws std::runtime_error on a missing
/// file or a row whose width differs from the header.
CsvData read_csv(const std::filesystem::path& path);

/// Fixed-schema CSV table; every row must match the header width.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);
  void flush() { out_.flush(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::size_t width_;
  std::ofstream out_;
};

}  // namespace chfem
