#include "chfem/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace chfem {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw std::runtime_error("write to '" + path.string() + "' failed");
  }
}

double parse_real(const std::string& cell, std::size_t line) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first < last && *first == ' ') {
    ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    std::ostringstream msg;
    msg << "csv row " << line << ": '" << cell << "' is not a number";
    throw std::runtime_error(msg.str());
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    cells.emplace_back();
  }
  return cells;
}

// P1 sub-triangles of a P2 cell in local node numbers.
constexpr std::array<std::array<int, 3>, 4> kSubTriangles{{{0, 5, 4}, {5, 1, 3}, {4, 3, 2}, {5, 3, 4}}};

}  // namespace

std::string format_real(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

SnapshotFormat parse_snapshot_format(const std::string& name) {
  if (name == "vtk" || name == "vtk_legacy") {
    return SnapshotFormat::vtk_legacy;
  }
  if (name == "csv" || name == "csv_grid") {
    return SnapshotFormat::csv_grid;
  }
  throw std::invalid_argument("unknown snapshot format '" + name + "'");
}

std::string to_string(SnapshotFormat f) { return f == SnapshotFormat::vtk_legacy ? "vtk_legacy" : "csv_grid"; }

void write_snapshot(const std::filesystem::path& path, const Field& u, const Field* w, SnapshotFormat format,
                    const std::string& title) {
  const FeSpace& space = u.space();
  if (w && &w->space() != &space) {
    throw std::invalid_argument("write_snapshot: u and w live in different spaces");
  }
  const auto& coords = space.dof_coords();
  std::ofstream out = open_output(path);

  if (format == SnapshotFormat::csv_grid) {
    out << (w ? "x,y,u,w\n" : "x,y,u\n");
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      out << format_real(coords[i].x) << ',' << format_real(coords[i].y) << ',' << format_real(u.coeffs()[k]);
      if (w) {
        out << ',' << format_real(w->coeffs()[k]);
      }
      out << '\n';
    }
    check_written(out, path);
    return;
  }

  const std::size_t ncells = space.num_cells() * (space.degree() == 2 ? 4 : 1);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << coords.size() << " double\n";
  for (const Point& p : coords) {
    out << format_real(p.x) << ' ' << format_real(p.y) << " 0\n";
  }
  out << "CELLS " << ncells << ' ' << 4 * ncells << '\n';
  for (std::size_t c = 0; c < space.num_cells(); ++c) {
    const auto d = space.cell_dofs(c);
    if (space.degree() == 1) {
      out << "3 " << d[0] << ' ' << d[1] << ' ' << d[2] << '\n';
    } else {
      for (const auto& t : kSubTriangles) {
        out << "3 " << d[t[0]] << ' ' << d[t[1]] << ' ' << d[t[2]] << '\n';
      }
    }
  }
  out << "CELL_TYPES " << ncells << '\n';
  for (std::size_t c = 0; c < ncells; ++c) {
    out << "5\n";
  }
  out << "POINT_DATA " << coords.size() << '\n';
  const auto scalars = [&](const char* name, const Field& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < f.coeffs().size(); ++i) {
      out << format_real(f.coeffs()[i]) << '\n';
    }
  };
  scalars("u", u);
  if (w) {
    scalars("w", *w);
  }
  check_written(out, path);
}

CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path.string() + "'");
  }
  CsvData data;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path.string() + ": empty file");
  }
  data.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != data.header.size()) {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": expected " << data.header.size() << " columns, got "
          << cells.size();
      throw std::runtime_error(msg.str());
    }
    data.rows.push_back(cells);
  }
  return data;
}

std::size_t CsvData::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) {
      return i;
    }
  }
  throw std::out_of_range("csv: no column '" + name + "'");
}

double CsvData::real(std::size_t row, std::size_t col) const { return parse_real(rows.at(row).at(col), row + 1); }

std::vector<double> CsvData::reals(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.push_back(real(r, c));
  }
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), width_(header.size()), out_(open_output(path)) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    out_ << (i ? "," : "") << header[i];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) {
    throw std::invalid_argument("CsvWriter: row width does not match the header of " + path_.string());
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out_ << (i ? "," : "") << cells[i];
  }
  out_ << '\n';
  if (!out_) {
    throw std::runtime_error("write to '" + path_.string() + "' failed");
  }
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (const double v : values) {
    cells.push_back(format_real(v));
  }
  row(cells);
}

}  // namespace chfem
