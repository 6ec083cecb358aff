#include "widelin/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace widelin {

std::string format_full(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

RVec MeasurementFile::sigma_a2() const {
  RVec out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out[static_cast<Index>(i)] = rows[i].sigma_mag2;
  return out;
}

RVec MeasurementFile::sigma_phi2() const {
  RVec out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out[static_cast<Index>(i)] = rows[i].sigma_phase2;
  return out;
}

std::vector<PolarMeasurement> MeasurementFile::polar() const {
  std::vector<PolarMeasurement> out;
  out.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i)
    out.push_back(
        PolarMeasurement{rows[i].y_mag, rows[i].y_phase_rad, rows[i].k});
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_field(const std::string& field, int row, const char* col,
                   bool allow_empty = false) {
  const std::string t = trim(field);
  if (t.empty()) {
    if (allow_empty) return 0.0;
    throw ValidationError("measurement CSV row " + std::to_string(row) +
                          ": empty field '" + col + "'");
  }
  try {
    std::size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("measurement CSV row " + std::to_string(row) +
                          ": cannot parse field '" + col + "' value '" + t +
                          "'");
  }
}

}  // namespace

MeasurementFile read_measurement_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError("cannot open measurement file: " + path.string());

  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("measurement file is empty: " + path.string());
  const std::string expected = "k,f_hz,y_mag,y_phase_rad,sigma_mag2,sigma_phase2";
  std::string header = line;
  header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
  header.erase(std::remove(header.begin(), header.end(), '\r'), header.end());
  if (header != expected)
    throw ValidationError("measurement CSV header must be '" + expected + "'");

  MeasurementFile file;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 6)
      throw ValidationError("measurement CSV row " + std::to_string(row) +
                            ": expected 6 columns, got " +
                            std::to_string(f.size()));
    MeasurementRow r;
    r.k = static_cast<Index>(parse_field(f[0], row, "k"));
    r.f_hz = parse_field(f[1], row, "f_hz");
    r.y_mag = parse_field(f[2], row, "y_mag");
    const bool dc = r.k == 0;
    r.y_phase_rad = parse_field(f[3], row, "y_phase_rad", dc);
    r.sigma_mag2 = parse_field(f[4], row, "sigma_mag2");
    r.sigma_phase2 = parse_field(f[5], row, "sigma_phase2");
    file.rows.push_back(r);
  }
  if (file.rows.size() < 2)
    throw ValidationError("measurement file needs a DC row and at least one "
                          "AC row");
  std::sort(file.rows.begin(), file.rows.end(),
            [](const MeasurementRow& a, const MeasurementRow& b) {
              return a.k < b.k;
            });
  for (std::size_t i = 0; i < file.rows.size(); ++i)
    if (file.rows[i].k != static_cast<Index>(i))
      throw ValidationError(
          "measurement CSV: frequency indices must be contiguous from 0");
  return file;
}

void write_measurement_csv(const std::filesystem::path& path,
                           const MeasurementFile& file) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write: " + path.string());
  out << "k,f_hz,y_mag,y_phase_rad,sigma_mag2,sigma_phase2\n";
  for (const auto& r : file.rows) {
    out << r.k << ',' << format_full(r.f_hz) << ',' << format_full(r.y_mag)
        << ',';
    if (r.k != 0) out << format_full(r.y_phase_rad);
    out << ',' << format_full(r.sigma_mag2) << ','
        << format_full(r.sigma_phase2) << '\n';
  }
}

std::map<std::string, std::string> read_config(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(row) +
                            ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ValidationError("config line " + std::to_string(row) +
                            ": empty key");
    out[key] = value;
  }
  return out;
}

void write_sweep_dat(const std::filesystem::path& path,
                     const SweepResult& result) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write: " + path.string());
  for (const auto& row : result.rows) {
    out << format_full(row.sweep_value);
    for (double m : row.mse) out << ' ' << format_full(m);
    out << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path,
                     const SweepResult& result,
                     const std::string& sweep_name) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write: " + path.string());
  out << sweep_name;
  for (const auto& label : result.estimator_labels) out << ',' << label;
  for (const auto& label : result.estimator_labels)
    out << ',' << label << "_stderr";
  out << '\n';
  for (const auto& row : result.rows) {
    out << format_full(row.sweep_value);
    for (double m : row.mse) out << ',' << format_full(m);
    for (double s : row.std_error) out << ',' << format_full(s);
    out << '\n';
  }
}

}  // namespace widelin
