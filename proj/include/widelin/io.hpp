#ifndef WIDELIN_IO_HPP
#define WIDELIN_IO_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "widelin/experiments.hpp"
#include "widelin/measurement.hpp"
#include "widelin/types.hpp"

namespace widelin {

// One row of the measurement CSV. Row k = 0 carries the DC value in y_mag
// with an empty phase field.
struct MeasurementRow {
  Index k;
  double f_hz;
  double y_mag;
  double y_phase_rad;  // unused at k = 0
  double sigma_mag2;
  double sigma_phase2;
};

struct MeasurementFile {
  std::vector<MeasurementRow> rows;  // sorted by k, starting at 0

  double y0() const { return rows.front().y_mag; }
  RVec sigma_a2() const;
  RVec sigma_phi2() const;
  std::vector<PolarMeasurement> polar() const;
};

// Parses `k,f_hz,y_mag,y_phase_rad,sigma_mag2,sigma_phase2` with a header
// line. Throws ValidationError naming the offending row and column.
MeasurementFile read_measurement_csv(const std::filesystem::path& path);

void write_measurement_csv(const std::filesystem::path& path,
                           const MeasurementFile& file);

// Plain `key = value` config lines, '#' comments.
std::map<std::string, std::string> read_config(
    const std::filesystem::path& path);

// Whitespace-delimited table (sweep value then one MSE column per
// estimator) and a CSV twin with headers and standard-error columns.
// All values use round-trip (17 significant digit) precision.
void write_sweep_dat(const std::filesystem::path& path,
                     const SweepResult& result);
void write_sweep_csv(const std::filesystem::path& path,
                     const SweepResult& result, const std::string& sweep_name);

std::string format_full(double v);

}  // namespace widelin

#endif  // WIDELIN_IO_HPP
